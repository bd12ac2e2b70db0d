#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "osdm/arrayio.hpp"
#include "osdm/config.hpp"
#include "osdm/fbp.hpp"
#include "osdm/hankel.hpp"
#include "osdm/lowdose.hpp"
#include "osdm/metrics.hpp"
#include "osdm/phantom.hpp"
#include "osdm/pngio.hpp"
#include "osdm/projector.hpp"
#include "osdm/sampler.hpp"
#include "osdm/sart.hpp"
#include "osdm/scorenet.hpp"
#include "osdm/simd.hpp"

namespace fs = std::filesystem;
using namespace osdm;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int threads = 1;
};

RunConfig load_config(const GlobalOpts& g) {
  RunConfig cfg = g.config_path.empty() ? RunConfig()
                                        : RunConfig::parse_file(g.config_path);
  if (g.seed_set) cfg.override_seed(g.seed);
  return cfg;
}

std::string out_path(const GlobalOpts& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return (fs::path(g.out_dir) / name).string();
}

double sinogram_max(const Sinogram& s) {
  return *std::max_element(s.values.begin(), s.values.end());
}

void write_scalar(const std::string& path, double v) {
  ArrayData a;
  a.dims = {1};
  a.values = {v};
  write_array(path, a);
}

double read_scalar(const std::string& path) {
  ArrayData a = read_array(path);
  if (a.count() != 1) throw ConfigError("expected a 1-element array: " + path);
  return a.values[0];
}

int cmd_phantom(const GlobalOpts& g) {
  RunConfig cfg = load_config(g);
  ImageGrid img = make_phantom(cfg.phantom(), cfg.grid_width(),
                               cfg.grid_height(), cfg.pixel_size());
  std::string path = out_path(g, "phantom.bin");
  write_image(path, img);
  std::cout << "wrote " << path << " (" << img.width << "x" << img.height
            << ", pixel " << img.pixel_size << " cm)\n";
  return 0;
}

int cmd_project(const GlobalOpts& g, const std::string& image_path) {
  RunConfig cfg = load_config(g);
  ImageGrid img = read_image(image_path, cfg.pixel_size());
  Sinogram sino = forward_project(img, cfg.geometry());
  std::string path = out_path(g, "projection.bin");
  write_sinogram(path, sino);
  std::cout << "wrote " << path << " (" << sino.n_views << "x"
            << sino.n_detectors << ", raw line integrals)\n";
  return 0;
}

int cmd_simulate(const GlobalOpts& g, const std::string& image_path,
                 bool ideal) {
  RunConfig cfg = load_config(g);
  ImageGrid img = image_path.empty()
                      ? make_phantom(cfg.phantom(), cfg.grid_width(),
                                     cfg.grid_height(), cfg.pixel_size())
                      : read_image(image_path, cfg.pixel_size());
  PhotonModel model = cfg.photon_model();
  Sinogram raw = forward_project(img, cfg.geometry());

  double raw_max = sinogram_max(raw);
  if (!(raw_max > 0.0)) throw NumericalError("simulate: empty projection");
  double scale = cfg.target_log_max() * model.eta / raw_max;
  Sinogram clean(raw.n_views, raw.n_detectors, scale);
  for (std::size_t i = 0; i < raw.size(); ++i)
    clean.values[i] = raw.values[i] * scale;

  write_sinogram(out_path(g, "clean.bin"), clean);
  write_scalar(out_path(g, "calibration.bin"), scale);

  if (ideal) {
    write_sinogram(out_path(g, "noisy.bin"), clean);
    std::vector<double> w(clean.size(), model.source_intensity);
    ArrayData wa;
    wa.dims = {std::uint32_t(clean.n_views), std::uint32_t(clean.n_detectors)};
    wa.values = w;
    write_array(out_path(g, "weights.bin"), wa);
    std::cout << "ideal mode: noisy.bin equals clean.bin\n";
    return 0;
  }

  std::vector<double> counts = simulate_counts(clean, model);
  ArrayData ca;
  ca.dims = {std::uint32_t(clean.n_views), std::uint32_t(clean.n_detectors)};
  ca.values = counts;
  write_array(out_path(g, "counts.bin"), ca);

  Sinogram noisy =
      log_transform(counts, clean.n_views, clean.n_detectors, model, scale);
  write_sinogram(out_path(g, "noisy.bin"), noisy);

  std::vector<double> w = pwls_weights(noisy, model);
  ArrayData wa;
  wa.dims = ca.dims;
  wa.values = w;
  write_array(out_path(g, "weights.bin"), wa);

  std::cout << "wrote clean.bin, counts.bin, noisy.bin, weights.bin, "
               "calibration.bin (scale "
            << scale << ")\n";
  return 0;
}

int cmd_train(const GlobalOpts& g, const std::string& sino_path,
              const std::string& resume_path) {
  RunConfig cfg = load_config(g);
  Sinogram x = read_sinogram(sino_path);
  int window = int(cfg.number("recon.window"));

  double norm = sinogram_max(x);
  if (!(norm > 0.0)) throw NumericalError("train: empty sinogram");
  std::vector<double> xn = x.values;
  for (auto& v : xn) v /= norm;

  HankelMatrix H = hankel_transform(xn, x.n_views, x.n_detectors, window);
  PatchBatch patches = split_patches(H, cfg.seed());
  std::cout << "hankel " << H.rows() << "x" << H.cols() << ", "
            << patches.patches.size() << " patches of " << patches.patch_dim
            << "x" << patches.patch_dim << " (simd: " << simd::active_name()
            << ")\n";

  TrainConfig tc = cfg.train_config();
  SigmaSchedule schedule = cfg.schedule();
  ScoreNet resumed;
  const ScoreNet* resume = nullptr;
  if (!resume_path.empty()) {
    resumed = load_checkpoint(resume_path);
    resume = &resumed;
  }
  TrainResult result =
      train(patches, tc, schedule, cfg.hidden_channels(), resume);
  result.net.norm_factor = norm;

  std::string ckpt = out_path(g, "checkpoint.bin");
  save_checkpoint(ckpt, result.net, tc.rng_seed);
  std::ofstream loss_csv(out_path(g, "loss.csv"));
  loss_csv << "iter,loss\n";
  for (std::size_t i = 0; i < result.loss_history.size(); ++i)
    loss_csv << (i + 1) << "," << result.loss_history[i] << "\n";
  std::cout << "wrote " << ckpt << " (final loss "
            << result.loss_history.back() << ")\n";
  return 0;
}

int cmd_reconstruct(const GlobalOpts& g, const std::string& sino_path,
                    const std::string& weights_path,
                    const std::string& ckpt_path,
                    const std::string& calib_path,
                    const std::string& reference_path) {
  RunConfig cfg = load_config(g);
  ReconConfig rc = cfg.recon_config();

  double scale = calib_path.empty() ? 1.0 : read_scalar(calib_path);
  Sinogram y = read_sinogram(sino_path, scale);

  std::vector<double> weights;
  if (!weights_path.empty()) {
    ArrayData wa = read_array(weights_path);
    if (wa.count() != y.size())
      throw ConfigError("reconstruct: weight array shape mismatch");
    weights = std::move(wa.values);
  } else {
    weights = pwls_weights(y, cfg.photon_model());
  }

  ScoreNet net;
  if (!ckpt_path.empty()) {
    net = load_checkpoint(ckpt_path);
    rc.schedule.sigma_min = net.schedule.sigma_min;
    rc.schedule.sigma_max = net.schedule.sigma_max;
  } else {
    if (rc.enable_diffusion)
      throw ConfigError(
          "reconstruct: diffusion enabled but no --checkpoint given");
    net = ScoreNet(1, 0);
    net.norm_factor = sinogram_max(y);
    net.schedule = rc.schedule;
  }

  ReconContext ctx;
  ctx.geom = cfg.geometry();
  ctx.filter = cfg.filter_spec();
  ctx.image_width = cfg.grid_width();
  ctx.image_height = cfg.grid_height();
  ctx.pixel_size = cfg.pixel_size();
  Sinogram reference;
  if (!reference_path.empty()) {
    reference = read_sinogram(reference_path, scale);
    ctx.reference = &reference;
  }

  ReconResult result = reconstruct(y, weights, net, rc, ctx);
  write_sinogram(out_path(g, "xhat.bin"), result.sinogram);
  write_image(out_path(g, "image.bin"), result.image);
  std::ofstream trace(out_path(g, "trace.csv"));
  trace << "step,sigma,data_fidelity,tv,psnr\n";
  for (const auto& row : result.trace)
    trace << row.step << "," << row.sigma << "," << row.data_fidelity << ","
          << row.tv << "," << row.psnr << "\n";
  std::cout << "wrote xhat.bin, image.bin, trace.csv\n";
  return 0;
}

int cmd_baseline(const GlobalOpts& g, const std::string& sino_path,
                 const std::string& method, const std::string& calib_path) {
  RunConfig cfg = load_config(g);
  double scale = calib_path.empty() ? 1.0 : read_scalar(calib_path);
  Sinogram y = read_sinogram(sino_path, scale);

  // Baselines run on raw attenuation-length values.
  Sinogram att(y.n_views, y.n_detectors, 1.0);
  for (std::size_t i = 0; i < y.size(); ++i) att.values[i] = y.values[i] / scale;

  ImageGrid img;
  if (method == "fbp") {
    img = fbp(att, cfg.geometry(), cfg.filter_spec(), cfg.grid_width(),
              cfg.grid_height(), cfg.pixel_size());
  } else if (method == "sart-tv") {
    img = sart_tv(att, cfg.geometry(), cfg.sart_params(), cfg.grid_width(),
                  cfg.grid_height(), cfg.pixel_size());
  } else {
    throw ConfigError("baseline: method must be fbp or sart-tv");
  }
  std::string path = out_path(g, method == "fbp" ? "fbp.bin" : "sart_tv.bin");
  write_image(path, img);
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_eval(const GlobalOpts& g, const std::string& ref_path,
             const std::vector<std::string>& test_paths,
             const std::string& csv_path) {
  ArrayData ref = read_array(ref_path);
  if (ref.dims.size() != 2) throw ConfigError("eval: reference must be 2D");
  int rows = int(ref.dims[0]), cols = int(ref.dims[1]);
  double lo = *std::min_element(ref.values.begin(), ref.values.end());
  double hi = *std::max_element(ref.values.begin(), ref.values.end());
  double range = (hi > lo) ? hi - lo : 1.0;

  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!csv_path.empty()) {
    file.open(csv_path);
    os = &file;
  }
  *os << "id,psnr,ssim,mse\n";
  for (const auto& path : test_paths) {
    ArrayData test = read_array(path);
    if (test.dims != ref.dims)
      throw ConfigError("eval: shape mismatch for " + path);
    MetricReport r = evaluate(test.values, ref.values, rows, cols, range);
    *os << fs::path(path).stem().string() << "," << r.psnr << "," << r.ssim
        << "," << r.mse << "\n";
  }
  return 0;
}

int cmd_export_png(const GlobalOpts& g, const std::string& array_path,
                   const std::string& png_path, double lo, double hi,
                   bool as_hu) {
  RunConfig cfg = load_config(g);
  ArrayData a = read_array(array_path);
  if (a.dims.size() != 2) throw ConfigError("export-png: array must be 2D");
  std::vector<double> values = a.values;
  if (as_hu) {
    double mu_water = cfg.mu_water();
    for (auto& v : values) v = attenuation_to_hu(v, mu_water);
  }
  write_png_gray(png_path, values, int(a.dims[0]), int(a.dims[1]), lo, hi);
  std::cout << "wrote " << png_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"osdm: projection-domain low-dose CT reconstruction toolkit"};
  app.footer(config_help_text());
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "config file (key=value lines)");
  app.add_option("--out", g.out_dir, "output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", g.seed, "override the config seed");
  app.add_option("--threads", g.threads,
                 "worker threads (1 = bit-reproducible; compute is currently "
                 "sequential at any value)");

  auto* phantom = app.add_subcommand("phantom", "rasterize the ellipse phantom");

  auto* project = app.add_subcommand("project", "forward-project an image");
  std::string project_image;
  project->add_option("--image", project_image, "input image array")->required();

  auto* simulate =
      app.add_subcommand("simulate", "simulate a low-dose measurement");
  std::string sim_image;
  bool sim_ideal = false;
  simulate->add_option("--image", sim_image,
                       "input image (default: phantom from config)");
  simulate->add_flag("--ideal", sim_ideal, "infinite dose: noisy equals clean");

  auto* train_cmd =
      app.add_subcommand("train", "train the score model on one sinogram");
  std::string train_sino, train_resume;
  train_cmd->add_option("--sinogram", train_sino, "normal-dose sinogram file")
      ->required();
  train_cmd->add_option("--resume", train_resume, "checkpoint to resume from");

  auto* recon = app.add_subcommand("reconstruct", "run the iterative sampler");
  std::string rec_sino, rec_weights, rec_ckpt, rec_calib, rec_ref;
  recon->add_option("--sinogram", rec_sino, "low-dose sinogram file")
      ->required();
  recon->add_option("--weights", rec_weights,
                    "PWLS weight file (default: derived from the photon model)");
  recon->add_option("--checkpoint", rec_ckpt, "trained score model");
  recon->add_option("--calibration", rec_calib, "calibration scale file");
  recon->add_option("--reference", rec_ref, "clean sinogram for the PSNR trace");

  auto* baseline = app.add_subcommand("baseline", "FBP or SART-TV baseline");
  std::string base_sino, base_method = "fbp", base_calib;
  baseline->add_option("--sinogram", base_sino, "sinogram file")->required();
  baseline->add_option("--method", base_method, "fbp | sart-tv")
      ->capture_default_str();
  baseline->add_option("--calibration", base_calib, "calibration scale file");

  auto* eval_cmd = app.add_subcommand("eval", "PSNR/SSIM/MSE against a reference");
  std::string eval_ref, eval_csv;
  std::vector<std::string> eval_tests;
  eval_cmd->add_option("--reference", eval_ref, "reference array")->required();
  eval_cmd->add_option("tests", eval_tests, "arrays to score")->required();
  eval_cmd->add_option("--csv", eval_csv, "write CSV here instead of stdout");

  auto* export_png = app.add_subcommand("export-png", "windowed grayscale PNG");
  std::string png_array, png_out;
  double png_lo = -250.0, png_hi = 600.0;
  bool png_hu = false;
  export_png->add_option("--array", png_array, "input 2D array")->required();
  export_png->add_option("--output", png_out, "output PNG path")->required();
  export_png->add_option("--lo", png_lo, "window low")->capture_default_str();
  export_png->add_option("--hi", png_hi, "window high")->capture_default_str();
  export_png->add_flag("--hu", png_hu,
                       "convert attenuation to Hounsfield units first");

  try {
    app.parse(argc, argv);
    g.seed_set = seed_opt->count() > 0;
    if (phantom->parsed()) return cmd_phantom(g);
    if (project->parsed()) return cmd_project(g, project_image);
    if (simulate->parsed()) return cmd_simulate(g, sim_image, sim_ideal);
    if (train_cmd->parsed()) return cmd_train(g, train_sino, train_resume);
    if (recon->parsed())
      return cmd_reconstruct(g, rec_sino, rec_weights, rec_ckpt, rec_calib,
                             rec_ref);
    if (baseline->parsed()) return cmd_baseline(g, base_sino, base_method, base_calib);
    if (eval_cmd->parsed()) return cmd_eval(g, eval_ref, eval_tests, eval_csv);
    if (export_png->parsed())
      return cmd_export_png(g, png_array, png_out, png_lo, png_hi, png_hu);
    return 0;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
