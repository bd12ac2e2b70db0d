#include "osdm/config.hpp"

#include "osdm/phantom.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace osdm {

const std::vector<ConfigKey>& config_key_table() {
  static const std::vector<ConfigKey> table = {
      {"geom.source_to_center", "cm", "40", "rotation center to X-ray source"},
      {"geom.detector_to_center", "cm", "40", "rotation center to detector"},
      {"geom.detector_width", "cm", "41.3", "full flat-detector width"},
      {"geom.n_detectors", "count", "180", "detector elements"},
      {"geom.n_views", "count", "180", "projection views"},
      {"geom.angle_start", "rad", "0", "first view angle"},
      {"geom.angle_span", "rad", "6.283185307179586", "angular coverage"},
      {"grid.width", "px", "128", "image width"},
      {"grid.height", "px", "128", "image height"},
      {"grid.pixel_size", "cm", "0.15", "pixel spacing"},
      {"phantom.preset", "head|none", "head", "built-in ellipse set"},
      {"phantom.mu_water", "1/cm", "0.2", "phantom water attenuation"},
      {"phantom.fov_radius", "cm", "9.0", "phantom outer radius"},
      {"photon.i0", "photons", "1e5", "source intensity per ray"},
      {"photon.background", "photons", "0", "scatter/electronic floor"},
      {"photon.eta", "dimensionless", "22000", "calibration scale"},
      {"sim.target_log_max", "dimensionless", "4",
       "max stored line integral over eta after calibration"},
      {"schedule.sigma_min", "normalized units", "0.01", "lowest noise std"},
      {"schedule.sigma_max", "normalized units", "1.0", "highest noise std"},
      {"schedule.n_levels", "count", "200", "noise levels N"},
      {"train.n_iters", "count", "2000", "optimizer steps"},
      {"train.batch_size", "count", "8", "patches per step"},
      {"train.learning_rate", "1/step", "1e-3", "Adam learning rate"},
      {"train.ema_decay", "dimensionless", "0.999", "parameter EMA decay"},
      {"train.hidden_channels", "count", "32", "conv feature maps"},
      {"recon.outer_steps", "count", "200", "outer iterations N"},
      {"recon.inner_steps", "count", "1", "corrector iterations M"},
      {"recon.rank", "count", "38", "singular value threshold K"},
      {"recon.tv_alpha", "normalized units", "10", "TV descent step length"},
      {"recon.pwls_mu", "dimensionless", "0.5", "data/prior balance"},
      {"recon.corrector_snr", "dimensionless", "0.16", "Langevin SNR r"},
      {"recon.window", "px", "8", "Hankel sliding window a"},
      {"recon.score_stride", "px", "8",
       "window-position stride for score evaluation (1 = every position)"},
      {"recon.enable_diffusion", "0|1", "1", "predictor/corrector steps"},
      {"recon.enable_lr", "0|1", "1", "low-rank Hankel step"},
      {"recon.enable_tv", "0|1", "1", "TV step"},
      {"recon.enable_pwls", "0|1", "1", "PWLS step"},
      {"fbp.filter", "ramp|ramp-hann", "ramp", "reconstruction filter"},
      {"fbp.cutoff", "fraction of Nyquist", "1.0", "filter cutoff"},
      {"sart.n_iters", "count", "20", "SART sweeps"},
      {"sart.relaxation", "dimensionless", "1.0", "SART relaxation in (0,2)"},
      {"sart.tv_steps", "count", "10", "TV steps per sweep"},
      {"sart.tv_step_size", "attenuation-length", "0.002", "TV descent step"},
      {"export.mu_water", "1/cm", "0.2", "HU conversion reference"},
      {"seed", "u64", "0", "global RNG seed"},
  };
  return table;
}

std::string config_help_text() {
  std::ostringstream os;
  os << "Config file keys (flat key=value; '#' starts a comment):\n";
  for (const auto& k : config_key_table())
    os << "  " << k.name << " [" << k.units << "] (default " << k.default_value
       << ") - " << k.description << "\n";
  os << "  phantom.ellipse.<i> [cx,cy,rx,ry,angle_deg,value] - custom "
        "ellipse; overrides the preset\n";
  return os.str();
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool known_key(const std::string& key) {
  for (const auto& k : config_key_table())
    if (key == k.name) return true;
  if (key.rfind("phantom.ellipse.", 0) == 0) {
    std::string idx = key.substr(16);
    return !idx.empty() &&
           std::all_of(idx.begin(), idx.end(),
                       [](unsigned char c) { return std::isdigit(c); });
  }
  return false;
}

std::vector<double> parse_numbers(const std::string& s, std::size_t expect,
                                  const std::string& key) {
  std::vector<double> out;
  std::string tmp = s;
  std::replace(tmp.begin(), tmp.end(), ',', ' ');
  std::istringstream is(tmp);
  double v;
  while (is >> v) out.push_back(v);
  if (out.size() != expect)
    throw ConfigError("config: " + key + " expects " + std::to_string(expect) +
                      " numbers");
  return out;
}

}  // namespace

RunConfig RunConfig::parse_lines(const std::vector<std::string>& lines) {
  RunConfig cfg;
  for (const auto& raw : lines) {
    std::string line = raw;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected key=value, got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (!known_key(key)) throw ConfigError("config: unknown key '" + key + "'");
    if (value.empty()) throw ConfigError("config: empty value for " + key);
    cfg.values_[key] = value;
  }
  return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) lines.push_back(line);
  return parse_lines(lines);
}

std::string RunConfig::text(const std::string& key) const {
  auto it = values_.find(key);
  if (it != values_.end()) return it->second;
  for (const auto& k : config_key_table())
    if (key == k.name) return k.default_value;
  throw ConfigError("config: no such key '" + key + "'");
}

double RunConfig::number(const std::string& key) const {
  std::string v = text(key);
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config: " + key + " is not a number: '" + v + "'");
  }
}

bool RunConfig::flag(const std::string& key) const {
  std::string v = text(key);
  if (v == "1" || v == "true" || v == "on") return true;
  if (v == "0" || v == "false" || v == "off") return false;
  throw ConfigError("config: " + key + " must be 0 or 1");
}

std::uint64_t RunConfig::seed() const {
  if (seed_override_) return seed_;
  return std::uint64_t(number("seed"));
}

FanBeamGeometry RunConfig::geometry() const {
  FanBeamGeometry g;
  g.source_to_center = number("geom.source_to_center");
  g.detector_to_center = number("geom.detector_to_center");
  g.detector_width = number("geom.detector_width");
  g.n_detectors = int(number("geom.n_detectors"));
  g.n_views = int(number("geom.n_views"));
  g.angle_start = number("geom.angle_start");
  g.angle_span = number("geom.angle_span");
  g.validate();
  return g;
}

int RunConfig::grid_width() const { return int(number("grid.width")); }
int RunConfig::grid_height() const { return int(number("grid.height")); }
double RunConfig::pixel_size() const { return number("grid.pixel_size"); }

EllipsePhantom RunConfig::phantom() const {
  EllipsePhantom custom;
  for (const auto& [key, value] : values_) {
    if (key.rfind("phantom.ellipse.", 0) != 0) continue;
    auto v = parse_numbers(value, 6, key);
    custom.push_back({v[0], v[1], v[2], v[3], v[4] * M_PI / 180.0, v[5]});
  }
  if (!custom.empty()) return custom;
  std::string preset = text("phantom.preset");
  if (preset == "none") return {};
  if (preset == "head")
    return head_phantom(number("phantom.fov_radius"), number("phantom.mu_water"));
  throw ConfigError("config: unknown phantom.preset '" + preset + "'");
}

PhotonModel RunConfig::photon_model() const {
  PhotonModel m;
  m.source_intensity = number("photon.i0");
  m.background = number("photon.background");
  m.eta = number("photon.eta");
  m.rng_seed = seed();
  m.validate();
  return m;
}

SigmaSchedule RunConfig::schedule() const {
  SigmaSchedule s;
  s.sigma_min = number("schedule.sigma_min");
  s.sigma_max = number("schedule.sigma_max");
  s.n_levels = int(number("schedule.n_levels"));
  s.validate();
  return s;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig t;
  t.n_iters = int(number("train.n_iters"));
  t.batch_size = int(number("train.batch_size"));
  t.learning_rate = number("train.learning_rate");
  t.ema_decay = number("train.ema_decay");
  t.rng_seed = seed();
  t.validate();
  return t;
}

int RunConfig::hidden_channels() const {
  return int(number("train.hidden_channels"));
}

ReconConfig RunConfig::recon_config() const {
  ReconConfig r;
  r.outer_steps = int(number("recon.outer_steps"));
  r.inner_steps = int(number("recon.inner_steps"));
  r.rank = int(number("recon.rank"));
  r.tv_alpha = number("recon.tv_alpha");
  r.pwls_mu = number("recon.pwls_mu");
  r.corrector_snr = number("recon.corrector_snr");
  r.hankel_window = int(number("recon.window"));
  r.score_stride = int(number("recon.score_stride"));
  r.schedule = schedule();
  r.schedule.n_levels = r.outer_steps;
  r.enable_diffusion = flag("recon.enable_diffusion");
  r.enable_lr = flag("recon.enable_lr");
  r.enable_tv = flag("recon.enable_tv");
  r.enable_pwls = flag("recon.enable_pwls");
  r.rng_seed = seed();
  r.validate();
  return r;
}

FilterSpec RunConfig::filter_spec() const {
  FilterSpec f;
  std::string kind = text("fbp.filter");
  if (kind == "ramp")
    f.kind = FilterKind::Ramp;
  else if (kind == "ramp-hann")
    f.kind = FilterKind::RampHann;
  else
    throw ConfigError("config: fbp.filter must be ramp or ramp-hann");
  f.cutoff = number("fbp.cutoff");
  f.validate();
  return f;
}

SartParams RunConfig::sart_params() const {
  SartParams s;
  s.n_iters = int(number("sart.n_iters"));
  s.relaxation = number("sart.relaxation");
  s.tv_steps_per_iter = int(number("sart.tv_steps"));
  s.tv_step_size = number("sart.tv_step_size");
  s.validate();
  return s;
}

}  // namespace osdm
