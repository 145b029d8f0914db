#include "neuroloop/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

#include "neuroloop/error.hpp"
#include "neuroloop/io.hpp"

namespace neuroloop::config {
namespace {

double to_double(const std::string& text, const std::string& where) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw ConfigError(where + ": expected a number, got '" + text + "'");
  return v;
}

std::vector<double> numbers(const std::string& text, const std::string& where) {
  std::istringstream in(text);
  std::vector<double> out;
  std::string tok;
  while (in >> tok) out.push_back(to_double(tok, where));
  return out;
}

}  // namespace

Config Config::parse(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  Config c;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config key '" + section + "' outside any section");
    for (const auto& [key, value] : body) c.sections_[section][key] = value.get_value<std::string>();
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  Config c = parse(ss.str());
  const auto version = c.get("format", "version");
  if (!version) throw ConfigError("config '" + path.string() + "' has no [format] version");
  if (*version != std::to_string(kConfigVersion))
    throw ConfigError("unsupported config version " + *version);
  return c;
}

std::string Config::dump() const {
  boost::property_tree::ptree tree;
  tree.put("format.version", std::to_string(kConfigVersion));
  for (const auto& [section, body] : sections_) {
    if (section == "format") continue;
    boost::property_tree::ptree child;
    for (const auto& [key, value] : body) child.put(boost::property_tree::ptree::path_type(key, '\0'), value);
    tree.add_child(boost::property_tree::ptree::path_type(section, '\0'), child);
  }
  std::ostringstream out;
  boost::property_tree::ini_parser::write_ini(out, tree);
  return out.str();
}

void Config::save(const std::filesystem::path& path) const { io::atomic_write(path, dump()); }

bool Config::has(const std::string& section, const std::string& key) const {
  return get(section, key).has_value();
}

std::optional<std::string> Config::get(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return std::nullopt;
  const auto k = s->second.find(key);
  if (k == s->second.end()) return std::nullopt;
  return k->second;
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  const auto v = get(section, key);
  return v ? to_double(*v, section + "." + key) : fallback;
}

long Config::get_int(const std::string& section, const std::string& key, long fallback) const {
  const auto v = get(section, key);
  if (!v) return fallback;
  long out = 0;
  const auto res = std::from_chars(v->data(), v->data() + v->size(), out);
  if (res.ec != std::errc() || res.ptr != v->data() + v->size())
    throw ConfigError(section + "." + key + ": expected an integer, got '" + *v + "'");
  return out;
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  const auto v = get(section, key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes" || *v == "on") return true;
  if (*v == "false" || *v == "0" || *v == "no" || *v == "off") return false;
  throw ConfigError(section + "." + key + ": expected a boolean, got '" + *v + "'");
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  sections_[section][key] = value;
}

void Config::set(const std::string& section, const std::string& key, double value) {
  sections_[section][key] = io::format_double(value);
}

PlantConfig plant_config(const Config& c, PlantConfig p) {
  p.baseline_centroid = c.get_double("plant", "baseline_centroid", p.baseline_centroid);
  p.min_centroid = c.get_double("plant", "min_centroid", p.min_centroid);
  p.fatigue_gain = c.get_double("plant", "fatigue_gain", p.fatigue_gain);
  p.recovery_rate = c.get_double("plant", "recovery_rate", p.recovery_rate);
  p.noise_bandwidth[0] = c.get_double("plant", "noise_lo", p.noise_bandwidth[0]);
  p.noise_bandwidth[1] = c.get_double("plant", "noise_hi", p.noise_bandwidth[1]);
  p.amplitude = c.get_double("plant", "amplitude", p.amplitude);
  p.sample_rate = c.get_double("plant", "sample_rate", p.sample_rate);
  if (const auto s = c.get("plant", "seed")) p.seed = std::stoull(*s);
  p.validate();
  return p;
}

void put(Config& c, const PlantConfig& p) {
  c.set("plant", "baseline_centroid", p.baseline_centroid);
  c.set("plant", "min_centroid", p.min_centroid);
  c.set("plant", "fatigue_gain", p.fatigue_gain);
  c.set("plant", "recovery_rate", p.recovery_rate);
  c.set("plant", "noise_lo", p.noise_bandwidth[0]);
  c.set("plant", "noise_hi", p.noise_bandwidth[1]);
  c.set("plant", "amplitude", p.amplitude);
  c.set("plant", "sample_rate", p.sample_rate);
  c.set("plant", "seed", std::to_string(p.seed));
}

MvarSpec mvar_spec(const Config& c, MvarSpec spec) {
  if (c.has("mvar", "order")) {
    const long order = c.get_int("mvar", "order", 0);
    if (order < 0) throw ConfigError("mvar.order must be non-negative");
    spec.coeffs.assign(static_cast<std::size_t>(order), Eigen::Matrix2d::Zero());
    for (long k = 1; k <= order; ++k) {
      const std::string key = "a" + std::to_string(k);
      const auto row = c.get("mvar", key);
      if (!row) continue;  // missing lags are zero
      const auto v = numbers(*row, "mvar." + key);
      if (v.size() != 4) throw ConfigError("mvar." + key + " needs four numbers (a11 a12 a21 a22)");
      spec.coeffs[static_cast<std::size_t>(k - 1)] << v[0], v[1], v[2], v[3];
    }
  }
  spec.var1 = c.get_double("mvar", "var1", spec.var1);
  spec.var2 = c.get_double("mvar", "var2", spec.var2);
  return spec;
}

void put(Config& c, const MvarSpec& spec) {
  c.set("mvar", "order", std::to_string(spec.order()));
  for (int k = 1; k <= spec.order(); ++k) {
    const auto& a = spec.coeffs[static_cast<std::size_t>(k - 1)];
    c.set("mvar", "a" + std::to_string(k),
          io::format_double(a(0, 0)) + " " + io::format_double(a(0, 1)) + " " + io::format_double(a(1, 0)) +
              " " + io::format_double(a(1, 1)));
  }
  c.set("mvar", "var1", spec.var1);
  c.set("mvar", "var2", spec.var2);
}

SessionConfig session_config(const Config& c, SessionConfig s) {
  if (const auto m = c.get("session", "mode")) s.mode = parse_mode(*m);
  s.speed = c.get_double("session", "speed", s.speed);
  s.target_running = c.get_double("session", "target_running", s.target_running);
  s.rest_duration = c.get_double("session", "rest_duration", s.rest_duration);
  s.threshold = c.get_double("session", "threshold", s.threshold);
  s.window = c.get_double("session", "window", s.window);
  s.timeout_factor = c.get_double("session", "timeout_factor", s.timeout_factor);
  s.baseline.windows = static_cast<int>(c.get_int("session", "baseline_windows", s.baseline.windows));
  if (const auto r = c.get("session", "baseline_rule")) {
    if (*r == "per-bout")
      s.baseline.rule = BaselineRule::per_bout;
    else if (*r == "first-bout")
      s.baseline.rule = BaselineRule::first_bout_only;
    else
      throw ConfigError("session.baseline_rule must be per-bout or first-bout");
  }
  s.validate();
  return s;
}

void put(Config& c, const SessionConfig& s) {
  c.set("session", "mode", to_string(s.mode));
  c.set("session", "speed", s.speed);
  c.set("session", "target_running", s.target_running);
  c.set("session", "rest_duration", s.rest_duration);
  c.set("session", "threshold", s.threshold);
  c.set("session", "window", s.window);
  c.set("session", "timeout_factor", s.timeout_factor);
  c.set("session", "baseline_windows", std::to_string(s.baseline.windows));
  c.set("session", "baseline_rule", s.baseline.rule == BaselineRule::per_bout ? "per-bout" : "first-bout");
}

PreprocessConfig preprocess_config(const Config& c, PreprocessConfig p) {
  p.target_rate = c.get_double("preprocess", "target_rate", p.target_rate);
  p.band_lo = c.get_double("preprocess", "band_lo", p.band_lo);
  p.band_hi = c.get_double("preprocess", "band_hi", p.band_hi);
  p.notch_lo = c.get_double("preprocess", "notch_lo", p.notch_lo);
  p.notch_hi = c.get_double("preprocess", "notch_hi", p.notch_hi);
  p.order = static_cast<int>(c.get_int("preprocess", "order", p.order));
  return p;
}

dcmc::SessionConfig dcmc_config(const Config& c, dcmc::SessionConfig d) {
  if (const auto o = c.get("dcmc", "order")) {
    if (*o == "auto")
      d.order.reset();
    else
      d.order = static_cast<int>(c.get_int("dcmc", "order", 10));
  }
  d.order_min = static_cast<int>(c.get_int("dcmc", "order_min", d.order_min));
  d.order_max = static_cast<int>(c.get_int("dcmc", "order_max", d.order_max));
  d.trials_per_block = static_cast<int>(c.get_int("dcmc", "trials_per_block", d.trials_per_block));
  d.trial_seconds = c.get_double("dcmc", "trial_seconds", d.trial_seconds);
  d.rectify_emg = c.get_bool("dcmc", "rectify_emg", d.rectify_emg);
  d.reject_artifacts = c.get_bool("dcmc", "reject_artifacts", d.reject_artifacts);
  d.surrogate.n_sim = static_cast<int>(c.get_int("dcmc", "n_sim", d.surrogate.n_sim));
  for (auto& band : d.bands) {
    if (const auto v = c.get("dcmc", band.name)) {
      const auto edges = numbers(*v, "dcmc." + band.name);
      if (edges.size() != 2 || !(edges[0] < edges[1]))
        throw ConfigError("dcmc." + band.name + " needs two increasing edges");
      band.lo = edges[0];
      band.hi = edges[1];
    }
  }
  return d;
}

}  // namespace neuroloop::config
