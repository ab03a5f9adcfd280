#include "lrd/regularization.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "lrd/error.hpp"

namespace lrd {

namespace {

void check_weight(const std::string& name, double v) {
  if (!std::isfinite(v) || v < 0.0) {
    throw ConfigError(name + " must be finite and >= 0, got " + std::to_string(v));
  }
}

void check_list(const std::string& name, const std::optional<std::vector<double>>& list,
                std::optional<std::size_t> filter_count) {
  if (!list) return;
  if (filter_count && list->size() != *filter_count) {
    throw ConfigError(name + " has " + std::to_string(list->size()) + " entries, expected " +
                      std::to_string(*filter_count));
  }
  for (std::size_t m = 0; m < list->size(); ++m) check_weight(name + "[" + std::to_string(m) + "]", (*list)[m]);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("cannot parse value '" + text + "' of key '" + key + "' as a number");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t k = 0; k < v.size(); ++k) os << (k ? "," : "") << v[k];
  return os.str();
}

}  // namespace

void RegularizationConfig::validate(std::optional<std::size_t> filter_count) const {
  check_weight("gamma", gamma);
  check_weight("zeta", zeta);
  if (!std::isfinite(alpha) || alpha <= 0.0) {
    throw ConfigError("alpha must be finite and > 0, got " + std::to_string(alpha));
  }
  check_list("gamma_m", gamma_per_filter, filter_count);
  check_list("zeta_m", zeta_per_filter, filter_count);
  check_list("delta_m", delta, filter_count);
  if (gamma_per_filter && zeta_per_filter && gamma_per_filter->size() != zeta_per_filter->size()) {
    throw ConfigError("gamma_m and zeta_m lists differ in length");
  }
}

RegularizationConfig denoise_preset(double gamma, double alpha) {
  RegularizationConfig c;
  c.gamma = gamma;
  c.zeta = 0.0;
  c.alpha = alpha;
  c.validate();
  return c;
}

RegularizationConfig enhance_preset(std::size_t filter_count, double gamma, double zeta,
                                    std::size_t split, double delta, double alpha) {
  if (split < 1 || split > filter_count) {
    throw ConfigError("split " + std::to_string(split) + " out of range 1.." +
                      std::to_string(filter_count));
  }
  RegularizationConfig c;
  c.gamma = gamma;
  c.zeta = zeta;
  c.alpha = alpha;
  c.gamma_per_filter.emplace(filter_count, gamma);
  c.zeta_per_filter.emplace(filter_count, 0.0);
  c.delta.emplace(filter_count, 0.0);
  for (std::size_t m = 0; m < split; ++m) {
    (*c.gamma_per_filter)[m] = 0.0;
    (*c.zeta_per_filter)[m] = zeta;
    (*c.delta)[m] = delta;
  }
  c.validate(filter_count);
  return c;
}

KeyValues parse_key_values(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

KeyValues load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_key_values(ss.str());
}

RegularizationConfig config_from_key_values(const KeyValues& kv, RegularizationConfig base) {
  if (auto it = kv.find("gamma"); it != kv.end()) base.gamma = parse_double(it->first, it->second);
  if (auto it = kv.find("zeta"); it != kv.end()) base.zeta = parse_double(it->first, it->second);
  if (auto it = kv.find("alpha"); it != kv.end()) base.alpha = parse_double(it->first, it->second);
  if (auto it = kv.find("gamma_m"); it != kv.end()) base.gamma_per_filter = parse_list(it->first, it->second);
  if (auto it = kv.find("zeta_m"); it != kv.end()) base.zeta_per_filter = parse_list(it->first, it->second);
  if (auto it = kv.find("delta_m"); it != kv.end()) base.delta = parse_list(it->first, it->second);
  base.validate();
  return base;
}

std::string to_key_value_text(const RegularizationConfig& c) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "gamma = " << c.gamma << '\n';
  os << "zeta = " << c.zeta << '\n';
  os << "alpha = " << c.alpha << '\n';
  if (c.gamma_per_filter) os << "gamma_m = " << format_list(*c.gamma_per_filter) << '\n';
  if (c.zeta_per_filter) os << "zeta_m = " << format_list(*c.zeta_per_filter) << '\n';
  if (c.delta) os << "delta_m = " << format_list(*c.delta) << '\n';
  return os.str();
}

}  // namespace lrd
