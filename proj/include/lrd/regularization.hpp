#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lrd {

/// Weights of the regularized objective
///
///   1/2 ||U - S||^2 + gamma/2 ||U||_TV^2 + zeta/2 ||U||_TI^2 + alpha/2 sum ||X||^2
///
/// When per-filter lists are present the TV/TI terms are instead applied to
/// each filter's reconstruction U_m with its own weight:
///   sum_m gamma_m/2 ||U_m||_TV^2 + zeta_m/2 ||U_m||_TI^2.
/// `delta` holds the enhancement gains used when forming S + sum delta_m U_m.
struct RegularizationConfig {
  double gamma = 0.0;
  double zeta = 0.0;
  double alpha = 1e-16;
  std::optional<std::vector<double>> gamma_per_filter;
  std::optional<std::vector<double>> zeta_per_filter;
  std::optional<std::vector<double>> delta;

  bool has_per_filter() const { return gamma_per_filter.has_value() || zeta_per_filter.has_value(); }

  /// Effective TV / TI weight of filter m when per-filter mode is active.
  double gamma_for(std::size_t m) const { return gamma_per_filter ? gamma_per_filter->at(m) : gamma; }
  double zeta_for(std::size_t m) const { return zeta_per_filter ? zeta_per_filter->at(m) : zeta; }

  /// Throws ConfigError on NaN/inf/negative weights, alpha <= 0, or
  /// per-filter lists whose length differs from `filter_count` (when given).
  void validate(std::optional<std::size_t> filter_count = std::nullopt) const;
};

/// The four terms of the objective, on the spatial-domain scale.
struct ObjectiveBreakdown {
  double data = 0.0;
  double tv = 0.0;
  double ti = 0.0;
  double ridge = 0.0;
  double total = 0.0;
};

/// Denoising: zeta = 0 and no per-filter overrides.
RegularizationConfig denoise_preset(double gamma, double alpha = 1e-16);

/// Enhancement: filters 1..split are integral-regularized (gamma_m = 0,
/// zeta_m = zeta) and carry gain delta; filters split+1..M are
/// TV-regularized (gamma_m = gamma, zeta_m = 0) with zero gain.
RegularizationConfig enhance_preset(std::size_t filter_count, double gamma, double zeta,
                                    std::size_t split, double delta = 0.6, double alpha = 1e-16);

// Flat "key = value" text, one pair per line, '#' starts a comment.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);
KeyValues load_key_values(const std::string& path);

/// Reads gamma, zeta, alpha and the comma-separated lists gamma_m, zeta_m,
/// delta_m. Unknown keys are ignored so one file can also carry solver options.
RegularizationConfig config_from_key_values(const KeyValues& kv,
                                            RegularizationConfig base = {});
std::string to_key_value_text(const RegularizationConfig& c);

}  // namespace lrd
