#pragma once

// Run configuration for the qkdrate tool: built-in figure presets, strict JSON
// loading, and command-line overrides.

#include "qkdrate/optimize.hpp"
#include "qkdrate/rates.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qkdrate::cli {

/// Invalid configuration. field() names the offending key ("budget.eps_pe").
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

enum class Spacing { Linear, Log };

/// Either explicit values or start/stop/count with a spacing.
struct GridSpec {
  std::vector<double> values;
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 0;
  Spacing spacing = Spacing::Linear;

  std::vector<double> points() const;
};

struct RunConfig {
  Environment env{ChannelModel{0.2, 10.0}, SecurityBudget{}, 1.0, DeltaVariant::MainText, {}};
  double block_size = 1e8;
  double qber = 0.03;
  double estimation_fraction = 0.01;
  /// Unset: the command decides (rate evaluates at estimation_fraction,
  /// sweeps and thresholds optimize).
  std::optional<bool> optimize_f;
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  bool asymptotic = false;
  std::optional<GridSpec> grid;
  int grid_resolution = 2000;
  bool general_diagonal_sigma = false;
  int simplex_resolution = 24;
  std::optional<std::string> output;
  unsigned workers = 1;
};

inline constexpr std::string_view kPresetNames[] = {"fig1", "fig2", "fig3", "fig4"};

/// Figure parameters: d = 10 km, a = 0.2 dB/km, every eps = 1e-10, gamma = 1,
/// Hoeffding delta with the 1/(2m) normalization.
///   fig1: rate vs N at QBER 3%     fig2: rate vs N at QBER 6%
///   fig3: rate vs QBER at N = 1e5  fig4: rate vs QBER, N -> infinity
RunConfig preset(std::string_view name);

/// Applies a JSON document on top of cfg. Unknown keys and wrongly typed or
/// out-of-range values throw ConfigError.
void apply_json(RunConfig& cfg, const nlohmann::json& doc);

/// Parses text as JSON and applies it. Malformed JSON throws ConfigError.
void apply_json_text(RunConfig& cfg, std::string_view text);

/// Checks the fields shared by every command.
void validate(const RunConfig& cfg);

}  // namespace qkdrate::cli
