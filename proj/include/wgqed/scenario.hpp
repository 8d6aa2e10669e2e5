#pragma once

// Declarative scenarios (TOML or JSON): parsing with field-path errors,
// dispatch to the solvers, result files and parameter sweeps.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wgqed/observables.hpp"
#include "wgqed/ww.hpp"

namespace wgqed {

enum class Method { HL, BosonicNumeric, BosonicAnalytic, WW1, WW2, Markovian };

std::string_view to_string(Method m);
Method parse_method(std::string_view s);
EmitterKind method_emitter_kind(Method m);

/// Schema violation; what() starts with the offending field path.
class ScenarioError : public std::invalid_argument {
 public:
  ScenarioError(const std::string& path, const std::string& msg) : std::invalid_argument(path + ": " + msg) {}
};

/// Reals written as numbers or as multiples of pi: "50pi", "5pi/4", "pi/20", "2*pi", "8π".
double parse_real_expr(std::string_view s);

struct WWSettings {
  WWParams params;
  double fit_window = 5.0;
  double krylov_tol = 1e-11;
  /// Run HL methods of the same scenario with gamma replaced by the fitted WW rate.
  bool rescale_hl = false;

  bool operator==(const WWSettings& o) const;
};

struct Scenario {
  std::string name = "scenario";
  ArrayConfig config;
  std::vector<Method> methods;
  /// One symbol per site (0, 1, +, -); a single symbol is repeated on every site.
  std::string initial_state;
  double t_end = 0.0;
  /// 0 selects the default.
  double dt = 0.0;
  /// 0 selects the default.
  double output_interval = 0.0;
  Interpolation interpolation = Interpolation::Cubic;
  LinkConvention link = LinkConvention::WavePropagation;
  WWSettings ww;
  std::vector<std::string> outputs;
  bool save_trajectory = false;

  /// Site symbols with the single-symbol shorthand expanded.
  std::string state() const;
  bool operator==(const Scenario&) const = default;
};

/// Reads a TOML (.toml) or JSON file into a JSON document.
nlohmann::json load_document(const std::filesystem::path& path);
Scenario scenario_from_json(const nlohmann::json& doc, const std::string& default_name = "scenario");
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

struct TimeGrid {
  double dt = 0.0;
  std::size_t stride = 1;
  std::size_t steps = 0;
  double interval() const { return static_cast<double>(stride) * dt; }
  std::size_t samples() const { return steps / stride + 1; }
  std::vector<double> times() const;
};

/// dt defaults to tau12/200 (1e-3 when tau12 = 0); the output stride
/// defaults to the largest divisor of the steps per tau12 with interval <= 0.02.
TimeGrid resolve_grid(const Scenario& s);

struct MethodRun {
  Method method{};
  ScenarioResult result;
  std::size_t steps = 0;
  nlohmann::json diagnostics = nlohmann::json::object();
  std::optional<ProjectedTrajectory> trajectory;
};

/// Single-emitter calibration run on the scenario's WW modes.
GammaFit calibrate_ww(const Scenario& s);

MethodRun run_method(const Scenario& s, Method m, const GammaFit* fit = nullptr);

/// Runs every method, writes <name>_<method>.csv/.json (and .trj when
/// requested) under out_dir; wall-clock lines go to `log`. Returns the
/// written paths.
std::vector<std::filesystem::path> run_scenario(const Scenario& s, const std::filesystem::path& out_dir,
                                                std::ostream& log);

nlohmann::json sidecar_json(const Scenario& s, const MethodRun& run);

/// WGQED_OUT, or "out" when unset.
std::filesystem::path output_root();

struct SweepAxis {
  std::string key;  ///< dotted path, e.g. array.gamma_tau12
  std::vector<nlohmann::json> values;
};

/// "key=v1,v2,..."; values parse as JSON literals when possible, else strings.
SweepAxis parse_vary(const std::string& arg);

/// Cartesian product of the axes applied to the template document.
std::vector<nlohmann::json> expand_sweep(const nlohmann::json& tmpl, const std::vector<SweepAxis>& axes);

/// Runs the sweep on `jobs` worker threads and writes <name>_sweep.csv (long
/// format) and <name>_summary.csv. Outputs are independent of `jobs`.
std::vector<std::filesystem::path> run_sweep(const nlohmann::json& tmpl, const std::vector<SweepAxis>& axes,
                                             const std::filesystem::path& out_dir, unsigned jobs, std::ostream& log,
                                             const std::string& default_name = "sweep");

}  // namespace wgqed
