#pragma once

#include "bcs/bilinear.hpp"

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bcs {

/// Tunables shared by the pipeline stages; scenario files may set any of
/// them, command-line flags override the file.
struct ScenarioDefaults {
  std::uint64_t seed = 24601;
  int grid = 1024;          // star-set angular resolution
  int bins = 720;           // circle-graph bins
  double tau = 0.05;        // reach / graph step
  double tol = 1e-3;        // fixed-point tolerance (Hausdorff per iteration)
  int control_samples = 32;
  int graph_samples = 9;
  double horizon = 200.0;
  int segments = 8;
  int restarts = 12;
  long long budget = 400000;
  double angular_tol = 1e-6;
  int access_grid = 360;
  int access_depth = 6;
  double set_tol = 0.02;     // Hausdorff match against expected sets
  double verify_tol = 0.03;  // verification tolerance
  double verify_tau = 0.025;
  int verify_samples = 64;
  std::vector<double> verify_times{0.25, 0.5, 1.0};
};

/// Optional references a scenario can carry for checked pipeline runs.
struct ExpectedResults {
  struct WitnessCase {
    Eigen::Vector2d seed{0.0, 0.0};
    /// Reference region, one of: polygon boundary loop, or the region under
    /// the log-spiral rho(theta) = exp(spiral_rate * theta).
    std::vector<Eigen::Vector2d> polygon;
    std::optional<double> spiral_rate;
  };
  std::optional<bool> accessible;
  std::optional<double> rate;
  std::optional<double> rate_lower_min;
  std::vector<std::array<double, 2>> arcs;  // radians, [start, end]
  int arc_tol_bins = 2;
  std::vector<WitnessCase> witnesses;
  std::vector<double> union_scales;
};

struct Scenario {
  std::string name;
  BilinearSystem system;
  ScenarioDefaults defaults;
  std::optional<ExpectedResults> expected;
};

/// Raised for unreadable, unparsable or invalid scenario files.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parse and validate a scenario file (JSON). Parse errors carry position
/// information; validation errors name the offending key.
Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(const std::string& text);

/// Emit in the same format; parse -> emit -> parse is the identity.
std::string emit_scenario(const Scenario& s);
void save_scenario(const Scenario& s, const std::filesystem::path& path);

bool operator==(const Scenario& a, const Scenario& b);

}  // namespace bcs
