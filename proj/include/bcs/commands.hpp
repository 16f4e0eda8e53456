#pragma once

#include "bcs/emit.hpp"
#include "bcs/scenario.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bcs {

/// "const:v1[,v2...]" or "pwc:dur@v1[,v2...];dur@..." or "cyclic:dur@v;...".
PwcControl parse_control_spec(const std::string& spec, int n_controls);

/// Flag overrides for the scenario defaults (flag wins over file).
struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<double> tau;
  std::optional<double> tol;
  std::optional<long long> budget;
};

ScenarioDefaults apply_overrides(const ScenarioDefaults& d, const CliOverrides& o);

/// Samples the trajectory from x0 under the given control at n_samples+1
/// evenly spaced times in [0, t] and writes the trajectory CSV.
void cmd_simulate(const Scenario& sc, const Vector& x0, const PwcControl& control, double t,
                  int n_samples, const std::filesystem::path& out_csv);

struct PipelineResult {
  bool ok = true;
  std::vector<std::string> lines;  // one line per stage
  std::string summary() const;
};

/// Runs accessibility -> invariant control sets -> rate bracket ->
/// construction -> verification on a scenario, writing every artifact under
/// out_dir. Stage checks come from the scenario's expected block; the
/// result is not ok when any declared check fails.
PipelineResult cmd_pipeline(const Scenario& sc, const CliOverrides& overrides,
                            const std::filesystem::path& out_dir);

/// Overlay plot of one or more radial CSVs as a static SVG.
void cmd_plot(const std::vector<std::filesystem::path>& radial_csvs, const PlotOptions& opts,
              const std::filesystem::path& out_svg);

}  // namespace bcs
