#include "bcs/commands.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

bcs::Vector parse_point(const std::string& s) {
  std::vector<double> vals;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(std::stod(item));
  bcs::Vector v(Eigen::Index(vals.size()));
  for (size_t i = 0; i < vals.size(); ++i) v(Eigen::Index(i)) = vals[i];
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eigenset computation for bilinear control systems"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir = "out", x0_str = "1,1", control_str = "const:0";
  double sim_t = 1.0;
  int sim_samples = 200;
  bcs::CliOverrides overrides;
  std::uint64_t seed_flag = 0;
  int grid_flag = 0;
  double tau_flag = 0.0, tol_flag = 0.0;
  long long budget_flag = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--scenario", scenario_path, "scenario file (JSON)")->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed_flag, "override scenario seed");
    cmd->add_option("--grid", grid_flag, "override star-set grid size");
    cmd->add_option("--tau", tau_flag, "override reach step");
    cmd->add_option("--tol", tol_flag, "override fixed-point tolerance");
    cmd->add_option("--budget", budget_flag, "override search budget");
  };

  auto* sim = app.add_subcommand("simulate", "write a trajectory CSV");
  add_common(sim);
  sim->add_option("--x0", x0_str, "initial state, comma separated");
  sim->add_option("--control", control_str,
                  "control spec: const:v | pwc:dur@v;... | cyclic:dur@v;...");
  sim->add_option("--t", sim_t, "final time");
  sim->add_option("--samples", sim_samples, "number of CSV sample intervals");

  auto* pipe = app.add_subcommand("pipeline", "run the full analysis pipeline");
  add_common(pipe);

  std::vector<std::string> plot_inputs;
  std::string plot_out = "plot.svg";
  bcs::PlotOptions popts;
  auto* plot = app.add_subcommand("plot", "render radial CSVs as a static SVG");
  plot->add_option("--in", plot_inputs, "radial CSV input(s)")->required();
  plot->add_option("--out", plot_out, "output SVG path");
  plot->add_flag("--axes,!--no-axes", popts.axes, "draw coordinate axes");
  plot->add_flag("--unit-circle", popts.unit_circle, "overlay the unit circle");
  plot->add_flag("--markers,!--no-markers", popts.markers, "draw vertex markers");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sim->count("--seed") || pipe->count("--seed")) overrides.seed = seed_flag;
    if (sim->count("--grid") || pipe->count("--grid")) overrides.grid = grid_flag;
    if (sim->count("--tau") || pipe->count("--tau")) overrides.tau = tau_flag;
    if (sim->count("--tol") || pipe->count("--tol")) overrides.tol = tol_flag;
    if (sim->count("--budget") || pipe->count("--budget")) overrides.budget = budget_flag;

    if (plot->parsed()) {
      std::vector<std::filesystem::path> inputs(plot_inputs.begin(), plot_inputs.end());
      bcs::cmd_plot(inputs, popts, plot_out);
      std::cout << "wrote " << plot_out << "\n";
      return 0;
    }

    const bcs::Scenario sc = bcs::load_scenario(scenario_path);
    std::filesystem::create_directories(out_dir);

    if (sim->parsed()) {
      const auto out_csv = std::filesystem::path(out_dir) / "trajectory.csv";
      bcs::cmd_simulate(sc, parse_point(x0_str),
                        bcs::parse_control_spec(control_str, sc.system.n_controls()), sim_t,
                        sim_samples, out_csv);
      std::cout << "wrote " << out_csv.string() << "\n";
      return 0;
    }

    const auto res = bcs::cmd_pipeline(sc, overrides, out_dir);
    std::cout << res.summary();
    std::cout << (res.ok ? "pipeline OK" : "pipeline FAILED") << "\n";
    return res.ok ? 0 : 1;
  } catch (const bcs::ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
