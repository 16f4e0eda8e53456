#include "bcs/commands.hpp"

#include "bcs/accessibility.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bcs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> split_doubles(const std::string& s, char sep) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    if (item.empty()) throw std::invalid_argument("control spec: empty number");
    size_t pos = 0;
    out.push_back(std::stod(item, &pos));
    if (pos != item.size()) throw std::invalid_argument("control spec: bad number '" + item + "'");
  }
  return out;
}

Vector to_vector(const std::vector<double>& v) {
  Vector out(Eigen::Index(v.size()));
  for (size_t i = 0; i < v.size(); ++i) out(Eigen::Index(i)) = v[i];
  return out;
}

}  // namespace

PwcControl parse_control_spec(const std::string& spec, int n_controls) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("control spec: expected 'const:...', 'pwc:...' or 'cyclic:...'");
  const std::string kind = spec.substr(0, colon);
  const std::string body = spec.substr(colon + 1);

  PwcControl u;
  if (kind == "const") {
    const auto vals = split_doubles(body, ',');
    if (int(vals.size()) != n_controls)
      throw std::invalid_argument("control spec: expected " + std::to_string(n_controls) +
                                  " control components");
    return PwcControl::constant(to_vector(vals));
  }
  if (kind != "pwc" && kind != "cyclic")
    throw std::invalid_argument("control spec: unknown kind '" + kind + "'");
  u.cyclic = kind == "cyclic";
  std::stringstream ss(body);
  std::string seg;
  while (std::getline(ss, seg, ';')) {
    const auto at = seg.find('@');
    if (at == std::string::npos)
      throw std::invalid_argument("control spec: segment '" + seg + "' missing '@'");
    const double dur = std::stod(seg.substr(0, at));
    const auto vals = split_doubles(seg.substr(at + 1), ',');
    if (int(vals.size()) != n_controls)
      throw std::invalid_argument("control spec: expected " + std::to_string(n_controls) +
                                  " control components");
    u.durations.push_back(dur);
    u.values.push_back(to_vector(vals));
  }
  u.check_valid();
  return u;
}

ScenarioDefaults apply_overrides(const ScenarioDefaults& d, const CliOverrides& o) {
  ScenarioDefaults out = d;
  if (o.seed) out.seed = *o.seed;
  if (o.grid) out.grid = *o.grid;
  if (o.tau) out.tau = *o.tau;
  if (o.tol) out.tol = *o.tol;
  if (o.budget) out.budget = *o.budget;
  return out;
}

void cmd_simulate(const Scenario& sc, const Vector& x0, const PwcControl& control, double t,
                  int n_samples, const std::filesystem::path& out_csv) {
  if (t < 0.0) throw std::invalid_argument("simulate: negative time");
  std::vector<double> times;
  std::vector<Vector> states;
  if (t == 0.0 || n_samples < 1) {
    times.push_back(0.0);
    states.push_back(x0);
  } else {
    for (int i = 0; i <= n_samples; ++i) {
      const double ti = t * double(i) / n_samples;
      times.push_back(ti);
      states.push_back(flow(sc.system, ti, x0, control));
    }
  }
  write_trajectory_csv(times, states, out_csv);
}

std::string PipelineResult::summary() const {
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  return s;
}

namespace {

StarSet2 spiral_region(double spiral_rate, int n) {
  // region under rho(theta) = exp(spiral_rate * theta), theta in [0, 2*pi)
  StarSet2 s(n);
  for (int k = 0; k < n; ++k) s.set_radius(k, std::exp(spiral_rate * s.theta(k)));
  return s;
}

bool arcs_match(const std::vector<ControlSetArc>& found, const std::array<double, 2>& want,
                double tol) {
  for (const auto& cs : found)
    for (const auto& a : cs.arcs) {
      const double width_want = want[1] - want[0];
      if (width_want >= kTwoPi - 1e-9 && cs.full_circle()) return true;
      double ds = std::fmod(std::abs(a.start - want[0]), kTwoPi);
      ds = std::min(ds, kTwoPi - ds);
      double de = std::fmod(std::abs(a.end - want[1]), kTwoPi);
      de = std::min(de, kTwoPi - de);
      if (ds <= tol && de <= tol) return true;
    }
  return false;
}

}  // namespace

namespace {

PipelineResult run_pipeline(const Scenario& sc, const CliOverrides& overrides,
                            const std::filesystem::path& out_dir) {
  const ScenarioDefaults d = apply_overrides(sc.defaults, overrides);
  std::filesystem::create_directories(out_dir);
  PipelineResult res;
  const auto& exp = sc.expected;

  auto stage = [&](const std::string& name, bool ok, const std::string& detail) {
    res.lines.push_back(std::string(ok ? "PASS  " : "FAIL  ") + name + ": " + detail);
    if (!ok) res.ok = false;
  };
  auto info = [&](const std::string& name, const std::string& detail) {
    res.lines.push_back("INFO  " + name + ": " + detail);
  };

  // accessibility
  AccessibilityReport access;
  try {
    access = check_accessibility(sc.system, d.access_grid, d.access_depth);
    std::ofstream rep(out_dir / "accessibility.txt");
    rep << "verdict: " << (access.verdict ? "accessible (rank condition certified)"
                                          : "hypothesis not certified")
        << "\nbasis_size: " << access.generated_basis_size
        << "\nsaturated: " << (access.basis_saturated ? "yes" : "no")
        << "\nchecked_points: " << access.checked_points.size() << "\n";
    const std::string detail = std::string(access.verdict ? "accessible" : "not certified") +
                               ", basis size " + std::to_string(access.generated_basis_size);
    if (exp && exp->accessible) stage("accessibility", access.verdict == *exp->accessible, detail);
    else info("accessibility", detail);
  } catch (const std::exception& e) {
    stage("accessibility", false, e.what());
    return res;
  }

  if (sc.system.dim() != 2) {
    info("pipeline", "set-valued stages need d = 2; stopping after accessibility");
    return res;
  }

  // invariant control sets on the circle
  std::vector<ControlSetArc> arcs;
  try {
    const auto g = build_reach_graph(sc.system, d.bins, d.tau,
                                     uniform_control_samples(sc.system, d.graph_samples));
    arcs = invariant_control_sets(g);
    write_arcs_csv(arcs, out_dir / "arcs.csv");
    std::string detail = std::to_string(arcs.size()) + " closed class(es)";
    bool ok = !arcs.empty();
    if (exp && !exp->arcs.empty()) {
      const double tol = double(exp->arc_tol_bins) * kTwoPi / d.bins;
      for (const auto& want : exp->arcs)
        if (!arcs_match(arcs, want, tol)) {
          ok = false;
          detail += "; expected arc [" + format_double(want[0]) + ", " + format_double(want[1]) +
                    "] not matched";
        }
    }
    stage("control-sets", ok, detail);
  } catch (const std::exception& e) {
    stage("control-sets", false, e.what());
    return res;
  }

  // growth rate bracket
  RateBracket bracket;
  try {
    SearchOptions sopts;
    sopts.horizon = d.horizon;
    sopts.angular_tol = d.angular_tol;
    sopts.n_segments = d.segments;
    sopts.n_restarts = d.restarts;
    sopts.seed = d.seed;
    sopts.budget = d.budget;

    const ControlSetArc* main_arc = nullptr;
    for (const auto& a : arcs)
      if (!a.degenerate() && (!main_arc || a.total_width() > main_arc->total_width()))
        main_arc = &a;
    if (main_arc) {
      bracket = compute_R(sc.system, *main_arc, sopts);
    } else {
      Vector e1(2);
      e1 << 1.0, 0.0;
      bracket = xi_estimate(sc.system, e1, sopts);
    }

    nlohmann::ordered_json rj;
    rj["lower"] = bracket.lower;
    rj["upper"] = bracket.upper;
    rj["consistent"] = bracket.consistent;
    if (bracket.witness) {
      rj["witness"] = {{"period", bracket.witness->period},
                       {"rate", bracket.witness->rate},
                       {"angular_residual", bracket.witness->angular_residual}};
    }
    std::ofstream(out_dir / "rate.json") << rj.dump(2) << "\n";

    std::string detail = "[" + format_double(bracket.lower) + ", " + format_double(bracket.upper) +
                         "]" + (bracket.consistent ? "" : " (inconsistent per-ray bounds)");
    bool ok = std::isfinite(bracket.lower);
    if (exp && exp->rate)
      ok = ok && bracket.lower <= *exp->rate + 1e-9 && *exp->rate <= bracket.upper + 1e-9;
    if (exp && exp->rate_lower_min) ok = ok && bracket.lower >= *exp->rate_lower_min;
    stage("rate", ok, detail);
  } catch (const std::exception& e) {
    stage("rate", false, e.what());
    return res;
  }

  // eigenset construction + verification
  try {
    double rate_used;
    if (exp && exp->rate) rate_used = *exp->rate;
    else if (bracket.witness) rate_used = bracket.witness->rate;
    else if (std::isfinite(bracket.lower)) rate_used = bracket.lower;
    else rate_used = bracket.upper;

    ReachOptions ropts;
    ropts.step = d.tau;
    ropts.control_samples = uniform_control_samples(sc.system, d.control_samples);

    SearchOptions sopts;
    sopts.horizon = d.horizon;
    sopts.angular_tol = d.angular_tol;
    sopts.n_segments = d.segments;
    sopts.n_restarts = d.restarts;
    sopts.seed = d.seed;
    sopts.budget = d.budget;

    std::vector<StarSet2> constructed;
    std::vector<std::pair<std::string, StarSet2>> plots;
    if (exp && !exp->witnesses.empty()) {
      for (size_t i = 0; i < exp->witnesses.size(); ++i) {
        const auto& wc = exp->witnesses[i];
        Vector seed(2);
        seed << wc.seed.x(), wc.seed.y();
        const auto certs = ray_return_search(sc.system, seed, sopts);
        const RayReturnCertificate* best = nullptr;
        for (const auto& c : certs)
          if (std::abs(c.rate - rate_used) <= 1e-3) {
            best = &c;
            break;
          }
        if (!best) {
          stage("construct[" + std::to_string(i) + "]", false,
                "no rate-matching witness found at the seed ray");
          continue;
        }
        auto built =
            construct_from_witness(sc.system, rate_used, *best, ropts, d.tol, 500, d.grid);
        write_radial_csv(built.d, out_dir / ("d_" + std::to_string(i) + ".csv"));
        std::string detail = "converged in " + std::to_string(built.iterations) + " iterations";
        bool ok = built.converged;
        if (!wc.polygon.empty()) {
          const double dist = hausdorff(built.d, make_polygon(wc.polygon, d.grid));
          ok = ok && dist <= d.set_tol;
          detail += ", Hausdorff to reference " + format_double(dist);
        } else if (wc.spiral_rate) {
          const double dist = hausdorff(built.d, spiral_region(*wc.spiral_rate, d.grid));
          ok = ok && dist <= d.set_tol;
          detail += ", Hausdorff to reference " + format_double(dist);
        }
        stage("construct[" + std::to_string(i) + "]", ok, detail);
        plots.emplace_back("D" + std::to_string(i + 1), built.d);
        constructed.push_back(std::move(built.d));
      }
    } else {
      auto built = construct_general(sc.system, rate_used, ropts, d.tol, 500, d.grid);
      write_radial_csv(built.d, out_dir / "d_0.csv");
      stage("construct[general]", built.converged,
            "converged in " + std::to_string(built.iterations) + " iterations, max radius " +
                format_double(built.d.max_radius()));
      plots.emplace_back("D", built.d);
      constructed.push_back(std::move(built.d));
    }

    if (constructed.empty()) {
      stage("verify", false, "nothing was constructed");
      return res;
    }
    if (!plots.empty()) write_svg_plot(plots, PlotOptions{}, out_dir / "sets.svg");

    StarSet2 target = constructed.front();
    if (exp && !exp->union_scales.empty() && exp->union_scales.size() == constructed.size()) {
      std::vector<std::pair<double, StarSet2>> members;
      for (size_t i = 0; i < constructed.size(); ++i)
        members.emplace_back(exp->union_scales[i], constructed[i]);
      target = union_family(members);
      write_radial_csv(target, out_dir / "union.csv");
    }

    ReachOptions vopts;
    vopts.step = d.verify_tau;
    vopts.control_samples = uniform_control_samples(sc.system, d.verify_samples);
    const auto rep = verify_eigenset(sc.system, target, rate_used, d.verify_times, vopts,
                                     d.verify_tol);
    write_verification_csv(rep, out_dir / "verify.csv");
    stage("verify", rep.pass,
          "max Hausdorff " + format_double(rep.max_distance) + " over " +
              std::to_string(rep.times.size()) + " times at tol " + format_double(d.verify_tol));
  } catch (const std::exception& e) {
    stage("construct/verify", false, e.what());
  }
  return res;
}

}  // namespace

PipelineResult cmd_pipeline(const Scenario& sc, const CliOverrides& overrides,
                            const std::filesystem::path& out_dir) {
  PipelineResult res = run_pipeline(sc, overrides, out_dir);
  std::ofstream(out_dir / "summary.txt") << res.summary();
  return res;
}

void cmd_plot(const std::vector<std::filesystem::path>& radial_csvs, const PlotOptions& opts,
              const std::filesystem::path& out_svg) {
  if (radial_csvs.empty()) throw std::invalid_argument("plot: no input CSVs");
  std::vector<std::pair<std::string, StarSet2>> sets;
  for (const auto& p : radial_csvs) sets.emplace_back(p.stem().string(), read_radial_csv(p));
  write_svg_plot(sets, opts, out_svg);
}

}  // namespace bcs
