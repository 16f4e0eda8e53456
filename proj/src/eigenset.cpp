#include "bcs/eigenset.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bcs {

namespace {

constexpr double kNontrivialityFloor = 1e-6;

double max_radial_gap(const StarSet2& a, const StarSet2& b) {
  double g = 0.0;
  for (int k = 0; k < a.n_angles(); ++k) g = std::max(g, std::abs(a.radius(k) - b.radius(k)));
  return g;
}

// Transition maps at the base step plus power-of-two multiples of it.
// Union iterations converge to the same orbit closure, but the long maps
// sweep through the slow zones near attracting rays (where one base step
// advances less than a grid bin) and land on the limit rays themselves.
std::vector<Eigen::Matrix2d> union_maps(const ShiftedSystem& sh, const ReachOptions& opts) {
  double fmax = 0.0;
  for (const auto& v : sh.base.box_vertices())
    fmax = std::max(fmax, operator_norm(shifted_drift(sh, v)));
  std::vector<Eigen::Matrix2d> maps;
  for (double t = opts.step; t <= 16.0 + 1e-12; t *= 2.0) {
    if (t * fmax > 500.0) break;  // expm overflow guard
    ReachOptions o = opts;
    o.step = t;
    size_t added = 0;
    for (const auto& map : reach_maps(sh, o)) {
      // keep only maps the singular-map guard of linear_image accepts
      Eigen::JacobiSVD<Eigen::Matrix2d> svd(map);
      if (svd.singularValues()(0) * svd.singularValues()(1) > 1e-11) {
        maps.push_back(map);
        ++added;
      }
    }
    if (added == 0) break;
  }
  return maps;
}

}  // namespace

EigensetResult construct_from_witness(const BilinearSystem& sys, double rate,
                                      const RayReturnCertificate& witness,
                                      const ReachOptions& opts, double tol, int max_iter,
                                      int n_angles) {
  if (std::abs(witness.rate - rate) > 1e-3)
    throw std::invalid_argument(
        "construct_from_witness: witness rate differs from R by more than 1e-3");
  if (witness.x.size() != 2 || sys.dim() != 2)
    throw std::invalid_argument("construct_from_witness: set construction needs d = 2");

  const ShiftedSystem shifted{sys, rate};
  const auto maps = union_maps(shifted, opts);

  EigensetResult out{make_segment({witness.x(0), witness.x(1)}, n_angles), rate,
                     EigensetResult::Construction::witness};
  StarSet2 prev = out.d;
  for (out.iterations = 1; out.iterations <= max_iter; ++out.iterations) {
    StarSet2 next = set_union(out.d, reach_step_maps(out.d, maps, opts.refine));
    const double inc = max_radial_gap(next, out.d);
    prev = std::move(out.d);
    out.d = std::move(next);
    if (out.d.max_radius() > 1e6)
      throw std::range_error("construct_from_witness: iterates blew up; R is likely below the "
                             "true growth rate");
    if (inc < tol) {
      out.converged = true;
      break;
    }
  }
  out.final_increment = hausdorff(out.d, prev);
  if (out.d.max_radius() < kNontrivialityFloor)
    throw std::runtime_error("construct_from_witness: degenerate collapse below the "
                             "nontriviality floor");
  return out;
}

EigensetResult construct_general(const BilinearSystem& sys, double rate, const ReachOptions& opts,
                                 double tol, int max_iter, int n_angles, double blowup_guard) {
  if (sys.dim() != 2)
    throw std::invalid_argument("construct_general: set construction needs d = 2");
  const ShiftedSystem shifted{sys, rate};
  const auto hull_maps = union_maps(shifted, opts);
  const auto maps = reach_maps(shifted, opts);

  EigensetResult out{make_ball(n_angles), rate, EigensetResult::Construction::general};

  // Phase 1: invariant hull D0 = closure of the forward orbit of the ball.
  for (; out.iterations <= max_iter; ++out.iterations) {
    StarSet2 next = set_union(out.d, reach_step_maps(out.d, hull_maps, opts.refine));
    const double inc = max_radial_gap(next, out.d);
    out.d = std::move(next);
    if (out.d.max_radius() > blowup_guard)
      throw std::range_error("construct_general: phase-1 blow-up; R is likely an under-estimate");
    if (inc < tol) break;
  }
  if (out.iterations > max_iter) {
    out.converged = false;
    out.final_increment = std::numeric_limits<double>::infinity();
    return out;
  }

  // Phase 2: descend through the exact-time orbits of the invariant hull.
  StarSet2 prev = out.d;
  bool phase2_done = false;
  for (; out.iterations <= max_iter; ++out.iterations) {
    StarSet2 next = reach_step_maps(out.d, maps, opts.refine);
    const double inc = max_radial_gap(next, out.d);
    prev = std::move(out.d);
    out.d = std::move(next);
    if (out.d.max_radius() < kNontrivialityFloor)
      throw std::runtime_error("construct_general: iterates collapsed below the nontriviality "
                               "floor; R is likely an over-estimate");
    if (inc < tol) {
      phase2_done = true;
      break;
    }
  }
  out.converged = phase2_done;
  out.final_increment = hausdorff(out.d, prev);
  return out;
}

VerificationReport verify_eigenset(const BilinearSystem& sys, const StarSet2& d, double rate,
                                   const std::vector<double>& times, const ReachOptions& opts,
                                   double tol, int grid_factor) {
  if (times.empty()) throw std::invalid_argument("verify_eigenset: no times given");
  std::vector<long> steps;
  steps.reserve(times.size());
  for (double t : times) {
    if (!(t > 0.0)) throw std::invalid_argument("verify_eigenset: times must be positive");
    const double k = t / opts.step;
    if (std::abs(k - std::round(k)) > 1e-9)
      throw std::invalid_argument("verify_eigenset: times must be multiples of the reach step");
    steps.push_back(long(std::llround(k)));
  }
  std::vector<size_t> order(times.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return steps[a] < steps[b]; });

  const auto maps = reach_maps(sys, opts);
  VerificationReport rep;
  rep.times = times;
  rep.distances.assign(times.size(), 0.0);
  rep.note =
      "reach side is an inner approximation: containment in e^{tR}D is the hard check, "
      "coverage of e^{tR}D is sampled through reachable boundary points";

  const StarSet2 fine = upsample(d, grid_factor);
  StarSet2 w = fine;
  long done = 0;
  for (size_t idx : order) {
    for (; done < steps[idx]; ++done) w = reach_step_maps(w, maps, opts.refine);
    rep.distances[idx] = hausdorff(w, scale(fine, std::exp(times[idx] * rate)));
  }
  rep.max_distance = *std::max_element(rep.distances.begin(), rep.distances.end());
  rep.pass = rep.max_distance <= tol;
  return rep;
}

StarSet2 union_family(const std::vector<std::pair<double, StarSet2>>& members) {
  if (members.empty()) throw std::invalid_argument("union_family: no members");
  StarSet2 out = scale(members.front().second, members.front().first);
  for (size_t i = 1; i < members.size(); ++i)
    out = set_union(out, scale(members[i].second, members[i].first));
  return out;
}

}  // namespace bcs
