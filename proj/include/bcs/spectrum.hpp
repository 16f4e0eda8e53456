#pragma once

#include "bcs/bilinear.hpp"
#include "bcs/sphere_cs.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace bcs {

/// Approximate witness that the rate belongs to S_x: a cyclic control whose
/// trajectory returns to the ray of x after `period` seconds with log-gain
/// rate * period, up to angular_residual radians of misalignment.
struct RayReturnCertificate {
  Vector x;
  PwcControl control;  // cyclic
  double period = 0.0;
  double rate = 0.0;
  double angular_residual = 0.0;
};

/// Certified interval around a growth rate. lower comes from the best
/// witness found (or -infinity when there is none); upper from the
/// logarithmic-norm bound.
struct RateBracket {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  std::optional<RayReturnCertificate> witness;
  /// compute_R sets this false when per-ray lower bounds disagree beyond
  /// tolerance (diagnostic only).
  bool consistent = true;
};

struct SearchOptions {
  double horizon = 200.0;
  double angular_tol = 1e-6;
  int n_segments = 8;
  int n_restarts = 12;
  double min_duration = 1e-3;
  std::uint64_t seed = 0x5eedULL;
  /// Budget in single-trajectory evaluations; the search stops starting new
  /// work once it is exhausted.
  long long budget = 400000;
};

/// max over box vertices v of lognorm2(F(v)). A valid upper bound for the
/// growth rate of every trajectory (the logarithmic norm is convex over
/// the box, so the vertex max dominates).
double xi_upper_bound(const BilinearSystem& sys);

/// Searches cyclic bang-bang controls (values at box vertices, switching
/// durations tuned by coordinate descent with the closing segment solved by
/// line search) for trajectories returning to the ray of x within
/// angular_tol before the horizon. Returns all witnesses found, sorted by
/// rate descending. Deterministic under the option seed.
std::vector<RayReturnCertificate> ray_return_search(const BilinearSystem& sys, const Vector& x,
                                                    const SearchOptions& opts);

/// Bracket for xi(x): lower from the best witness (minus a Lipschitz
/// allowance for the angular residual), upper from xi_upper_bound.
RateBracket xi_estimate(const BilinearSystem& sys, const Vector& x, const SearchOptions& opts);

/// Runs xi_estimate on several interior rays of an invariant control set
/// arc and merges the brackets. The per-ray lower bounds must agree in the
/// limit; disagreement beyond 0.05 flags the bracket inconsistent.
RateBracket compute_R(const BilinearSystem& sys, const ControlSetArc& ics_arc,
                      const SearchOptions& opts);

}  // namespace bcs
