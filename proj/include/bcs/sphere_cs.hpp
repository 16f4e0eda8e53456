#pragma once

#include "bcs/bilinear.hpp"

#include <Eigen/Core>

#include <vector>

namespace bcs {

/// Directed graph over angular bins of the circle: bin i -> bin j iff some
/// sampled constant control maps part of bin i into bin j in time tau.
struct ReachGraph {
  int n_bins = 0;
  double tau = 0.0;
  std::vector<std::vector<int>> edges;  // sorted, unique targets per bin
};

struct AngularInterval {
  double start = 0.0;  // in [0, 2*pi)
  double end = 0.0;    // ccw endpoint; end - start = width, may pass 2*pi
  double width() const { return end - start; }
};

/// A closed communicating class of the reach graph, as angular arcs.
struct ControlSetArc {
  std::vector<AngularInterval> arcs;
  bool invariant = false;
  int n_bins = 0;

  double total_width() const;
  bool full_circle() const;
  /// Degenerate classes (at most 2 bins wide) are candidate equilibrium
  /// rays rather than genuine invariant control sets.
  bool degenerate() const;
};

/// Propagates each bin's endpoints and midpoint under
/// project(expm(F(u0) * tau)) for every sampled u0 and records the swept
/// angular interval (the circle maps are monotone, so the image of a bin
/// is the arc between its endpoint images).
ReachGraph build_reach_graph(const BilinearSystem& sys, int n_bins, double tau,
                             const std::vector<Vector>& control_samples);

/// Closed communicating classes (strongly connected components with no
/// outgoing edges) as angular arcs, sorted by start angle. Always nonempty
/// for a finite graph. Classes of width <= 2 bins are flagged degenerate.
std::vector<ControlSetArc> invariant_control_sets(const ReachGraph& g);

/// Midpoint direction of the arc's widest interval. Full circle returns
/// (1, 0) by convention; degenerate arcs are rejected.
Eigen::Vector2d interior_ray(const ControlSetArc& arc);

}  // namespace bcs
