#pragma once

#include "bcs/bilinear.hpp"

#include <vector>

namespace bcs {

struct LieBasisResult {
  std::vector<Matrix> basis;
  /// True when the basis stopped growing before max_depth (brackets close
  /// on the span up to tolerance).
  bool saturated = false;
};

/// Linearly independent spanning set of the matrix Lie algebra generated
/// by the vertex drifts {F(v) : v corner of the box}, under iterated
/// brackets up to max_depth.
LieBasisResult lie_algebra_basis(const BilinearSystem& sys, int max_depth);

/// Rank condition at a point of the sphere: the projected basis fields
/// must span the tangent space (rank d-1).
bool larc_at_point(const std::vector<Matrix>& basis, const Vector& xhat, double tol = 1e-9);

struct AccessibilityReport {
  std::vector<Vector> checked_points;
  std::vector<bool> rank_ok;
  int generated_basis_size = 0;
  bool basis_saturated = false;
  /// True iff the rank condition holds at every checked point. A false
  /// verdict means the hypothesis is not certified, not that the system
  /// is inaccessible.
  bool verdict = false;
};

/// Sweeps the rank condition over a uniform angular grid (d = 2) or a
/// repulsion-spread point set (d = 3). d > 3 is rejected.
AccessibilityReport check_accessibility(const BilinearSystem& sys, int grid_size,
                                        int max_depth = 6, double tol = 1e-9);

}  // namespace bcs
