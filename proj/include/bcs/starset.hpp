#pragma once

#include "bcs/bilinear.hpp"

#include <Eigen/Core>

#include <vector>

namespace bcs {

/// Compact star-shaped subset of the plane, centered at the origin and
/// represented by a radial function on the uniform angular grid
/// theta_k = 2*pi*k/n. Radius 0 means the set meets that ray only at the
/// origin. The represented set is the star polygon whose boundary is the
/// closed polyline through the vertices rho_k * (cos theta_k, sin theta_k);
/// it is [0,1]-scaling-closed by construction.
class StarSet2 {
 public:
  StarSet2(int n_angles, std::vector<double> radii);
  explicit StarSet2(int n_angles);  // all radii zero

  int n_angles() const { return n_; }
  double bin_width() const;
  double theta(int k) const;
  const std::vector<double>& radii() const { return radii_; }
  double radius(int k) const { return radii_[size_t(k)]; }
  void set_radius(int k, double rho);

  Eigen::Vector2d vertex(int k) const;
  double max_radius() const;

  /// Index of the grid direction nearest to the given angle.
  int nearest_bin(double angle) const;

  /// Radial function of the represented polygon at an arbitrary angle
  /// (exact ray/boundary intersection).
  double radial_at(double angle) const;

  /// Euclidean distance from a point to the represented set (0 inside).
  double distance_to(const Eigen::Vector2d& p) const;

 private:
  int n_;
  std::vector<double> radii_;
};

StarSet2 make_ball(int n);
StarSet2 make_segment(const Eigen::Vector2d& x, int n);
StarSet2 make_sector(double theta1, double theta2, double radius, int n);

/// Star polygon through the given boundary loop (consecutive vertices are
/// joined by chords; rays missing the loop get radius 0).
StarSet2 make_polygon(const std::vector<Eigen::Vector2d>& loop, int n);

/// Image T*S of a star set under an invertible linear map, re-binned onto
/// the angular grid: mapped boundary chords are intersected with every grid
/// ray they subtend (per-bin max). Vertices whose rays no chord arc covers
/// (mapped spikes) are projected onto their bracketing rays, so a mapped
/// segment stays a segment up to one bin of smear. refine subdivides each
/// chord before the arc fill.
StarSet2 linear_image(const StarSet2& s, const Eigen::Matrix2d& t, int refine = 4);

/// Pointwise max of radii. Grids must match. (Named set_union because
/// `union` is reserved.)
StarSet2 set_union(const StarSet2& s1, const StarSet2& s2);

StarSet2 scale(const StarSet2& s, double alpha);

/// The same polygon resampled on a grid refined by the given factor (new
/// rays take exact ray/boundary intersections; no information is added).
StarSet2 upsample(const StarSet2& s, int factor);

/// Symmetric Hausdorff distance between the represented compact sets,
/// computed from the boundary polylines; exact to within one grid cell's
/// chord length.
double hausdorff(const StarSet2& s1, const StarSet2& s2);

/// One-sided check: every represented point of s1 within tol of s2.
bool is_subset_tol(const StarSet2& s1, const StarSet2& s2, double tol);

/// Options for one-step reachable-set propagation.
struct ReachOptions {
  double step = 0.05;
  std::vector<Vector> control_samples;
  int refine = 4;
};

/// Uniform grid of control values over the box, per_axis points per
/// coordinate (the full product grid for m > 1).
std::vector<Vector> uniform_control_samples(const BilinearSystem& sys, int per_axis);

/// Exact-time-tau orbit approximation: union over the sampled constant
/// controls u0 of linear_image(S, expm(F(u0) * tau)). An inner
/// approximation of O_tau(S) that refines monotonically with the samples.
StarSet2 reach_step(const BilinearSystem& sys, const StarSet2& s, const ReachOptions& opts);
StarSet2 reach_step(const ShiftedSystem& sh, const StarSet2& s, const ReachOptions& opts);

/// reach_step with the per-control transition matrices precomputed
/// (the iteration workhorse).
StarSet2 reach_step_maps(const StarSet2& s, const std::vector<Eigen::Matrix2d>& maps, int refine);

/// The per-control transition matrices used by reach_step.
std::vector<Eigen::Matrix2d> reach_maps(const BilinearSystem& sys, const ReachOptions& opts);
std::vector<Eigen::Matrix2d> reach_maps(const ShiftedSystem& sh, const ReachOptions& opts);

}  // namespace bcs
