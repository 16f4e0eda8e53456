#pragma once

#include "bcs/matops.hpp"

#include <vector>

namespace bcs {

/// The system datum: drift A, control matrices B_1..B_m and the box of
/// admissible control values. The dynamics are x' = (A + sum u_i B_i) x
/// with u(t) confined to the box.
struct BilinearSystem {
  Matrix a;
  std::vector<Matrix> bs;
  Vector u_lo;
  Vector u_hi;

  BilinearSystem(Matrix a_, std::vector<Matrix> bs_, Vector lo, Vector hi);

  int dim() const { return int(a.rows()); }
  int n_controls() const { return int(bs.size()); }

  bool contains_control(const Vector& u0, double tol = 1e-12) const;

  /// All 2^m corners of the control box, in lexicographic order.
  std::vector<Vector> box_vertices() const;
};

/// Piecewise-constant control signal. Segment j holds values[j] for
/// durations[j] seconds; a cyclic control repeats the segment list forever.
struct PwcControl {
  std::vector<double> durations;
  std::vector<Vector> values;
  bool cyclic = false;

  double total_duration() const;

  /// Constant control of the given value, as a cyclic one-segment signal
  /// (usable at any time).
  static PwcControl constant(const Vector& v, double period = 1.0);

  /// The control s -> u(s + t): the remainder after t seconds. Cyclic
  /// controls rotate their segment list; plain ones lose their prefix.
  PwcControl tail_from(double t) const;

  void check_valid() const;
};

/// The same system with drift shifted to F(u) - r*Id. Its flow equals
/// e^{-tr} times the base flow.
struct ShiftedSystem {
  BilinearSystem base;
  double r = 0.0;
};

/// F(u0) = A + sum u0_i B_i. Throws if u0 lies outside the box.
Matrix drift_matrix(const BilinearSystem& sys, const Vector& u0);
Matrix shifted_drift(const ShiftedSystem& sh, const Vector& u0);

/// Transition matrix of the flow at time t >= 0: the ordered product of
/// the per-segment matrix exponentials. Exact for piecewise-constant
/// controls up to expm accuracy; always invertible.
Matrix flow_matrix(const BilinearSystem& sys, double t, const PwcControl& u);

/// phi(t, x, u) = flow_matrix(t, u) * x.
Vector flow(const BilinearSystem& sys, double t, const Vector& x, const PwcControl& u);

/// Inverse transition: maps y in O_t(x) back to x. This realizes the
/// time -t orbit relation and is used only by diagnostics.
Matrix backward_flow_matrix(const BilinearSystem& sys, double t, const PwcControl& u);

Matrix shifted_flow_matrix(const ShiftedSystem& sh, double t, const PwcControl& u);
Vector shifted_flow(const ShiftedSystem& sh, double t, const Vector& x, const PwcControl& u);

/// x / ||x||. Rejects vectors with norm below 1e-300.
Vector project(const Vector& x);

/// The tangent field induced on the unit sphere by x' = Mx:
/// M x̂ - <x̂, M x̂> x̂. Requires ||xhat|| = 1 within 1e-9.
Vector sphere_field(const Matrix& m, const Vector& xhat);

}  // namespace bcs
