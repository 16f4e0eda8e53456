#include "bcs/accessibility.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bcs {

namespace {

Vector flatten(const Matrix& m) {
  Vector v(m.size());
  int idx = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) v(idx++) = m(i, j);
  return v;
}

// Incremental span tracker over flattened matrices (modified Gram-Schmidt
// with a relative acceptance threshold).
class SpanTracker {
 public:
  explicit SpanTracker(double tol) : tol_(tol) {}

  bool try_add(const Matrix& m) {
    Vector v = flatten(m);
    const double n0 = v.norm();
    if (!(n0 > 0.0)) return false;
    for (const auto& q : ortho_) v -= q.dot(v) * q;
    // one re-orthogonalization pass for stability
    for (const auto& q : ortho_) v -= q.dot(v) * q;
    if (v.norm() <= tol_ * n0) return false;
    ortho_.push_back(v / v.norm());
    return true;
  }

  double residual(const Matrix& m) const {
    Vector v = flatten(m);
    const double n0 = v.norm();
    if (!(n0 > 0.0)) return 0.0;
    for (const auto& q : ortho_) v -= q.dot(v) * q;
    return v.norm() / n0;
  }

 private:
  double tol_;
  std::vector<Vector> ortho_;
};

std::vector<Vector> sphere_points(int dim, int grid_size) {
  std::vector<Vector> pts;
  pts.reserve(size_t(grid_size));
  if (dim == 1) {
    for (double s : {1.0, -1.0}) {
      Vector p(1);
      p << s;
      pts.push_back(std::move(p));
    }
    return pts;
  }
  if (dim == 2) {
    for (int k = 0; k < grid_size; ++k) {
      const double th = 2.0 * std::numbers::pi * k / grid_size;
      Vector p(2);
      p << std::cos(th), std::sin(th);
      pts.push_back(std::move(p));
    }
    return pts;
  }
  // d = 3: Fibonacci lattice followed by a few repulsion sweeps.
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < grid_size; ++k) {
    const double z = 1.0 - 2.0 * (k + 0.5) / grid_size;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double th = golden * k;
    Vector p(3);
    p << r * std::cos(th), r * std::sin(th), z;
    pts.push_back(std::move(p));
  }
  for (int sweep = 0; sweep < 20; ++sweep) {
    for (auto& p : pts) {
      Vector force = Vector::Zero(3);
      for (const auto& q : pts) {
        const Vector d = p - q;
        const double n2 = d.squaredNorm();
        if (n2 > 1e-12) force += d / (n2 * std::sqrt(n2));
      }
      p = (p + 1e-3 * force).normalized();
    }
  }
  return pts;
}

}  // namespace

LieBasisResult lie_algebra_basis(const BilinearSystem& sys, int max_depth) {
  if (max_depth < 1) throw std::invalid_argument("lie_algebra_basis: max_depth must be >= 1");
  const double tol = 1e-9;
  SpanTracker span(tol);
  LieBasisResult out;

  for (const auto& v : sys.box_vertices()) {
    Matrix f = drift_matrix(sys, v);
    if (span.try_add(f)) out.basis.push_back(std::move(f));
  }

  const Eigen::Index full = Eigen::Index(sys.dim()) * sys.dim();
  size_t level_begin = 0;
  for (int depth = 2; depth <= max_depth; ++depth) {
    const size_t level_end = out.basis.size();
    if (level_begin == level_end) break;  // previous level added nothing
    for (size_t i = level_begin; i < level_end; ++i) {
      for (size_t j = 0; j < level_end; ++j) {
        Matrix br = lie_bracket(out.basis[i], out.basis[j]);
        if (span.try_add(br)) out.basis.push_back(std::move(br));
        if (Eigen::Index(out.basis.size()) == full) break;
      }
      if (Eigen::Index(out.basis.size()) == full) break;
    }
    level_begin = level_end;
    if (Eigen::Index(out.basis.size()) == full) break;
  }

  // Saturated when every remaining pairwise bracket stays in the span.
  out.saturated = true;
  for (size_t i = 0; i < out.basis.size() && out.saturated; ++i)
    for (size_t j = i + 1; j < out.basis.size(); ++j)
      if (span.residual(lie_bracket(out.basis[i], out.basis[j])) > tol) {
        out.saturated = false;
        break;
      }
  return out;
}

bool larc_at_point(const std::vector<Matrix>& basis, const Vector& xhat, double tol) {
  if (basis.empty()) return false;
  const int d = int(xhat.size());
  std::vector<Vector> fields;
  fields.reserve(basis.size());
  for (const auto& m : basis) fields.push_back(sphere_field(m, xhat));
  return span_rank(fields, tol) == d - 1;
}

AccessibilityReport check_accessibility(const BilinearSystem& sys, int grid_size, int max_depth,
                                        double tol) {
  const int d = sys.dim();
  if (d > 3)
    throw std::invalid_argument("check_accessibility: only d <= 3 is supported");
  if (grid_size < 8) throw std::invalid_argument("check_accessibility: grid_size must be >= 8");

  auto lie = lie_algebra_basis(sys, max_depth);
  AccessibilityReport rep;
  rep.generated_basis_size = int(lie.basis.size());
  rep.basis_saturated = lie.saturated;
  rep.checked_points = sphere_points(d, grid_size);
  rep.verdict = true;
  rep.rank_ok.reserve(rep.checked_points.size());
  for (const auto& p : rep.checked_points) {
    const bool ok = larc_at_point(lie.basis, p, tol);
    rep.rank_ok.push_back(ok);
    if (!ok) rep.verdict = false;
  }
  if (rep.checked_points.empty()) rep.verdict = false;
  return rep;
}

}  // namespace bcs
