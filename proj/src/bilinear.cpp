#include "bcs/bilinear.hpp"

#include <Eigen/LU>

#include <cmath>
#include <stdexcept>
#include <string>

namespace bcs {

namespace {

void require_finite_vec(const Vector& v, const char* who) {
  if (!v.allFinite()) throw std::invalid_argument(std::string(who) + ": non-finite vector");
}

}  // namespace

BilinearSystem::BilinearSystem(Matrix a_, std::vector<Matrix> bs_, Vector lo, Vector hi)
    : a(std::move(a_)), bs(std::move(bs_)), u_lo(std::move(lo)), u_hi(std::move(hi)) {
  if (a.rows() < 1 || a.rows() != a.cols())
    throw std::invalid_argument("BilinearSystem: A must be square, dim >= 1");
  if (!a.allFinite()) throw std::invalid_argument("BilinearSystem: A has non-finite entries");
  if (bs.empty()) throw std::invalid_argument("BilinearSystem: at least one B matrix required");
  for (const auto& b : bs) {
    if (b.rows() != a.rows() || b.cols() != a.cols())
      throw std::invalid_argument("BilinearSystem: B dimension mismatch with A");
    if (!b.allFinite()) throw std::invalid_argument("BilinearSystem: B has non-finite entries");
  }
  const auto m = Eigen::Index(bs.size());
  if (u_lo.size() != m || u_hi.size() != m)
    throw std::invalid_argument("BilinearSystem: control box size must match number of B matrices");
  if (!u_lo.allFinite() || !u_hi.allFinite())
    throw std::invalid_argument("BilinearSystem: control box must be bounded and finite");
  for (Eigen::Index i = 0; i < m; ++i)
    if (u_lo(i) > u_hi(i))
      throw std::invalid_argument("BilinearSystem: empty control box (lo > hi)");
}

bool BilinearSystem::contains_control(const Vector& u0, double tol) const {
  if (u0.size() != Eigen::Index(bs.size())) return false;
  for (Eigen::Index i = 0; i < u0.size(); ++i)
    if (u0(i) < u_lo(i) - tol || u0(i) > u_hi(i) + tol) return false;
  return true;
}

std::vector<Vector> BilinearSystem::box_vertices() const {
  const int m = n_controls();
  std::vector<Vector> out;
  out.reserve(size_t(1) << m);
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    Vector v(m);
    for (int i = 0; i < m; ++i) v(i) = (mask >> i) & 1u ? u_hi(i) : u_lo(i);
    out.push_back(std::move(v));
  }
  return out;
}

double PwcControl::total_duration() const {
  double t = 0.0;
  for (double d : durations) t += d;
  return t;
}

PwcControl PwcControl::constant(const Vector& v, double period) {
  PwcControl u;
  u.durations = {period};
  u.values = {v};
  u.cyclic = true;
  return u;
}

void PwcControl::check_valid() const {
  if (durations.empty() || durations.size() != values.size())
    throw std::invalid_argument("PwcControl: durations/values must be nonempty and equal length");
  for (double d : durations)
    if (!(d > 0.0) || !std::isfinite(d))
      throw std::invalid_argument("PwcControl: durations must be positive and finite");
}

PwcControl PwcControl::tail_from(double t) const {
  check_valid();
  if (t < 0.0) throw std::invalid_argument("PwcControl::tail_from: negative time");
  const double total = total_duration();
  if (cyclic) t = std::fmod(t, total);
  else if (t > total + 1e-12)
    throw std::invalid_argument("PwcControl::tail_from: time exceeds control duration");

  PwcControl out;
  out.cyclic = cyclic;
  double consumed = 0.0;
  size_t k = 0;
  for (; k < durations.size(); ++k) {
    if (consumed + durations[k] > t + 1e-15) break;
    consumed += durations[k];
  }
  if (k == durations.size()) {
    // t landed exactly on the end of the list
    if (cyclic) return *this;
    out.durations = {1e-15};
    out.values = {values.back()};
    return out;
  }
  const double remainder = consumed + durations[k] - t;
  if (remainder > 1e-15) {
    out.durations.push_back(remainder);
    out.values.push_back(values[k]);
  }
  for (size_t j = k + 1; j < durations.size(); ++j) {
    out.durations.push_back(durations[j]);
    out.values.push_back(values[j]);
  }
  if (cyclic) {
    for (size_t j = 0; j <= k && j < durations.size(); ++j) {
      const double d = (j == k) ? durations[k] - remainder : durations[j];
      if (d > 1e-15) {
        out.durations.push_back(d);
        out.values.push_back(values[j]);
      }
    }
  }
  if (out.durations.empty()) {
    out.durations = {1e-15};
    out.values = {values.back()};
  }
  return out;
}

Matrix drift_matrix(const BilinearSystem& sys, const Vector& u0) {
  require_finite_vec(u0, "drift_matrix");
  if (!sys.contains_control(u0))
    throw std::invalid_argument("drift_matrix: control value outside the box");
  Matrix f = sys.a;
  for (size_t i = 0; i < sys.bs.size(); ++i) f += u0(Eigen::Index(i)) * sys.bs[i];
  return f;
}

Matrix shifted_drift(const ShiftedSystem& sh, const Vector& u0) {
  Matrix f = drift_matrix(sh.base, u0);
  f.diagonal().array() -= sh.r;
  return f;
}

namespace {

template <typename DriftFn>
Matrix transition(const BilinearSystem& sys, DriftFn&& drift, double t, const PwcControl& u) {
  if (!std::isfinite(t) || t < 0.0)
    throw std::invalid_argument("flow: time must be finite and >= 0");
  u.check_valid();
  for (const auto& v : u.values)
    if (!sys.contains_control(v))
      throw std::invalid_argument("flow: control value outside the box");
  const double total = u.total_duration();
  if (!u.cyclic && t > total + 1e-12)
    throw std::invalid_argument("flow: time exceeds the duration of a non-cyclic control");
  if (u.cyclic && total > 0.0 && t / total > 1e6)
    throw std::range_error("flow: cyclic control would repeat more than 1e6 times");

  const int n = sys.dim();
  Matrix acc = Matrix::Identity(n, n);
  double done = 0.0;
  size_t k = 0;
  while (t - done > 1e-15) {
    const size_t idx = k % u.durations.size();
    const double dur = std::min(u.durations[idx], t - done);
    acc = expm(drift(u.values[idx]), dur) * acc;
    if (!acc.allFinite())
      throw std::range_error("flow: transition matrix overflowed");
    done += dur;
    ++k;
  }
  return acc;
}

}  // namespace

Matrix flow_matrix(const BilinearSystem& sys, double t, const PwcControl& u) {
  return transition(sys, [&](const Vector& v) { return drift_matrix(sys, v); }, t, u);
}

Vector flow(const BilinearSystem& sys, double t, const Vector& x, const PwcControl& u) {
  if (x.size() != sys.dim()) throw std::invalid_argument("flow: state dimension mismatch");
  require_finite_vec(x, "flow");
  return flow_matrix(sys, t, u) * x;
}

Matrix backward_flow_matrix(const BilinearSystem& sys, double t, const PwcControl& u) {
  return flow_matrix(sys, t, u).inverse();
}

Matrix shifted_flow_matrix(const ShiftedSystem& sh, double t, const PwcControl& u) {
  return transition(sh.base, [&](const Vector& v) { return shifted_drift(sh, v); }, t, u);
}

Vector shifted_flow(const ShiftedSystem& sh, double t, const Vector& x, const PwcControl& u) {
  if (x.size() != sh.base.dim())
    throw std::invalid_argument("shifted_flow: state dimension mismatch");
  require_finite_vec(x, "shifted_flow");
  return shifted_flow_matrix(sh, t, u) * x;
}

Vector project(const Vector& x) {
  const double n = x.norm();
  if (!(n > 1e-300)) throw std::invalid_argument("project: zero vector");
  return x / n;
}

Vector sphere_field(const Matrix& m, const Vector& xhat) {
  if (m.rows() != m.cols() || m.rows() != xhat.size())
    throw std::invalid_argument("sphere_field: dimension mismatch");
  const double n = xhat.norm();
  if (std::abs(n - 1.0) > 1e-9)
    throw std::invalid_argument("sphere_field: input must be a unit vector");
  const Vector mx = m * xhat;
  return mx - xhat.dot(mx) * xhat;
}

}  // namespace bcs
