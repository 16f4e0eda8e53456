#include "bcs/starset.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bcs {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_2pi(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a;
}

double wrap_pm_pi(double a) {
  a = std::fmod(a, kTwoPi);
  if (a <= -std::numbers::pi) a += kTwoPi;
  if (a > std::numbers::pi) a -= kTwoPi;
  return a;
}

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Distance from the ray at angle `ang` to the chord a->b, or -1 when the
// ray misses the chord.
double ray_chord_radius(double ang, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const Eigen::Vector2d d(std::cos(ang), std::sin(ang));
  const double ca = cross2(d, a);
  const double cb = cross2(d, b);
  const double denom = ca - cb;
  if (std::abs(denom) < 1e-300) {
    // chord parallel to the ray direction; endpoints handle it
    const double ra = a.dot(d), rb = b.dot(d);
    if (std::abs(ca) < 1e-12 * (1.0 + a.norm() + b.norm()))
      return std::max(std::max(ra, rb), 0.0);
    return -1.0;
  }
  const double s = ca / denom;
  if (s < -1e-8 || s > 1.0 + 1e-8) return -1.0;
  const Eigen::Vector2d p = a + std::clamp(s, 0.0, 1.0) * (b - a);
  const double r = p.dot(d);
  return r >= 0.0 ? r : -1.0;
}

double point_segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                              const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 < 1e-300) return (p - a).norm();
  const double s = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + s * ab)).norm();
}

}  // namespace

StarSet2::StarSet2(int n_angles, std::vector<double> radii)
    : n_(n_angles), radii_(std::move(radii)) {
  if (n_ < 4) throw std::invalid_argument("StarSet2: need at least 4 grid angles");
  if (radii_.size() != size_t(n_))
    throw std::invalid_argument("StarSet2: radii size must equal n_angles");
  for (double r : radii_)
    if (!(r >= 0.0) || !std::isfinite(r))
      throw std::invalid_argument("StarSet2: radii must be finite and >= 0");
}

StarSet2::StarSet2(int n_angles) : StarSet2(n_angles, std::vector<double>(size_t(n_angles), 0.0)) {}

double StarSet2::bin_width() const { return kTwoPi / n_; }

double StarSet2::theta(int k) const { return kTwoPi * k / n_; }

void StarSet2::set_radius(int k, double rho) {
  if (!(rho >= 0.0) || !std::isfinite(rho))
    throw std::invalid_argument("StarSet2: radius must be finite and >= 0");
  radii_[size_t(k)] = rho;
}

Eigen::Vector2d StarSet2::vertex(int k) const {
  const double th = theta(k);
  return radii_[size_t(k)] * Eigen::Vector2d(std::cos(th), std::sin(th));
}

double StarSet2::max_radius() const {
  double m = 0.0;
  for (double r : radii_) m = std::max(m, r);
  return m;
}

int StarSet2::nearest_bin(double angle) const {
  const double w = bin_width();
  long k = std::lround(wrap_2pi(angle) / w);
  k %= n_;
  if (k < 0) k += n_;
  return int(k);
}

double StarSet2::radial_at(double angle) const {
  const double a = wrap_2pi(angle);
  const double w = bin_width();
  int k = int(a / w);
  if (k >= n_) k = n_ - 1;
  const int k1 = (k + 1) % n_;
  const double ra = radii_[size_t(k)], rb = radii_[size_t(k1)];
  if (ra <= 0.0 && rb <= 0.0) return 0.0;
  const double r = ray_chord_radius(a, vertex(k), vertex(k1));
  return r > 0.0 ? r : 0.0;
}

double StarSet2::distance_to(const Eigen::Vector2d& p) const {
  const double pn = p.norm();
  if (pn < 1e-300) return 0.0;  // origin always belongs to a star set
  const double ang = std::atan2(p.y(), p.x());
  if (pn <= radial_at(ang) + 1e-12) return 0.0;
  double best = pn;  // the origin is a member
  for (int k = 0; k < n_; ++k) {
    const int k1 = (k + 1) % n_;
    if (radii_[size_t(k)] <= 0.0 && radii_[size_t(k1)] <= 0.0) continue;
    best = std::min(best, point_segment_distance(p, vertex(k), vertex(k1)));
  }
  return best;
}

namespace {

// Shared rasterizer: deposit the closed boundary loop into the radial grid.
// Pass 1 intersects every grid ray inside a chord's angular span with that
// chord (exact values). Pass 2 handles vertices whose bracketing rays no
// adjacent arc reached (spikes and near-radial chords subtend no arc): they
// get the vertex radius projected onto the bracketing rays. Covered rays
// never take vertex deposits, so iterated re-binning does not inflate radii.
void rasterize_loop(const std::vector<Eigen::Vector2d>& loop, int n, int refine,
                    std::vector<double>& out) {
  const double w = kTwoPi / n;

  // enumeration window [k0, k1] of grid rays subtended by the chord a->b,
  // or nothing when the chord spans no arc
  struct RayRange {
    long k0 = 0, k1 = -1;
  };
  const auto arc_range = [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) -> RayRange {
    RayRange r;
    if (a.norm() < 1e-300 || b.norm() < 1e-300) return r;
    const double alpha = std::atan2(a.y(), a.x());
    const double delta = wrap_pm_pi(std::atan2(b.y(), b.x()) - alpha);
    if (delta == 0.0) return r;
    const double lo = std::min(0.0, delta), hi = std::max(0.0, delta);
    // pull in rays a hair past the ends so a vertex sitting on a grid ray
    // is still claimed when rounding noise nudges it across
    r.k0 = long(std::ceil((wrap_2pi(alpha) + lo) / w - 1e-9));
    r.k1 = long(std::floor((wrap_2pi(alpha) + hi) / w + 1e-9));
    return r;
  };
  const auto fill_arc = [&](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    const RayRange r = arc_range(a, b);
    for (long k = r.k0; k <= r.k1; ++k) {
      long kk = k % n;
      if (kk < 0) kk += n;
      const double rad = ray_chord_radius(k * w, a, b);
      if (rad > 0.0) out[size_t(kk)] = std::max(out[size_t(kk)], rad);
    }
  };

  const size_t m = loop.size();
  for (size_t i = 0; i < m; ++i) {
    const Eigen::Vector2d& a = loop[i];
    const Eigen::Vector2d& b = loop[(i + 1) % m];
    for (int j = 0; j < refine; ++j) {
      const Eigen::Vector2d p = a + (double(j) / refine) * (b - a);
      const Eigen::Vector2d q = a + (double(j + 1) / refine) * (b - a);
      fill_arc(p, q);
    }
  }

  // Vertices represented by neither adjacent chord arc are isolated spikes
  // (both neighbors at the origin, or radial chords). They are projected
  // onto the nearest grid ray: the documented one-bin smear for segments.
  // Vertices with a covering arc never take a deposit, so iterated images
  // of filled regions cannot creep outward ray by ray.
  for (size_t i = 0; i < m; ++i) {
    const Eigen::Vector2d& v = loop[i];
    const double rv = v.norm();
    if (rv < 1e-300) continue;
    const RayRange before = arc_range(loop[(i + m - 1) % m], v);
    const RayRange after = arc_range(v, loop[(i + 1) % m]);
    if (before.k1 >= before.k0 || after.k1 >= after.k0) continue;
    const double ang = wrap_2pi(std::atan2(v.y(), v.x()));
    long k = std::lround(ang / w);
    const double off = std::abs(wrap_pm_pi(ang - double(k) * w));
    k %= n;
    if (k < 0) k += n;
    out[size_t(k)] = std::max(out[size_t(k)], rv * std::cos(off));
  }
}

void require_make_grid(int n, const char* who) {
  if (n < 16) throw std::invalid_argument(std::string(who) + ": need n >= 16 grid angles");
}

}  // namespace

StarSet2 make_ball(int n) {
  require_make_grid(n, "make_ball");
  return StarSet2(n, std::vector<double>(size_t(n), 1.0));
}

StarSet2 make_segment(const Eigen::Vector2d& x, int n) {
  require_make_grid(n, "make_segment");
  const double r = x.norm();
  if (r < 1e-300) throw std::invalid_argument("make_segment: zero endpoint");
  StarSet2 s(n);
  s.set_radius(s.nearest_bin(std::atan2(x.y(), x.x())), r);
  return s;
}

StarSet2 make_sector(double theta1, double theta2, double radius, int n) {
  require_make_grid(n, "make_sector");
  if (!(radius >= 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("make_sector: radius must be finite and >= 0");
  StarSet2 s(n);
  const bool full = theta2 - theta1 >= kTwoPi;
  const double start = wrap_2pi(theta1);
  const double width = full ? kTwoPi : wrap_2pi(theta2 - theta1);
  for (int k = 0; k < n; ++k) {
    const double rel = wrap_2pi(s.theta(k) - start);
    if (full || rel <= width + 1e-12 || rel >= kTwoPi - 1e-12) s.set_radius(k, radius);
  }
  return s;
}

StarSet2 make_polygon(const std::vector<Eigen::Vector2d>& loop, int n) {
  require_make_grid(n, "make_polygon");
  if (loop.size() < 2) throw std::invalid_argument("make_polygon: need at least 2 vertices");
  std::vector<double> out(size_t(n), 0.0);
  rasterize_loop(loop, n, 8, out);
  return StarSet2(n, std::move(out));
}

StarSet2 linear_image(const StarSet2& s, const Eigen::Matrix2d& t, int refine) {
  if (refine < 1) throw std::invalid_argument("linear_image: refine must be >= 1");
  // |det| through singular values; the plain 2x2 determinant cancels
  // catastrophically for large well-conditioned maps
  Eigen::JacobiSVD<Eigen::Matrix2d> svd(t);
  if (svd.singularValues()(0) * svd.singularValues()(1) <= 1e-12)
    throw std::invalid_argument("linear_image: singular map");
  const int n = s.n_angles();
  std::vector<Eigen::Vector2d> loop(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) loop[size_t(k)] = t * s.vertex(k);
  std::vector<double> out(size_t(n), 0.0);
  rasterize_loop(loop, n, refine, out);
  return StarSet2(n, std::move(out));
}

StarSet2 set_union(const StarSet2& s1, const StarSet2& s2) {
  if (s1.n_angles() != s2.n_angles())
    throw std::invalid_argument("set_union: grid mismatch");
  std::vector<double> out(s1.radii());
  for (int k = 0; k < s1.n_angles(); ++k)
    out[size_t(k)] = std::max(out[size_t(k)], s2.radius(k));
  return StarSet2(s1.n_angles(), std::move(out));
}

StarSet2 scale(const StarSet2& s, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("scale: factor must be finite and >= 0");
  std::vector<double> out(s.radii());
  for (double& r : out) r *= alpha;
  return StarSet2(s.n_angles(), std::move(out));
}

StarSet2 upsample(const StarSet2& s, int factor) {
  if (factor < 1) throw std::invalid_argument("upsample: factor must be >= 1");
  if (factor == 1) return s;
  const int n = s.n_angles() * factor;
  std::vector<double> out(size_t(n), 0.0);
  for (int k = 0; k < n; ++k) {
    if (k % factor == 0) out[size_t(k)] = s.radius(k / factor);
    else out[size_t(k)] = s.radial_at(kTwoPi * k / n);
  }
  return StarSet2(n, std::move(out));
}

double hausdorff(const StarSet2& s1, const StarSet2& s2) {
  if (s1.n_angles() != s2.n_angles())
    throw std::invalid_argument("hausdorff: grid mismatch");
  double d = 0.0;
  for (int k = 0; k < s1.n_angles(); ++k) {
    if (s1.radius(k) > 0.0) d = std::max(d, s2.distance_to(s1.vertex(k)));
    if (s2.radius(k) > 0.0) d = std::max(d, s1.distance_to(s2.vertex(k)));
  }
  return d;
}

bool is_subset_tol(const StarSet2& s1, const StarSet2& s2, double tol) {
  if (s1.n_angles() != s2.n_angles())
    throw std::invalid_argument("is_subset_tol: grid mismatch");
  for (int k = 0; k < s1.n_angles(); ++k) {
    if (s1.radius(k) <= 0.0) continue;
    if (s2.distance_to(s1.vertex(k)) > tol) return false;
  }
  return true;
}

std::vector<Vector> uniform_control_samples(const BilinearSystem& sys, int per_axis) {
  if (per_axis < 1) throw std::invalid_argument("uniform_control_samples: need >= 1 per axis");
  const int m = sys.n_controls();
  std::vector<Vector> out;
  long total = 1;
  for (int i = 0; i < m; ++i) total *= per_axis;
  out.reserve(size_t(total));
  for (long idx = 0; idx < total; ++idx) {
    Vector v(m);
    long rem = idx;
    for (int i = 0; i < m; ++i) {
      const long j = rem % per_axis;
      rem /= per_axis;
      v(i) = per_axis == 1 ? 0.5 * (sys.u_lo(i) + sys.u_hi(i))
                           : sys.u_lo(i) + (sys.u_hi(i) - sys.u_lo(i)) * double(j) / (per_axis - 1);
    }
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

void check_reach_opts(const BilinearSystem& sys, const ReachOptions& opts) {
  if (!(opts.step > 0.0) || !std::isfinite(opts.step))
    throw std::invalid_argument("reach_step: step must be positive");
  if (opts.control_samples.empty())
    throw std::invalid_argument("reach_step: need at least one control sample");
  for (const auto& u0 : opts.control_samples)
    if (!sys.contains_control(u0))
      throw std::invalid_argument("reach_step: control sample outside the box");
  if (sys.dim() != 2)
    throw std::invalid_argument("reach_step: star-set propagation is implemented for d = 2 only");
}

}  // namespace

std::vector<Eigen::Matrix2d> reach_maps(const BilinearSystem& sys, const ReachOptions& opts) {
  check_reach_opts(sys, opts);
  std::vector<Eigen::Matrix2d> maps;
  maps.reserve(opts.control_samples.size());
  for (const auto& u0 : opts.control_samples)
    maps.push_back(expm(drift_matrix(sys, u0), opts.step));
  return maps;
}

std::vector<Eigen::Matrix2d> reach_maps(const ShiftedSystem& sh, const ReachOptions& opts) {
  check_reach_opts(sh.base, opts);
  std::vector<Eigen::Matrix2d> maps;
  maps.reserve(opts.control_samples.size());
  for (const auto& u0 : opts.control_samples)
    maps.push_back(expm(shifted_drift(sh, u0), opts.step));
  return maps;
}

StarSet2 reach_step_maps(const StarSet2& s, const std::vector<Eigen::Matrix2d>& maps, int refine) {
  if (maps.empty()) throw std::invalid_argument("reach_step_maps: no transition maps");
  StarSet2 out = linear_image(s, maps.front(), refine);
  for (size_t i = 1; i < maps.size(); ++i)
    out = set_union(out, linear_image(s, maps[i], refine));
  return out;
}

StarSet2 reach_step(const BilinearSystem& sys, const StarSet2& s, const ReachOptions& opts) {
  return reach_step_maps(s, reach_maps(sys, opts), opts.refine);
}

StarSet2 reach_step(const ShiftedSystem& sh, const StarSet2& s, const ReachOptions& opts) {
  return reach_step_maps(s, reach_maps(sh, opts), opts.refine);
}

}  // namespace bcs
