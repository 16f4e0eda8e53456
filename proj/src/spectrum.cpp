#include "bcs/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace bcs {

namespace {

// angle between rays, stable near 0 and pi
double vec_angle(const Vector& a, const Vector& b) {
  const double na = a.norm(), nb = b.norm();
  if (!(na > 0.0) || !(nb > 0.0)) return 0.0;
  const Vector ua = a / na, ub = b / nb;
  return 2.0 * std::atan2((ua - ub).norm(), (ua + ub).norm());
}

struct TrialResult {
  double last_duration = 0.0;
  double period = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  double rate = -std::numeric_limits<double>::infinity();
};

// Search state for one initial ray. Trajectories are propagated with a
// running log-scale so long horizons cannot overflow.
class RaySearcher {
 public:
  RaySearcher(const BilinearSystem& sys, const Vector& x, const SearchOptions& opts)
      : sys_(sys), opts_(opts), xhat_(project(x)), rng_(opts.seed) {
    vertices_ = sys.box_vertices();
    for (const auto& v : vertices_) drifts_.push_back(drift_matrix(sys, v));
  }

  std::vector<RayReturnCertificate> run(const Vector& x_original) {
    std::vector<RayReturnCertificate> found;
    const int nv = int(vertices_.size());
    int restart = 0;
    const int k = std::max(2, opts_.n_segments);

    auto try_pattern = [&](const std::vector<int>& pattern, std::vector<double> durs) {
      if (budget_left() <= 0) return;
      auto polished = coordinate_descent(pattern, std::move(durs));
      if (polished.residual <= opts_.angular_tol)
        found.push_back(to_certificate(x_original, pattern, polished));
    };

    // structured restarts first: constant patterns, then alternating pairs
    for (int v = 0; v < nv && budget_left() > 0; ++v) {
      try_pattern(std::vector<int>(size_t(k), v), even_durations(k));
      ++restart;
    }
    for (int v1 = 0; v1 < nv && budget_left() > 0; ++v1)
      for (int v2 = 0; v2 < nv && budget_left() > 0; ++v2) {
        if (v1 == v2) continue;
        std::vector<int> pattern(static_cast<size_t>(k));
        for (int j = 0; j < k; ++j) pattern[size_t(j)] = (j % 2 == 0) ? v1 : v2;
        try_pattern(pattern, even_durations(k));
        ++restart;
      }
    std::uniform_int_distribution<int> pick(0, nv - 1);
    std::uniform_real_distribution<double> frac(0.05, 1.0);
    while (restart < opts_.n_restarts && budget_left() > 0) {
      std::vector<int> pattern(static_cast<size_t>(k));
      std::vector<double> durs(static_cast<size_t>(k - 1));
      for (auto& p : pattern) p = pick(rng_);
      for (auto& d : durs) d = std::max(opts_.min_duration, frac(rng_) * opts_.horizon / k);
      try_pattern(pattern, std::move(durs));
      ++restart;
    }

    std::sort(found.begin(), found.end(),
              [](const RayReturnCertificate& a, const RayReturnCertificate& b) {
                return a.rate > b.rate;
              });
    return found;
  }

 private:
  long long budget_left() const { return opts_.budget - evals_; }

  std::vector<double> even_durations(int k) const {
    return std::vector<double>(size_t(k - 1), 0.5 * opts_.horizon / k);
  }

  // Propagate the unit ray through the fixed-duration prefix, then solve the
  // closing segment's duration so the trajectory re-aligns with the ray.
  TrialResult evaluate(const std::vector<int>& pattern, const std::vector<double>& durs) {
    TrialResult best;
    const int k = int(pattern.size());
    Vector y = xhat_;
    double logscale = 0.0, prefix_time = 0.0;
    for (int j = 0; j < k - 1; ++j) {
      y = expm(drifts_[size_t(pattern[size_t(j)])], durs[size_t(j)]) * y;
      const double n = y.norm();
      if (!(n > 0.0) || !std::isfinite(n)) return best;
      logscale += std::log(n);
      y /= n;
      prefix_time += durs[size_t(j)];
    }
    const Matrix& f_last = drifts_[size_t(pattern.back())];
    const double cap = std::max(opts_.min_duration * 2.0,
                                opts_.horizon - prefix_time - opts_.min_duration);

    auto probe = [&](double d) -> TrialResult {
      ++evals_;
      TrialResult r;
      r.last_duration = d;
      Vector z = expm(f_last, d) * y;
      const double n = z.norm();
      if (!(n > 0.0) || !std::isfinite(n)) return r;
      r.period = prefix_time + d;
      r.residual = vec_angle(z, xhat_);
      r.rate = (logscale + std::log(n)) / r.period;
      return r;
    };

    // coarse scan, then golden-section polish around the best point
    const int grid = 96;
    for (int i = 0; i <= grid; ++i) {
      const double d = opts_.min_duration + (cap - opts_.min_duration) * double(i) / grid;
      const TrialResult r = probe(d);
      if (r.residual < best.residual) best = r;
      if (budget_left() <= 0) break;
    }
    const double cell = (cap - opts_.min_duration) / grid;
    double lo = std::max(opts_.min_duration, best.last_duration - cell);
    double hi = std::min(cap, best.last_duration + cell);
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
    TrialResult ra = probe(a), rb = probe(b);
    for (int it = 0; it < 60 && hi - lo > 1e-13 && budget_left() > 0; ++it) {
      if (ra.residual < rb.residual) {
        hi = b;
        b = a;
        rb = ra;
        a = hi - gr * (hi - lo);
        ra = probe(a);
      } else {
        lo = a;
        a = b;
        ra = rb;
        b = lo + gr * (hi - lo);
        rb = probe(b);
      }
      const TrialResult& r = ra.residual < rb.residual ? ra : rb;
      if (r.residual < best.residual) best = r;
    }
    return best;
  }

  // Merit order: feasibility first, then rate; infeasible trials compare by
  // residual. The closing segment is re-solved after every coordinate move,
  // so stretching a leg cannot strand the return.
  static bool better(const TrialResult& a, const TrialResult& b, double tol) {
    const bool fa = a.residual <= tol, fb = b.residual <= tol;
    if (fa != fb) return fa;
    if (fa) return a.rate > b.rate + 1e-12;
    return a.residual < b.residual;
  }

  TrialResult coordinate_descent(const std::vector<int>& pattern, std::vector<double> durs) {
    TrialResult best = evaluate(pattern, durs);
    const int free_count = int(durs.size());
    for (int sweep = 0; sweep < 12 && budget_left() > 0; ++sweep) {
      bool improved = false;
      for (int i = 0; i < free_count && budget_left() > 0; ++i) {
        double others = 0.0;
        for (int j = 0; j < free_count; ++j)
          if (j != i) others += durs[size_t(j)];
        const double cap =
            std::max(opts_.min_duration, opts_.horizon - others - 2.0 * opts_.min_duration);
        const double current = durs[size_t(i)];
        for (double trial : {current * 0.25, current * 0.5, current * 2.0, current * 4.0,
                             opts_.min_duration, cap, 0.5 * cap}) {
          trial = std::clamp(trial, opts_.min_duration, cap);
          if (std::abs(trial - current) < 1e-15) continue;
          const double saved = durs[size_t(i)];
          durs[size_t(i)] = trial;
          const TrialResult r = evaluate(pattern, durs);
          if (better(r, best, opts_.angular_tol)) {
            best = r;
            improved = true;
          } else {
            durs[size_t(i)] = saved;
          }
        }
      }
      if (!improved) break;
    }
    best.last_duration = std::max(best.last_duration, opts_.min_duration);
    last_durs_ = durs;
    return best;
  }

  RayReturnCertificate to_certificate(const Vector& x_original, const std::vector<int>& pattern,
                                      const TrialResult& r) const {
    RayReturnCertificate c;
    c.x = x_original;
    c.control.cyclic = true;
    for (size_t j = 0; j + 1 < pattern.size(); ++j) {
      c.control.durations.push_back(last_durs_[j]);
      c.control.values.push_back(vertices_[size_t(pattern[j])]);
    }
    c.control.durations.push_back(r.last_duration);
    c.control.values.push_back(vertices_[size_t(pattern.back())]);
    c.period = r.period;
    c.rate = r.rate;
    c.angular_residual = r.residual;
    return c;
  }

  const BilinearSystem& sys_;
  SearchOptions opts_;
  Vector xhat_;
  std::vector<Vector> vertices_;
  std::vector<Matrix> drifts_;
  std::mt19937_64 rng_;
  long long evals_ = 0;
  std::vector<double> last_durs_;
};

double rate_lipschitz(const BilinearSystem& sys) {
  double m = 0.0;
  for (const auto& v : sys.box_vertices()) m = std::max(m, operator_norm(drift_matrix(sys, v)));
  return 2.0 * m;
}

}  // namespace

double xi_upper_bound(const BilinearSystem& sys) {
  double r = -std::numeric_limits<double>::infinity();
  for (const auto& v : sys.box_vertices()) r = std::max(r, lognorm2(drift_matrix(sys, v)));
  return r;
}

std::vector<RayReturnCertificate> ray_return_search(const BilinearSystem& sys, const Vector& x,
                                                    const SearchOptions& opts) {
  if (x.size() != sys.dim()) throw std::invalid_argument("ray_return_search: dimension mismatch");
  if (!(x.norm() > 0.0)) throw std::invalid_argument("ray_return_search: zero initial point");
  if (opts.n_segments < 1 || !(opts.horizon > 0.0))
    throw std::invalid_argument("ray_return_search: bad options");
  RaySearcher searcher(sys, x, opts);
  return searcher.run(x);
}

RateBracket xi_estimate(const BilinearSystem& sys, const Vector& x, const SearchOptions& opts) {
  RateBracket out;
  out.upper = xi_upper_bound(sys);
  auto certs = ray_return_search(sys, x, opts);
  if (!certs.empty()) {
    out.witness = certs.front();
    out.lower = out.witness->rate - rate_lipschitz(sys) * out.witness->angular_residual;
  }
  return out;
}

RateBracket compute_R(const BilinearSystem& sys, const ControlSetArc& ics_arc,
                      const SearchOptions& opts) {
  if (ics_arc.arcs.empty()) throw std::invalid_argument("compute_R: empty arc");
  if (ics_arc.degenerate())
    throw std::invalid_argument("compute_R: arc has empty interior (degenerate)");

  std::vector<Vector> rays;
  if (ics_arc.full_circle()) {
    for (double th : {0.0, 2.0943951023931953, 4.1887902047863905}) {
      Vector v(2);
      v << std::cos(th), std::sin(th);
      rays.push_back(std::move(v));
    }
  } else {
    const auto widest = std::max_element(
        ics_arc.arcs.begin(), ics_arc.arcs.end(),
        [](const AngularInterval& a, const AngularInterval& b) { return a.width() < b.width(); });
    for (double f : {0.3, 0.5, 0.7}) {
      const double th = widest->start + f * widest->width();
      Vector v(2);
      v << std::cos(th), std::sin(th);
      rays.push_back(std::move(v));
    }
  }

  RateBracket out;
  out.upper = xi_upper_bound(sys);
  SearchOptions per_ray = opts;
  per_ray.budget = std::max<long long>(1, opts.budget / long(rays.size()));
  std::vector<double> lowers;
  for (size_t i = 0; i < rays.size(); ++i) {
    per_ray.seed = opts.seed + i;
    RateBracket b = xi_estimate(sys, rays[i], per_ray);
    if (std::isfinite(b.lower)) lowers.push_back(b.lower);
    if (b.lower > out.lower || !out.witness) {
      out.lower = std::max(out.lower, b.lower);
      if (b.witness) out.witness = b.witness;
    }
  }
  if (lowers.size() >= 2) {
    const auto [mn, mx] = std::minmax_element(lowers.begin(), lowers.end());
    out.consistent = (*mx - *mn) <= 0.05;
  }
  return out;
}

}  // namespace bcs
