#include "bcs/sphere_cs.hpp"

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

double image_angle(const Eigen::Matrix2d& t, double ang) {
  const Eigen::Vector2d p = t * Eigen::Vector2d(std::cos(ang), std::sin(ang));
  return wrap_2pi(std::atan2(p.y(), p.x()));
}

// Iterative Tarjan SCC; components are returned in some order, each as a
// sorted list of bins.
std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& adj) {
  const int n = int(adj.size());
  std::vector<int> index(size_t(n), -1), low(size_t(n), 0), comp(size_t(n), -1);
  std::vector<bool> on_stack(size_t(n), false);
  std::vector<int> stack;
  std::vector<std::vector<int>> comps;
  int next_index = 0;

  struct Frame {
    int v;
    size_t child;
  };
  for (int root = 0; root < n; ++root) {
    if (index[size_t(root)] != -1) continue;
    std::vector<Frame> call;
    call.push_back({root, 0});
    index[size_t(root)] = low[size_t(root)] = next_index++;
    stack.push_back(root);
    on_stack[size_t(root)] = true;
    while (!call.empty()) {
      auto& fr = call.back();
      if (fr.child < adj[size_t(fr.v)].size()) {
        const int w = adj[size_t(fr.v)][fr.child++];
        if (index[size_t(w)] == -1) {
          index[size_t(w)] = low[size_t(w)] = next_index++;
          stack.push_back(w);
          on_stack[size_t(w)] = true;
          call.push_back({w, 0});
        } else if (on_stack[size_t(w)]) {
          low[size_t(fr.v)] = std::min(low[size_t(fr.v)], index[size_t(w)]);
        }
      } else {
        if (low[size_t(fr.v)] == index[size_t(fr.v)]) {
          std::vector<int> c;
          int w;
          do {
            w = stack.back();
            stack.pop_back();
            on_stack[size_t(w)] = false;
            comp[size_t(w)] = int(comps.size());
            c.push_back(w);
          } while (w != fr.v);
          std::sort(c.begin(), c.end());
          comps.push_back(std::move(c));
        }
        const int v = fr.v;
        call.pop_back();
        if (!call.empty())
          low[size_t(call.back().v)] = std::min(low[size_t(call.back().v)], low[size_t(v)]);
      }
    }
  }
  return comps;
}

}  // namespace

double ControlSetArc::total_width() const {
  double w = 0.0;
  for (const auto& a : arcs) w += a.width();
  return w;
}

bool ControlSetArc::full_circle() const {
  return arcs.size() == 1 && total_width() >= kTwoPi - 0.5 * kTwoPi / std::max(1, n_bins);
}

bool ControlSetArc::degenerate() const {
  return total_width() <= 2.0 * kTwoPi / std::max(1, n_bins) + 1e-12;
}

ReachGraph build_reach_graph(const BilinearSystem& sys, int n_bins, double tau,
                             const std::vector<Vector>& control_samples) {
  if (sys.dim() != 2)
    throw std::invalid_argument("build_reach_graph: implemented for d = 2 only");
  if (n_bins < 90) throw std::invalid_argument("build_reach_graph: need n_bins >= 90");
  if (!(tau > 0.0) || !std::isfinite(tau))
    throw std::invalid_argument("build_reach_graph: tau must be positive");
  if (control_samples.empty())
    throw std::invalid_argument("build_reach_graph: need at least one control sample");

  std::vector<Eigen::Matrix2d> maps;
  maps.reserve(control_samples.size());
  for (const auto& u0 : control_samples) {
    if (!sys.contains_control(u0))
      throw std::invalid_argument("build_reach_graph: control sample outside the box");
    maps.push_back(expm(drift_matrix(sys, u0), tau));
  }

  ReachGraph g;
  g.n_bins = n_bins;
  g.tau = tau;
  g.edges.assign(size_t(n_bins), {});
  const double w = kTwoPi / n_bins;

  for (int i = 0; i < n_bins; ++i) {
    std::vector<int>& out = g.edges[size_t(i)];
    for (const auto& t : maps) {
      const double b0 = image_angle(t, i * w);
      const double b2 = image_angle(t, (i + 1) * w);
      const double bm = image_angle(t, (i + 0.5) * w);
      // determinant of a matrix exponential is positive, so the circle map
      // preserves orientation and the bin image is the ccw arc b0 -> b2
      double width = wrap_2pi(b2 - b0);
      if (width == 0.0) width = w;  // identity-like map
      const long k0 = long(std::floor(b0 / w));
      const long k1 = long(std::floor((b0 + width) / w));
      for (long k = k0; k <= k1; ++k) out.push_back(int(((k % n_bins) + n_bins) % n_bins));
      out.push_back(int(std::floor(bm / w)) % n_bins);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return g;
}

std::vector<ControlSetArc> invariant_control_sets(const ReachGraph& g) {
  const int n = g.n_bins;
  if (n <= 0) throw std::invalid_argument("invariant_control_sets: empty graph");
  const auto comps = strongly_connected_components(g.edges);

  std::vector<int> comp_of(size_t(n), -1);
  for (size_t c = 0; c < comps.size(); ++c)
    for (int v : comps[c]) comp_of[size_t(v)] = int(c);

  std::vector<ControlSetArc> out;
  const double w = kTwoPi / n;
  for (size_t c = 0; c < comps.size(); ++c) {
    bool closed = true;
    for (int v : comps[c]) {
      for (int to : g.edges[size_t(v)])
        if (comp_of[size_t(to)] != int(c)) {
          closed = false;
          break;
        }
      if (!closed) break;
    }
    if (!closed) continue;

    // group member bins into circularly consecutive runs
    const auto& bins = comps[c];
    std::vector<bool> member(size_t(n), false);
    for (int v : bins) member[size_t(v)] = true;
    ControlSetArc arc;
    arc.invariant = true;
    arc.n_bins = n;
    if (int(bins.size()) == n) {
      arc.arcs.push_back({0.0, kTwoPi});
    } else {
      for (int v : bins) {
        const int prev = (v + n - 1) % n;
        if (member[size_t(prev)]) continue;  // not the start of a run
        int len = 0;
        while (member[size_t((v + len) % n)]) ++len;
        arc.arcs.push_back({v * w, (v + len) * w});
      }
      std::sort(arc.arcs.begin(), arc.arcs.end(),
                [](const AngularInterval& a, const AngularInterval& b) { return a.start < b.start; });
    }
    out.push_back(std::move(arc));
  }
  std::sort(out.begin(), out.end(), [](const ControlSetArc& a, const ControlSetArc& b) {
    return a.arcs.front().start < b.arcs.front().start;
  });
  return out;
}

Eigen::Vector2d interior_ray(const ControlSetArc& arc) {
  if (arc.arcs.empty()) throw std::invalid_argument("interior_ray: empty arc");
  if (arc.full_circle()) return {1.0, 0.0};
  if (arc.degenerate())
    throw std::invalid_argument("interior_ray: degenerate arc (width <= 2 bins)");
  const auto widest = std::max_element(
      arc.arcs.begin(), arc.arcs.end(),
      [](const AngularInterval& a, const AngularInterval& b) { return a.width() < b.width(); });
  const double mid = wrap_2pi(widest->start + 0.5 * widest->width());
  return {std::cos(mid), std::sin(mid)};
}

}  // namespace bcs
