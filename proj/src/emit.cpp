#include "bcs/emit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bcs {

std::string format_double(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("emit: cannot write " + path.string());
  return out;
}

}  // namespace

void write_radial_csv(const StarSet2& s, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "theta,rho\n";
  for (int k = 0; k < s.n_angles(); ++k)
    out << format_double(s.theta(k)) << ',' << format_double(s.radius(k)) << '\n';
}

StarSet2 read_radial_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("emit: cannot open " + path.string());
  std::string line;
  std::vector<double> thetas, radii;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("theta", 0) == 0) continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("emit: malformed radial CSV row in " + path.string());
    thetas.push_back(std::stod(line.substr(0, comma)));
    radii.push_back(std::stod(line.substr(comma + 1)));
  }
  if (radii.size() < 4)
    throw std::invalid_argument("emit: radial CSV " + path.string() + " has too few rows");
  const int n = int(radii.size());
  return StarSet2(n, std::move(radii));
}

void write_trajectory_csv(const std::vector<double>& times, const std::vector<Vector>& states,
                          const std::filesystem::path& path) {
  if (times.size() != states.size())
    throw std::invalid_argument("write_trajectory_csv: times/states size mismatch");
  auto out = open_out(path);
  out << "t";
  const Eigen::Index d = states.empty() ? 0 : states.front().size();
  for (Eigen::Index i = 0; i < d; ++i) out << ",x" << (i + 1);
  out << '\n';
  for (size_t r = 0; r < times.size(); ++r) {
    out << format_double(times[r]);
    for (Eigen::Index i = 0; i < d; ++i) out << ',' << format_double(states[r](i));
    out << '\n';
  }
}

void write_verification_csv(const VerificationReport& rep, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "t,hausdorff\n";
  for (size_t i = 0; i < rep.times.size(); ++i)
    out << format_double(rep.times[i]) << ',' << format_double(rep.distances[i]) << '\n';
}

void write_arcs_csv(const std::vector<ControlSetArc>& arcs, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "start,end,invariant\n";
  for (const auto& cs : arcs)
    for (const auto& a : cs.arcs)
      out << format_double(a.start) << ',' << format_double(a.end) << ','
          << (cs.invariant ? 1 : 0) << '\n';
}

void write_svg_plot(const std::vector<std::pair<std::string, StarSet2>>& sets,
                    const PlotOptions& opts, const std::filesystem::path& path) {
  if (sets.empty()) throw std::invalid_argument("write_svg_plot: no input sets");

  double bound = 0.0;
  for (const auto& [label, s] : sets) bound = std::max(bound, s.max_radius());
  if (opts.unit_circle) bound = std::max(bound, 1.0);
  if (bound <= 0.0) bound = 1.0;
  bound *= 1.05;  // 5% margin

  const double half_w = double(opts.width) / 2.0, half_h = double(opts.height) / 2.0;
  const double px = std::min(half_w, half_h) / bound;
  const auto sx = [&](double x) { return half_w + px * x; };
  const auto sy = [&](double y) { return half_h - px * y; };

  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << opts.width << ' '
      << opts.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (opts.axes) {
    svg << "<line x1=\"0\" y1=\"" << sy(0.0) << "\" x2=\"" << opts.width << "\" y2=\"" << sy(0.0)
        << "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
    svg << "<line x1=\"" << sx(0.0) << "\" y1=\"0\" x2=\"" << sx(0.0) << "\" y2=\"" << opts.height
        << "\" stroke=\"#bbbbbb\" stroke-width=\"1\"/>\n";
  }
  if (opts.unit_circle)
    svg << "<circle cx=\"" << sx(0.0) << "\" cy=\"" << sy(0.0) << "\" r=\"" << px
        << "\" fill=\"none\" stroke=\"#999999\" stroke-dasharray=\"4 3\"/>\n";

  for (size_t i = 0; i < sets.size(); ++i) {
    const auto& s = sets[i].second;
    const char* color = kColors[i % 5];
    svg << "<path d=\"";
    for (int k = 0; k < s.n_angles(); ++k) {
      const auto v = s.vertex(k);
      svg << (k == 0 ? 'M' : 'L') << sx(v.x()) << ' ' << sy(v.y());
    }
    svg << "Z\" fill=\"" << color << "\" fill-opacity=\"0.35\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n";
    if (opts.markers) {
      const int stride = std::max(1, s.n_angles() / 64);
      for (int k = 0; k < s.n_angles(); k += stride) {
        const auto v = s.vertex(k);
        svg << "<circle cx=\"" << sx(v.x()) << "\" cy=\"" << sy(v.y())
            << "\" r=\"2\" fill=\"" << color << "\"/>\n";
      }
    }
  }
  if (sets.size() >= 2) {
    for (size_t i = 0; i < sets.size(); ++i) {
      const double y = 18.0 + 18.0 * double(i);
      svg << "<rect x=\"10\" y=\"" << y - 10 << "\" width=\"12\" height=\"12\" fill=\""
          << kColors[i % 5] << "\" fill-opacity=\"0.6\"/>\n";
      svg << "<text x=\"28\" y=\"" << y << "\" font-family=\"sans-serif\" font-size=\"13\">"
          << sets[i].first << "</text>\n";
    }
  }
  svg << "</svg>\n";

  auto out = open_out(path);
  out << svg.str();
}

}  // namespace bcs
