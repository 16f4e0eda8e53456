#pragma once

#include "bcs/eigenset.hpp"
#include "bcs/sphere_cs.hpp"
#include "bcs/starset.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace bcs {

/// Shortest round-trippable decimal form ("%.17g" fallback); CSV output is
/// byte-stable across runs.
std::string format_double(double v);

void write_radial_csv(const StarSet2& s, const std::filesystem::path& path);
StarSet2 read_radial_csv(const std::filesystem::path& path);

void write_trajectory_csv(const std::vector<double>& times,
                          const std::vector<Vector>& states,
                          const std::filesystem::path& path);

void write_verification_csv(const VerificationReport& rep, const std::filesystem::path& path);

void write_arcs_csv(const std::vector<ControlSetArc>& arcs, const std::filesystem::path& path);

struct PlotOptions {
  bool axes = true;
  bool unit_circle = false;
  bool markers = true;
  int width = 640;
  int height = 640;
};

/// Static SVG with one filled polygon per input set, viewBox scaled to the
/// data bounds plus a 5% margin. Two or more inputs get a legend.
void write_svg_plot(const std::vector<std::pair<std::string, StarSet2>>& sets,
                    const PlotOptions& opts, const std::filesystem::path& path);

}  // namespace bcs
