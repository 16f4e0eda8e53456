#pragma once

#include "bcs/spectrum.hpp"
#include "bcs/starset.hpp"

#include <string>
#include <vector>

namespace bcs {

struct EigensetResult {
  StarSet2 d;
  double rate = 0.0;
  enum class Construction { witness, general } construction = Construction::witness;
  int iterations = 0;
  bool converged = false;
  double final_increment = 0.0;  // Hausdorff between the last two iterates
};

struct VerificationReport {
  std::vector<double> times;
  std::vector<double> distances;
  double max_distance = 0.0;
  bool pass = false;
  /// Records the inner-approximation asymmetry: the reach side is a lower
  /// approximation, so containment of the reach in e^{tR}D is the hard
  /// check while coverage is sampled through reachable boundary points.
  std::string note;
};

/// Orbit-closure construction from a periodic witness: iterate
/// W <- W ∪ reach_step(Sigma_R, W) from the segment [0,1]*x of the witness
/// until the Hausdorff increment drops below tol. The radial representation
/// makes the result star-closed automatically. The witness rate must match
/// R within 1e-3.
EigensetResult construct_from_witness(const BilinearSystem& sys, double rate,
                                      const RayReturnCertificate& witness,
                                      const ReachOptions& opts, double tol = 1e-3,
                                      int max_iter = 500, int n_angles = 1024);

/// General two-phase construction. Phase 1 grows the invariant hull D0 by
/// union-iteration of reach_step(Sigma_R) from the unit ball (bounded only
/// when R is not an under-estimate; radii beyond the blow-up guard abort).
/// Phase 2 iterates plain reach steps from D0, which descend to the
/// invariant core since D0 is invariant. Collapse below the nontriviality
/// floor signals an over-estimated R.
EigensetResult construct_general(const BilinearSystem& sys, double rate, const ReachOptions& opts,
                                 double tol = 1e-3, int max_iter = 500, int n_angles = 1024,
                                 double blowup_guard = 1e6);

/// Checks O_t(D) = e^{tR} D at the given times (each a multiple of
/// opts.step): the reach of D under the original system, iterated in exact
/// tau-steps, is compared against scale(D, e^{tR}) in Hausdorff distance.
/// Both sides run on a grid refined by grid_factor, which keeps the
/// re-binning losses of the iteration well below the set tolerances.
VerificationReport verify_eigenset(const BilinearSystem& sys, const StarSet2& d, double rate,
                                   const std::vector<double>& times, const ReachOptions& opts,
                                   double tol, int grid_factor = 4);

/// Union of scaled members. If every member verifies at a tolerance, the
/// union verifies at the same tolerance.
StarSet2 union_family(const std::vector<std::pair<double, StarSet2>>& members);

}  // namespace bcs
