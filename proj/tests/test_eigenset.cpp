#include "bcs/eigenset.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>

using namespace bcs;
using oracle::vec1;
using oracle::vec2;

namespace {

RayReturnCertificate diag_witness() {
  // u = 1 fixes the diagonal ray of the first bundled system with rate 2
  RayReturnCertificate c;
  c.x = vec2(1, 1);
  c.control = PwcControl::constant(vec1(1));
  c.period = 1.0;
  c.rate = 2.0;
  c.angular_residual = 0.0;
  return c;
}

RayReturnCertificate vertical_witness() {
  RayReturnCertificate c;
  c.x = vec2(0, 1);
  c.control = PwcControl::constant(vec1(-1));
  c.period = 1.0;
  c.rate = 2.0;
  c.angular_residual = 0.0;
  return c;
}

ReachOptions build_opts(const BilinearSystem& sys, double step = 0.05, int samples = 32) {
  ReachOptions o;
  o.step = step;
  o.control_samples = uniform_control_samples(sys, samples);
  return o;
}

}  // namespace

TEST_SUITE_BEGIN("eigenset");

TEST_CASE("witness construction reproduces the diagonal-seed triangle") {
  const auto sys = oracle::example1();
  const auto res =
      construct_from_witness(sys, 2.0, diag_witness(), build_opts(sys), 1e-3, 500, 1024);
  CHECK(res.converged);
  const auto ref = make_polygon({{0, 0}, {0, 1}, {1, 1}}, 1024);
  CHECK(hausdorff(res.d, ref) <= 0.02);
  CHECK(res.d.max_radius() >= 1e-6);
}

TEST_CASE("witness construction reproduces the vertical-seed triangle") {
  const auto sys = oracle::example1();
  const auto res =
      construct_from_witness(sys, 2.0, vertical_witness(), build_opts(sys), 1e-3, 500, 1024);
  CHECK(res.converged);
  const auto ref = make_polygon({{0, 0}, {0, 1}, {0.5, 0.5}}, 1024);
  CHECK(hausdorff(res.d, ref) <= 0.02);
}

TEST_CASE("witness construction on the spiral system") {
  const auto sys = oracle::example2();
  RayReturnCertificate c;
  c.x = vec2(1, 0);
  c.control = PwcControl::constant(vec1(-1));
  c.period = 1.0;
  c.rate = 2.0;
  c.angular_residual = 0.0;
  const auto res = construct_from_witness(sys, 2.0, c, build_opts(sys), 1e-3, 500, 1024);
  CHECK(res.converged);
  StarSet2 ref(1024);
  for (int k = 0; k < 1024; ++k) ref.set_radius(k, std::exp(-0.5 * ref.theta(k)));
  CHECK(hausdorff(res.d, ref) <= 0.02);
}

TEST_CASE("witness construction validates the rate match") {
  const auto sys = oracle::example1();
  auto bad = diag_witness();
  bad.rate = 1.9;
  CHECK_THROWS_AS(construct_from_witness(sys, 2.0, bad, build_opts(sys)), std::invalid_argument);
}

TEST_CASE("general construction: identity flows keep the unit disc") {
  const auto sys = oracle::drift_only(Matrix::Zero(2, 2));
  const auto res = construct_general(sys, 0.0, build_opts(sys, 0.1, 5), 1e-3, 100, 512);
  CHECK(res.converged);
  CHECK(hausdorff(res.d, make_ball(512)) < 1e-9);
}

TEST_CASE("general construction on the first bundled system") {
  const auto sys = oracle::example1();
  const auto res = construct_general(sys, 2.0, build_opts(sys), 1e-3, 500, 1024);
  CHECK(res.converged);
  // contains both witness triangles at their maximal inscribed scales
  const auto tri1 = scale(make_polygon({{0, 0}, {0, 1}, {1, 1}}, 1024), 1.0 / std::sqrt(2.0));
  const auto tri2 = make_polygon({{0, 0}, {0, 1}, {0.5, 0.5}}, 1024);
  CHECK(is_subset_tol(tri1, res.d, 0.02));
  CHECK(is_subset_tol(tri2, res.d, 0.02));
  // nontrivial with boundary contact against the invariant hull (unit disc)
  CHECK(res.d.max_radius() >= 1.0 - 1e-3);

  const auto rep = verify_eigenset(sys, res.d, 2.0, {0.25, 0.5},
                                   build_opts(sys, 0.025, 64), 0.03);
  CHECK(rep.pass);
}

TEST_CASE("phase-1 blow-up guard fires when R is too small") {
  const auto sys = oracle::example1();
  CHECK_THROWS_AS(construct_general(sys, -1.0, build_opts(sys, 0.2, 5), 1e-3, 500, 256),
                  std::range_error);
}

TEST_CASE("phase-2 descent is monotone up to grid tolerance") {
  const auto sys = oracle::example1();
  const ShiftedSystem sh{sys, 2.0};
  const auto opts = build_opts(sys, 0.05, 16);
  const auto maps = reach_maps(sh, opts);
  StarSet2 w = make_ball(512);
  // converge the hull first
  for (int i = 0; i < 30; ++i) w = set_union(w, reach_step_maps(w, maps, opts.refine));
  StarSet2 prev = w;
  const double slack = 2 * std::numbers::pi / 512 * 2.0;
  for (int i = 0; i < 20; ++i) {
    const StarSet2 next = reach_step_maps(prev, maps, opts.refine);
    for (int k = 0; k < 512; ++k) CHECK(next.radius(k) <= prev.radius(k) + slack);
    prev = next;
  }
}

TEST_CASE("verification accepts the scaling disc and rejects the wrong rate") {
  const auto sys = oracle::drift_only(0.8 * Matrix::Identity(2, 2));
  const auto opts = build_opts(sys, 0.05, 3);
  const auto ball = make_ball(512);
  const auto good = verify_eigenset(sys, ball, 0.8, {0.25, 0.5, 1.0}, opts, 1e-6);
  CHECK(good.pass);
  CHECK(good.max_distance < 1e-6);
  const auto bad = verify_eigenset(sys, ball, 1.0, {0.25, 0.5, 1.0}, opts, 1e-2);
  CHECK_FALSE(bad.pass);
}

TEST_CASE("verification rejects the unit disc for the first bundled system") {
  const auto sys = oracle::example1();
  const auto rep = verify_eigenset(sys, make_ball(1024), 2.0, {0.25},
                                   build_opts(sys, 0.025, 32), 0.01);
  CHECK_FALSE(rep.pass);
  CHECK(rep.max_distance > 0.01);
}

TEST_CASE("rate consistency: the same set cannot verify at two distinct rates") {
  const auto sys = oracle::example1();
  const auto res =
      construct_from_witness(sys, 2.0, diag_witness(), build_opts(sys), 1e-3, 500, 1024);
  const auto vopts = build_opts(sys, 0.025, 64);
  const auto at_R = verify_eigenset(sys, res.d, 2.0, {0.25, 0.5}, vopts, 0.01);
  const auto at_other = verify_eigenset(sys, res.d, 2.1, {0.25, 0.5}, vopts, 0.01);
  const bool both_pass = at_R.pass && at_other.pass;
  CHECK_FALSE(both_pass);
  // the distinct rate is off by a scale factor that the tolerance cannot hide
  CHECK(at_other.max_distance > 0.1);
}

TEST_CASE("verification validates the time grid") {
  const auto sys = oracle::example1();
  const auto opts = build_opts(sys, 0.05, 4);
  CHECK_THROWS_AS(verify_eigenset(sys, make_ball(256), 2.0, {0.07}, opts, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(verify_eigenset(sys, make_ball(256), 2.0, {-0.5}, opts, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(verify_eigenset(sys, make_ball(256), 2.0, {}, opts, 0.1),
                  std::invalid_argument);
}

TEST_CASE("union_family") {
  const auto sys = oracle::example1();
  const auto d1 =
      construct_from_witness(sys, 2.0, diag_witness(), build_opts(sys), 1e-3, 500, 1024).d;
  const auto d2 =
      construct_from_witness(sys, 2.0, vertical_witness(), build_opts(sys), 1e-3, 500, 1024).d;

  CHECK(hausdorff(union_family({{1.0, d1}}), d1) == doctest::Approx(0.0));
  CHECK(hausdorff(union_family({{1.0, d1}, {1.0, d1}}), d1) == doctest::Approx(0.0));

  const auto mixed = union_family({{1.0, d1}, {0.7, d2}});
  const auto rep = verify_eigenset(sys, mixed, 2.0, {0.25, 0.5, 1.0},
                                   build_opts(sys, 0.025, 64), 0.03);
  CHECK(rep.pass);
}

TEST_SUITE_END();
