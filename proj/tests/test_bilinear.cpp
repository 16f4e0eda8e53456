#include "bcs/bilinear.hpp"

#include "doctest.h"
#include "oracles.hpp"

#include <cmath>

using namespace bcs;
using oracle::mat2;
using oracle::vec1;
using oracle::vec2;

TEST_SUITE_BEGIN("bilinear");

TEST_CASE("system validation") {
  CHECK_THROWS_AS(BilinearSystem(mat2(0, 0, 0, 0), {}, vec1(-1), vec1(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(BilinearSystem(mat2(0, 0, 0, 0), {Matrix::Identity(3, 3)}, vec1(-1), vec1(1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(BilinearSystem(mat2(0, 0, 0, 0), {mat2(1, 0, 0, 1)}, vec1(2), vec1(1)),
                  std::invalid_argument);
}

TEST_CASE("drift_matrix on the bundled systems") {
  const auto s1 = oracle::example1();
  CHECK((drift_matrix(s1, vec1(0)) - s1.a).norm() == doctest::Approx(0.0));
  CHECK((drift_matrix(s1, vec1(-1)) - mat2(-2, 0, 0, 2)).norm() == doctest::Approx(0.0));
  CHECK((drift_matrix(s1, vec1(1)) - mat2(0, 2, 2, 0)).norm() == doctest::Approx(0.0));
  const auto s2 = oracle::example2();
  CHECK((drift_matrix(s2, vec1(-1)) - 2.0 * Matrix::Identity(2, 2)).norm() ==
        doctest::Approx(0.0));
  CHECK_THROWS_AS(drift_matrix(s1, vec1(1.5)), std::invalid_argument);
}

TEST_CASE("flow basics: t = 0, fixed ray, duration errors") {
  const auto s1 = oracle::example1();
  const auto u1 = PwcControl::constant(vec1(1));
  CHECK((flow(s1, 0.0, vec2(1, 1), u1) - vec2(1, 1)).norm() == doctest::Approx(0.0));
  for (double t : {0.25, 1.0, 2.5}) {
    const Vector y = flow(s1, t, vec2(1, 1), u1);
    CHECK(y(0) == doctest::Approx(std::exp(2 * t)).epsilon(1e-12));
    CHECK(y(1) == doctest::Approx(std::exp(2 * t)).epsilon(1e-12));
  }
  PwcControl finite;
  finite.durations = {0.5};
  finite.values = {vec1(1)};
  CHECK_THROWS_AS(flow(s1, 1.0, vec2(1, 1), finite), std::invalid_argument);
  CHECK_NOTHROW(flow(s1, 0.5, vec2(1, 1), finite));
}

TEST_CASE("flow_matrix: identity at t = 0, diagonal constant control, cocycle") {
  const auto s1 = oracle::example1();
  const auto um = PwcControl::constant(vec1(-1));
  CHECK((flow_matrix(s1, 0.0, um) - Matrix::Identity(2, 2)).norm() == doctest::Approx(0.0));
  const Matrix f = flow_matrix(s1, 0.8, um);
  CHECK(f(0, 0) == doctest::Approx(std::exp(-1.6)).epsilon(1e-12));
  CHECK(f(1, 1) == doctest::Approx(std::exp(1.6)).epsilon(1e-12));
  CHECK(std::abs(f(0, 1)) < 1e-15);

  // cocycle: phi(t+s, u) = phi(s, u shifted by t) * phi(t, u)
  oracle::Rng rng(505);
  for (int i = 0; i < 25; ++i) {
    const auto sys = rng.system(2, 1, 1.0);
    const auto u = rng.control(sys, 4, true);
    const double t = rng.uniform(0.1, 2.0), s = rng.uniform(0.1, 2.0);
    const Matrix whole = flow_matrix(sys, t + s, u);
    const Matrix split = flow_matrix(sys, s, u.tail_from(t)) * flow_matrix(sys, t, u);
    CHECK(operator_norm(whole - split) < 1e-9 * operator_norm(whole));
    CHECK(std::abs(whole.determinant()) > 0.0);
  }
}

TEST_CASE("backward_flow_matrix inverts the forward transition") {
  const auto s1 = oracle::example1();
  oracle::Rng rng(506);
  const auto u = rng.control(s1, 3, true);
  const Matrix fwd = flow_matrix(s1, 1.3, u);
  const Matrix bwd = backward_flow_matrix(s1, 1.3, u);
  CHECK(operator_norm(fwd * bwd - Matrix::Identity(2, 2)) < 1e-10);
}

TEST_CASE("flow is linear in the initial state") {
  oracle::Rng rng(607);
  for (int i = 0; i < 50; ++i) {
    const int d = rng.uniform_int(2, 3);
    const auto sys = rng.system(d, 1, 1.0);
    const auto u = rng.control(sys, 4, true);
    const double t = rng.uniform(0.0, 2.0);
    const Vector x = rng.point(d), y = rng.point(d);
    const double alpha = rng.uniform(-2, 2);
    const Vector lhs = flow(sys, t, alpha * x + y, u);
    const Vector rhs = alpha * flow(sys, t, x, u) + flow(sys, t, y, u);
    const double scale = (x.norm() + y.norm()) * operator_norm(flow_matrix(sys, t, u));
    CHECK((lhs - rhs).norm() <= 1e-9 * scale);
  }
}

TEST_CASE("shifted_flow equals the scaled base flow and the frozen values") {
  const auto s1 = oracle::example1();
  const ShiftedSystem sh{s1, 2.0};

  // r = 0 reduces to the base flow
  const ShiftedSystem sh0{s1, 0.0};
  const auto u1 = PwcControl::constant(vec1(1));
  CHECK((shifted_flow(sh0, 0.9, vec2(1, 1), u1) - flow(s1, 0.9, vec2(1, 1), u1)).norm() <
        1e-12 * std::exp(1.8));

  // the diagonal ray is fixed under the shifted dynamics with u = 1
  for (double t : {0.3, 1.0, 4.0}) {
    const Vector y = shifted_flow(sh, t, vec2(1, 1), u1);
    CHECK(y(0) == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(y(1) == doctest::Approx(1.0).epsilon(1e-11));
  }
  // u = -1 slides along the horizontal segment toward the vertical axis
  const auto um = PwcControl::constant(vec1(-1));
  for (double t : {0.5, 1.5}) {
    const Vector y = shifted_flow(sh, t, vec2(1, 1), um);
    CHECK(y(0) == doctest::Approx(std::exp(-4 * t)).epsilon(1e-11));
    CHECK(y(1) == doctest::Approx(1.0).epsilon(1e-11));
  }

  // shift identity on random systems
  oracle::Rng rng(708);
  for (int i = 0; i < 50; ++i) {
    const int d = rng.uniform_int(2, 3);
    const auto sys = rng.system(d, 1, 1.0);
    const auto u = rng.control(sys, 4, true);
    const double r = rng.uniform(-2, 2), t = rng.uniform(0.0, 2.5);
    const Vector x = rng.point(d);
    const ShiftedSystem shr{sys, r};
    const Vector lhs = shifted_flow(shr, t, x, u);
    const Vector rhs = std::exp(-t * r) * flow(sys, t, x, u);
    double fmax = 0.0;
    for (const auto& v : sys.box_vertices()) fmax = std::max(fmax, operator_norm(drift_matrix(sys, v)));
    CHECK((lhs - rhs).norm() <= 1e-9 * x.norm() * std::exp(std::abs(t) * (fmax + std::abs(r))));
  }
}

TEST_CASE("known solution of the rotation-plus-scaling system") {
  const auto s2 = oracle::example2();
  oracle::Rng rng(809);
  for (int i = 0; i < 100; ++i) {
    const auto u = rng.control(s2, 6, true);
    const double t = rng.uniform(0.0, 5.0);
    const Vector x = rng.point(2, 1.0);
    const Vector got = flow(s2, t, x, u);
    const Vector want = oracle::example2_closed_form(t, x, u);
    CHECK((got - want).norm() < 1e-8 * std::max(1.0, want.norm()));
  }
}

TEST_CASE("project") {
  CHECK((project(vec2(3, 4)) - vec2(0.6, 0.8)).norm() == doctest::Approx(0.0).epsilon(1e-15));
  const Vector unit = vec2(1, 0);
  CHECK((project(unit) - unit).norm() == doctest::Approx(0.0));
  CHECK(std::abs(project(vec2(-7, 2)).norm() - 1.0) < 1e-14);
  CHECK_THROWS_AS(project(vec2(0, 0)), std::invalid_argument);
}

TEST_CASE("sphere_field: radial fields vanish, equilibria, frozen tangent") {
  const Vector xhat = project(vec2(0.3, -0.9));
  CHECK(sphere_field(Matrix::Identity(2, 2), xhat).norm() < 1e-14);
  CHECK(sphere_field(mat2(-2, 0, 0, 2), vec2(1, 0)).norm() < 1e-14);
  const Vector diag = project(vec2(1, 1));
  const Vector f = sphere_field(mat2(-2, 0, 0, 2), diag);
  CHECK(f.norm() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f(0) < 0.0);  // toward the vertical axis
  CHECK(f(1) > 0.0);
  CHECK(std::abs(f.dot(diag)) < 1e-12);
  CHECK_THROWS_AS(sphere_field(mat2(1, 0, 0, 1), vec2(2, 0)), std::invalid_argument);

  // orthogonality on random inputs
  oracle::Rng rng(910);
  for (int i = 0; i < 30; ++i) {
    const Vector p = project(rng.point(3));
    const Matrix m = rng.matrix(3, 2.0);
    CHECK(std::abs(sphere_field(m, p).dot(p)) < 1e-12);
  }
}

TEST_CASE("projection equivariance: project(flow) follows the sphere field") {
  const auto s1 = oracle::example1();
  oracle::Rng rng(1011);
  for (int i = 0; i < 10; ++i) {
    const auto u = rng.control(s1, 3, true);
    const double t = rng.uniform(0.2, 2.0);
    const Vector x = rng.point(2);
    const Vector via_flow = project(flow(s1, t, x, u));
    const Vector via_field = oracle::rk4_sphere(s1, t, project(x), u, 1e-3);
    CHECK((via_flow - via_field).norm() < 1e-6);
  }
}

TEST_CASE("growth bound: per-segment log-gain below duration times lognorm2") {
  oracle::Rng rng(1112);
  for (int i = 0; i < 40; ++i) {
    const int d = rng.uniform_int(2, 3);
    const auto sys = rng.system(d, 1, 1.0);
    const auto u = rng.control(sys, 5, false);
    Vector x = rng.point(d);
    for (size_t seg = 0; seg < u.durations.size(); ++seg) {
      const double h = u.durations[seg];
      const Vector next = expm(drift_matrix(sys, u.values[seg]), h) * x;
      const double gain = std::log(next.norm()) - std::log(x.norm());
      CHECK(gain <= h * lognorm2(drift_matrix(sys, u.values[seg])) + 1e-9);
      x = next;
    }
  }
}

TEST_SUITE_END();
