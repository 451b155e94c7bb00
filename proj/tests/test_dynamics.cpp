#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hjleak/dynamics.hpp"
#include "hjleak/errors.hpp"
#include "support.hpp"

using namespace hjleak;

TEST_SUITE("dynamics") {

TEST_CASE("norms") {
  const std::vector<double> v{3.0, -4.0}, ones{1.0, 1.0}, w{2.0, 0.5};
  CHECK(weighted_norm(v, ones, 2.0) == doctest::Approx(5.0));
  CHECK(weighted_norm(v, ones, 1.0) == doctest::Approx(7.0));
  CHECK(weighted_norm(v, ones, kInfNorm) == doctest::Approx(4.0));
  CHECK(weighted_norm(v, w, kInfNorm) == doctest::Approx(6.0));
  CHECK(holder_conjugate(2.0) == doctest::Approx(2.0));
  CHECK(holder_conjugate(1.0) == kInfNorm);
  CHECK(holder_conjugate(kInfNorm) == doctest::Approx(1.0));
  CHECK(holder_conjugate(3.0) == doctest::Approx(1.5));
}

TEST_CASE("single integrator") {
  const auto m = make_single_integrator_2d(1.0);
  const std::vector<double> z{2.0, 3.0};
  CHECK(m.eval_drift(z) == std::vector<double>{0.0, 0.0});
  CHECK(m.eval_control_matrix(z) == std::vector<double>{1.0, 0.0, 0.0, 1.0});
  CHECK_THROWS_AS(make_single_integrator_2d(0.0), ConfigError);
  CHECK_THROWS_AS(make_single_integrator_2d(-1.0), ConfigError);

  CHECK(joint_constraint_eval(m, std::vector<double>{1.0, 0.0}) == doctest::Approx(0.0));
  CHECK(joint_constraint_eval(m, std::vector<double>{1.0, 1.0}) == doctest::Approx(std::sqrt(2.0) - 1.0));
}

TEST_CASE("planar quadrotor") {
  const auto m = make_planar_quadrotor_6d(1.0, 1.0, 9.81);
  CHECK_THROWS_AS(make_planar_quadrotor_6d(0.0, 1.0, 9.81), ConfigError);
  CHECK_THROWS_AS(make_planar_quadrotor_6d(1.0, -1.0, 9.81), ConfigError);

  const std::vector<double> z{0.1, 0.2, 0.3, 0.4, 0.0, 0.6};
  const auto f = m.eval_drift(z);
  CHECK(f == std::vector<double>{0.3, 0.4, 0.0, -9.81, 0.6, 0.0});
  const auto g = m.eval_control_matrix(z);
  // theta = 0, u_T = 1: vx gets -sin(0) = 0, vy gets cos(0) = 1.
  CHECK(g[2 * 2 + 0] == doctest::Approx(0.0));
  CHECK(g[3 * 2 + 0] == doctest::Approx(1.0));
  CHECK(g[5 * 2 + 1] == doctest::Approx(1.0));

  const auto m1 = make_planar_quadrotor_6d(1.0, 1.0, 1.0);
  const std::vector<double> tilted{0, 0, 0, 0, std::numbers::pi / 2, 0};
  const auto ft = m1.eval_drift(tilted);
  const auto gt = m1.eval_control_matrix(tilted);
  CHECK(ft[3] + gt[3 * 2 + 0] * 1.0 == doctest::Approx(-1.0));

  CHECK(joint_constraint_eval(m, std::vector<double>{0.5, -0.9}) == doctest::Approx(-0.1));
}

TEST_CASE("closed-form bounds cover sampled dynamics") {
  const auto m = make_planar_quadrotor_6d(1.0, 1.0, 9.81);
  const Grid g({-1, -1, -2, -2, -2, -2}, {4, 4, 2, 2, 2, 2}, std::vector<Index>(6, 7));
  const auto b = dynamics_bounds(m, g);
  SystemModel sampled = m;
  sampled.bounds = nullptr;
  const auto s = dynamics_bounds(sampled, g);
  for (Index d = 0; d < 6; ++d) CHECK(b.drift[d] >= s.drift[d] - 1e-12);
  for (Index k = 0; k < 12; ++k) CHECK(b.control[k] >= s.control[k] - 1e-12);
}

TEST_CASE("subsystem restriction") {
  auto m = make_single_integrator_2d(1.0);
  const auto s2 = restrict_to_subsystem(m, 2, {});
  CHECK(s2.state_dims == std::vector<Index>{1});
  CHECK(s2.reduced.n == 1);
  CHECK(s2.reduced.m == 1);
  CHECK(s2.reduced.constraints.size() == 1);
  CHECK(s2.reduced.eval_control_matrix(std::vector<double>{0.5}) == std::vector<double>{1.0});
  CHECK(s2.reduced.constraints[0].ubar == 1.0);

  const auto r2 = restrict_to_subsystem(m, 2, {1});
  CHECK(r2.reduced.m == 0);
  CHECK(r2.reduced.constraints.empty());
  CHECK(r2.restricted_controls == std::vector<Index>{1});
  CHECK(r2.reduced.eval_drift(std::vector<double>{0.5}) == std::vector<double>{0.0});

  CHECK_THROWS_AS(restrict_to_subsystem(m, 2, {0}), DomainError);

  const auto q = make_planar_quadrotor_6d(1.0, 1.0, 9.81);
  const auto q1 = restrict_to_subsystem(q, 1, {});
  CHECK(q1.state_dims == std::vector<Index>{0, 2, 4, 5});
  CHECK(q1.control_idx == std::vector<Index>{0, 1});
  // (xdot, vxdot, thetadot, omegadot) at theta = pi/2, u = (1, 1): (vx, -1, omega, 1).
  const std::vector<double> sub{0.0, 0.7, std::numbers::pi / 2, 0.3};
  const auto f = q1.reduced.eval_drift(sub);
  const auto g = q1.reduced.eval_control_matrix(sub);
  CHECK(f[0] == doctest::Approx(0.7));
  CHECK(f[2] == doctest::Approx(0.3));
  CHECK(f[1] + g[1 * 2 + 0] == doctest::Approx(-1.0));
  CHECK(f[3] + g[3 * 2 + 1] == doctest::Approx(1.0));
}

TEST_CASE("self-containment is enforced") {
  const Grid g = testing::si_grid();
  const auto m = make_single_integrator_2d(1.0);
  CHECK_NOTHROW(check_self_contained(m, 1, g));
  CHECK_NOTHROW(check_self_contained(m, 2, g));
  const auto q = make_planar_quadrotor_6d(1.0, 1.0, 9.81);
  const Grid g6({-1, -1, -2, -2, -2, -2}, {4, 4, 2, 2, 2, 2}, std::vector<Index>(6, 5));
  CHECK_NOTHROW(check_self_contained(q, 1, g6));
  CHECK_NOTHROW(check_self_contained(q, 2, g6));

  // xdot = u_x + y couples subsystem 1 to subsystem 2's state.
  SystemModel coupled = m;
  coupled.drift = [](std::span<const double> z, std::span<double> out) {
    out[0] = z[1];
    out[1] = 0.0;
  };
  CHECK_THROWS_AS(check_self_contained(coupled, 1, g), DecompositionError);
  CHECK_NOTHROW(check_self_contained(coupled, 2, g));

  // u_y entering xdot couples through the controls.
  SystemModel leaky = m;
  leaky.control_matrix = [](std::span<const double>, std::span<double> out) {
    out[0] = 1.0;
    out[1] = 0.5;
    out[2] = 0.0;
    out[3] = 1.0;
  };
  CHECK_THROWS_AS(check_self_contained(leaky, 1, g), DecompositionError);
}

}  // TEST_SUITE
