#include <doctest.h>

#include <cmath>

#include "apharm/expsum.hpp"
#include "apharm/kernels.hpp"
#include "oracles.hpp"

using namespace apharm;
using kernels::Exec;

TEST_CASE("serial and parallel variants are bit-identical") {
  const auto f = ExpSum::sin_pi() * ExpSum::shifted_sine(std::sqrt(2.0), {1.0}, {0.3, 0.1});
  const double y[1] = {0.1};
  CHECK(kernels::log_modulus_mean(f, y, 20, Exec::serial).value ==
        kernels::log_modulus_mean(f, y, 20, Exec::parallel).value);

  const ExpSum g(2, {{cplx(1, 0.5), {1.0, 0.3}}, {0.3, {-2.0, 1.0}}, {2.0, {0.0, 0.0}}});
  const double y2[2] = {0.1, -0.2};
  const long cells[2] = {300, 200};
  CHECK(kernels::box_mean(g, y2, 15, cells, Exec::serial) == kernels::box_mean(g, y2, 15, cells, Exec::parallel));

  std::vector<kernels::DensityBox> boxes = {{{-0.5, -0.5}, {0.0, 0.5}, 1.0}, {{0.0, -0.2}, {0.3, 0.1}, 2.0}};
  std::vector<double> axis;
  for (int i = 0; i <= 40; ++i) axis.push_back(-1 + 0.05 * i);
  CHECK(kernels::log_potential_2d(boxes, axis, axis, Exec::serial) ==
        kernels::log_potential_2d(boxes, axis, axis, Exec::parallel));

  const auto integrand = [](std::span<const double> p) {
    return cplx(std::cos(p[0]) * oracle::bump(std::hypot(p[0], p[1])), p[1] * p[1]);
  };
  const double lo[2] = {-1, -1};
  const long count[2] = {41, 41};
  CHECK(kernels::grid_integral(integrand, lo, count, 0.05, Exec::serial) ==
        kernels::grid_integral(integrand, lo, count, 0.05, Exec::parallel));
}

TEST_CASE("box mean of a pure exponential matches the sinc formula") {
  const ExpSum f(1, {{1.0, {2.0}}});
  const double y[1] = {0.25};
  const long cells[1] = {4000};
  const cplx m = kernels::box_mean(f, y, 10, cells, Exec::serial);
  // continuous mean e^{-2y} sin(20)/20; midpoint error is O(h^2)
  CHECK(std::abs(m - std::exp(-0.5) * std::sin(20.0) / 20.0) < 1e-5);
}

TEST_CASE("log integrals across zeros") {
  // integral of log|sin pi x| over [0, 1] is -ln 2
  auto r = kernels::log_abs_line_integral(ExpSum::sin_pi(), 0.0, 1.0);
  CHECK(r.value == doctest::Approx(-std::log(2.0)).epsilon(1e-9));
  // an off-grid window with zeros inside
  r = kernels::log_abs_line_integral(ExpSum::sin_pi(), -0.37, 2.21);
  const double ref = oracle::simpson([](double x) { return std::log(std::abs(std::sin(oracle::pi * x))); }, -0.37, 2.21,
                                     2000000);
  CHECK(r.value == doctest::Approx(ref).epsilon(1e-5));
  CHECK(r.refined_cells > 0);
  // double zero
  const auto s2 = ExpSum::sin_pi() * ExpSum::sin_pi();
  CHECK(kernels::log_abs_line_integral(s2, 0.0, 1.0).value == doctest::Approx(-2 * std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("log modulus mean of sin pi z against the closed form") {
  const auto f = ExpSum::sin_pi();
  for (double y : {0.0, 0.3, -0.8, 1.5}) {
    const double yy[1] = {y};
    const auto r = kernels::log_modulus_mean(f, yy, 20);
    CHECK(r.value == doctest::Approx(oracle::pi * std::abs(y) - std::log(2.0)).epsilon(1e-9));
    CHECK_FALSE(r.flagged);
  }
}

TEST_CASE("log modulus mean in two variables") {
  // sin(pi(z1 + z2)/sqrt2 ... ) style factor along a unit direction
  const double c = 0.6, d = 0.8;
  const auto f = ExpSum::shifted_sine(3.0, {c, d}, cplx(0.2, 0.1));
  const double y[2] = {0.4, -0.1};
  const auto r = kernels::log_modulus_mean(f, y, 6);
  const double ref = oracle::sine_jessen(3.0, {c, d}, cplx(0.2, 0.1), {0.4, -0.1});
  CHECK(r.value == doctest::Approx(ref).epsilon(2e-2));
}

TEST_CASE("closed-form box log integral against brute quadrature") {
  const auto brute = [](double u0, double u1, double v0, double v1) {
    const int n = 800;
    double s = 0;
    const double du = (u1 - u0) / n, dv = (v1 - v0) / n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s += 0.5 * std::log(std::pow(u0 + (i + 0.5) * du, 2) + std::pow(v0 + (j + 0.5) * dv, 2));
    return s * du * dv;
  };
  CHECK(kernels::log_box_integral(0.5, 1.5, 0.2, 0.9) == doctest::Approx(brute(0.5, 1.5, 0.2, 0.9)).epsilon(1e-6));
  CHECK(kernels::log_box_integral(-1, 1, -1, 1) == doctest::Approx(brute(-1, 1, -1, 1)).epsilon(1e-4));
  CHECK(kernels::log_box_integral(-0.3, 0.0, 0.0, 0.7) == doctest::Approx(brute(-0.3, 0.0, 0.0, 0.7)).epsilon(1e-4));
}

TEST_CASE("log potential of a box far away approaches mass times log distance") {
  std::vector<kernels::DensityBox> boxes = {{{-0.05, -0.05}, {0.05, 0.05}, 100.0}};
  const std::vector<double> a0 = {10.0}, a1 = {0.0};
  const auto u = kernels::log_potential_2d(boxes, a0, a1);
  CHECK(u[0] == doctest::Approx(std::log(10.0) / (2 * oracle::pi)).epsilon(1e-5));
}

TEST_CASE("grid integral of a smooth bump") {
  const auto integrand = [](std::span<const double> p) { return cplx(oracle::bump(std::hypot(p[0], p[1]) / 0.8)); };
  const double lo[2] = {-1, -1};
  const long count[2] = {81, 81};
  const cplx v = kernels::grid_integral(integrand, lo, count, 0.025);
  CHECK(v.real() == doctest::Approx(oracle::bump_integral(2, 0.8)).epsilon(1e-6));
}
