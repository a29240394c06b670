#include <doctest.h>

#include <cmath>

#include "apharm/currents.hpp"
#include "apharm/error.hpp"
#include "apharm/jessen.hpp"
#include "apharm/zeros.hpp"
#include "oracles.hpp"

using namespace apharm;

namespace {

std::vector<Box> bins_1d(double lo, double hi, double w) {
  std::vector<Box> b;
  for (double a = lo; a < hi - 1e-12; a += w) b.push_back({{a}, {a + w}});
  return b;
}

const std::vector<double> kNu = {10, 20, 40, 80};

}  // namespace

TEST_CASE("Jessen profile of sin pi z") {
  const Grid g({Grid::axis(-1.5, 1.5, 0.25)});
  const auto p = jessen::jessen_profile(ExpSum::sin_pi(), g, kNu);
  for (long s = 0; s < g.size(); ++s) {
    const double y = g.axes[0].at(s);
    CHECK(p.values[s] == doctest::Approx(oracle::pi * std::abs(y) - std::log(2.0)).epsilon(1e-9));
  }
  CHECK(p.history.size() == kNu.size());
}

TEST_CASE("Jessen profile of a product is the sum of the factor profiles") {
  const std::vector<oracle::SineFactor> fs = {{oracle::pi, {0.0, 0.3}}, {std::sqrt(2.0), {0.5, -0.4}}};
  const auto f = oracle::product(fs);
  const Grid g({Grid::axis(-1, 1, 0.2)});
  const auto p = jessen::jessen_profile(f, g, {20, 40});
  for (long s = 0; s < g.size(); ++s) {
    const double y = g.axes[0].at(s);
    double ref = 0;
    for (const auto& q : fs) ref += oracle::sine_jessen(q.c, {1.0}, q.s, {y});
    CHECK(p.values[s] == doctest::Approx(ref).epsilon(1e-3));
  }
}

TEST_CASE("exponential factor gives a linear profile") {
  const auto f = ExpSum::exponential(cplx(0, 3), {2.0});
  const Grid g({Grid::axis(-1, 1, 0.5)});
  const auto p = jessen::jessen_profile(f, g, {10});
  for (long s = 0; s < g.size(); ++s) CHECK(p.values[s] == doctest::Approx(std::log(3.0) - 2 * g.axes[0].at(s)));
}

TEST_CASE("translation invariance and reflection symmetry") {
  const auto f = ExpSum::sin_pi() * ExpSum::shifted_sine(std::sqrt(3.0), {1.0}, {0.0, 0.0});
  const Grid g({Grid::axis(-1, 1, 0.25)});
  const std::vector<double> nus = {10, 20, 40};
  const auto p = jessen::jessen_profile(f, g, nus);
  const double tau = 1.234;
  const double taus[1] = {tau};
  const auto q = jessen::jessen_profile(apcore::translate(f, taus), g, nus);
  for (long s = 0; s < g.size(); ++s) {
    const double y = g.axes[0].at(s);
    // the two box means differ by the end strips of length tau
    const auto strip = [&](double a) {
      const int n = 200000;
      double acc = 0;
      for (int i = 0; i < n; ++i) {
        const cplx z(a + (i + 0.5) * tau / n, y);
        acc += std::abs(std::log(std::abs(std::sin(oracle::pi * z) * std::sin(std::sqrt(3.0) * z))));
      }
      return acc * tau / n;
    };
    for (std::size_t k = 0; k < nus.size(); ++k) {
      const double bound = (strip(nus[k]) + strip(-nus[k])) / (2 * nus[k]);
      CHECK(std::abs(p.history[k][s] - q.history[k][s]) <= bound + 1e-9);
    }
    CHECK(std::abs(p.values[s] - p.values[g.size() - 1 - s]) < 1e-9);
  }
}

TEST_CASE("convexity check and tolerance") {
  const Grid g({Grid::axis(-1, 1, 0.1)});
  std::vector<double> v;
  for (long s = 0; s < g.size(); ++s) v.push_back(-g.axes[0].at(s) * g.axes[0].at(s));
  const auto p = jessen::profile_from_values(g, v);
  CHECK(jessen::min_curvature(p, jessen::Precondition::convex) < 0);
  CHECK_THROWS_AS(jessen::riesz_measure(p, bins_1d(-1, 1.1, 0.1)), InputError);
  CHECK(jessen::convexity_tolerance(p) == doctest::Approx(1e-6));
}

TEST_CASE("Riesz measure of the sine profile") {
  const Grid g({Grid::axis(-1.5, 1.5, 0.05)});
  std::vector<double> v;
  for (long s = 0; s < g.size(); ++s) v.push_back(oracle::pi * std::abs(g.axes[0].at(s)) - std::log(2.0));
  const auto p = jessen::profile_from_values(g, v);
  const auto mu = jessen::riesz_measure(p, bins_1d(-1.5, 1.55, 0.1));
  CHECK(mu.total() == doctest::Approx(1.0).epsilon(1e-9));
  int carrying = 0;
  for (std::size_t i = 0; i < mu.bins.size(); ++i) {
    if (mu.masses[i] < 1e-9) continue;
    ++carrying;
    CHECK(mu.masses[i] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mu.bins[i].lo[0] <= 1e-9);
    CHECK(mu.bins[i].hi[0] >= -1e-9);
  }
  CHECK(carrying == 1);
  // refining the bins keeps the total
  const auto fine = jessen::riesz_measure(p, bins_1d(-1.5, 1.55, 0.05));
  CHECK(fine.total() == doctest::Approx(mu.total()).epsilon(1e-9));
  for (double m : fine.masses) CHECK(m >= 0);
  CHECK_THROWS_AS(jessen::riesz_measure(p, bins_1d(-1.0, 1.0, 0.1)), InputError);
}

TEST_CASE("Riesz measures of closed-form profiles") {
  const Grid g({Grid::axis(-1, 1, 0.05)});
  std::vector<double> lin, sq;
  for (long s = 0; s < g.size(); ++s) {
    const double y = g.axes[0].at(s);
    lin.push_back(-y);
    sq.push_back(y * y);
  }
  const auto bins = bins_1d(-1, 1.05, 0.25);
  for (double m : jessen::riesz_measure(jessen::profile_from_values(g, lin), bins).masses) CHECK(m < 1e-12);
  const auto mu = jessen::riesz_measure(jessen::profile_from_values(g, sq), bins, 1.0);
  // A'' = 2 per unit length; interior nodes only cover (-1 + h, 1 - h)
  CHECK(mu.masses[1] == doctest::Approx(0.5));
  CHECK(mu.total() == doctest::Approx(2.0 * (2 - 0.05)).epsilon(1e-9));
}

TEST_CASE("Riesz mass matches the zero density") {
  const std::vector<oracle::SineFactor> fs = {{2 * oracle::pi, {0.1, 0.0}}};
  const auto f = oracle::product(fs);
  const Grid g({Grid::axis(-0.5, 0.5, 0.05)});
  const auto p = jessen::jessen_profile(f, g, kNu);
  const auto mu = jessen::riesz_measure(p, bins_1d(-0.5, 0.55, 0.25));
  const double lo[1] = {-0.4}, hi[1] = {0.4};
  const auto est = density_estimate(f, lo, hi, kNu);
  CHECK(mu.total() == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(est.value == doctest::Approx(mu.total()).epsilon(0.02));
}

TEST_CASE("1D reconstruction from atoms") {
  DensityMeasure mu;
  mu.bins = {{{-0.5}, {-0.5}}, {{0.25}, {0.25}}};
  mu.masses = {1.0, 2.0};
  const Grid g({Grid::axis(-1, 1, 0.05)});
  const auto rec = jessen::reconstruct_convex(mu, 1, g);
  CHECK(rec.convex);
  CHECK(rec.laplacian_l1_error < 1e-9);
  // slope jumps 2 pi mass at each atom
  const auto slope = [&](double y) {
    const long i = static_cast<long>(std::round((y + 1) / 0.05));
    return (rec.combined[i + 1] - rec.combined[i]) / 0.05;
  };
  CHECK(slope(-0.45) - slope(-0.6) == doctest::Approx(2 * oracle::pi));
  CHECK(slope(0.3) - slope(0.15) == doctest::Approx(4 * oracle::pi));
  // combined is piecewise linear: zero second difference away from atoms
  CHECK(std::abs(rec.combined[6] - 2 * rec.combined[5] + rec.combined[4]) < 1e-9);
}

TEST_CASE("1D reconstruction of 2 pi delta and of zero") {
  DensityMeasure mu;
  mu.bins = {{{0.0}, {0.0}}};
  mu.masses = {1.0};
  const Grid g({Grid::axis(-1, 1, 0.1)});
  const auto rec = jessen::reconstruct_convex(mu, 1, g);
  std::vector<double> diff;
  for (long s = 0; s < g.size(); ++s) diff.push_back(rec.combined[s] - oracle::pi * std::abs(g.axes[0].at(s)));
  for (long s = 1; s + 1 < g.size(); ++s) CHECK(std::abs(diff[s + 1] - 2 * diff[s] + diff[s - 1]) < 1e-6);
  mu.masses = {0.0};
  const auto zero = jessen::reconstruct_convex(mu, 1, g);
  for (double v : zero.combined) CHECK(std::abs(v) < 1e-12);
  CHECK(zero.convex);
}

TEST_CASE("1D reconstruction from uniform bins") {
  DensityMeasure mu;
  mu.bins = {{{-0.4}, {0.0}}, {{0.0}, {0.4}}};
  mu.masses = {0.5, 1.5};
  const Grid g({Grid::axis(-1, 1, 0.01)});
  const auto rec = jessen::reconstruct_convex(mu, 1, g);
  CHECK(rec.convex);
  CHECK(rec.laplacian_l1_error < 0.02);
}

TEST_CASE("2D reconstruction of a uniform disk") {
  const auto mu = jessen::disk_measure(0, 0, 0.5, 1.0, -1, 1, -1, 1, 0.1, kRieszNormalization);
  CHECK(mu.total() == doctest::Approx(kRieszNormalization).epsilon(1e-12));
  const Grid g({Grid::axis(-0.99375, 0.99375, 0.0125), Grid::axis(-0.99375, 0.99375, 0.0125)});
  const auto rec = jessen::reconstruct_convex(mu, 2, g);
  CHECK(rec.laplacian_l1_error < 0.02);
  // a compactly supported nonzero Laplacian admits no convex potential
  CHECK_FALSE(rec.convex);
}

TEST_CASE("disk log potential against the radial closed form") {
  // Newtonian potential of the uniform unit-mass disk of radius R:
  // (1/2pi) log r outside, (1/2pi)(log R + (r^2/R^2 - 1)/2) inside.
  const double R = 0.5;
  const auto mu = jessen::disk_measure(0, 0, R, 1.0, -1, 1, -1, 1, 0.025, 1.0);
  const Grid g({Grid::axis(-0.9, 0.9, 0.3), Grid::axis(-0.9, 0.9, 0.3)});
  const auto rec = jessen::reconstruct_convex(mu, 2, g);
  for (long s = 0; s < g.size(); ++s) {
    const auto y = g.point(s);
    const double r = std::hypot(y[0], y[1]);
    const double ref = r >= R ? std::log(r) / (2 * oracle::pi)
                              : (std::log(R) + 0.5 * (r * r / (R * R) - 1)) / (2 * oracle::pi);
    CHECK(std::abs(rec.potential[s] - ref) < 2e-4);
  }
}

TEST_CASE("rebin and relative L1") {
  DensityMeasure a;
  a.bins = {{{0.0}, {1.0}}, {{0.5}, {0.5}}};
  a.masses = {1.0, 2.0};
  const std::vector<Box> coarse = {{{0.0}, {0.5}}, {{0.5}, {1.0}}};
  const auto r = jessen::rebin(a, coarse);
  CHECK(r.masses[0] == doctest::Approx(0.5));
  CHECK(r.masses[1] == doctest::Approx(2.5));
  CHECK(jessen::l1_relative(r, r) == 0.0);
}

TEST_CASE("obstruction constants") {
  SUBCASE("antisymmetric Hermitian input") {
    std::vector<std::vector<cplx>> theta(5, {cplx(1, 0), cplx(0.3, 0.7), cplx(0.3, -0.7), cplx(2, 0)});
    const auto ob = jessen::obstruction_constants(theta, 2);
    CHECK(ob.at(0, 1) == doctest::Approx(0.7));
    CHECK(ob.at(1, 0) == -ob.at(0, 1));
    CHECK(ob.at(0, 0) == 0.0);
    CHECK_FALSE(ob.realizable_candidate);
  }
  SUBCASE("noise below the threshold") {
    std::vector<std::vector<cplx>> theta;
    for (int s = 0; s < 6; ++s) {
      const double e = 1e-5 * ((s % 2) ? 1 : -1);
      theta.push_back({cplx(1, 0), cplx(0.5, e), cplx(0.5, -e), cplx(1, 0)});
    }
    const auto ob = jessen::obstruction_constants(theta, 2);
    CHECK(std::abs(ob.at(0, 1)) < ob.tolerance);
    CHECK(ob.realizable_candidate);
  }
  SUBCASE("non-Hermitian input is rejected") {
    std::vector<std::vector<cplx>> theta = {{cplx(1, 0), cplx(0.3, 0.7), cplx(0.3, 0.7), cplx(2, 0)}};
    CHECK_THROWS_AS(jessen::obstruction_constants(theta, 2), InputError);
  }
  SUBCASE("lattice mean current") {
    const auto u = PotentialField::registered("ztilde_lattice");
    const Grid g({Grid::axis(-0.2, 0.2, 0.2), Grid::axis(-0.2, 0.2, 0.2)});
    const auto mc = mean_current(ddc(u), g, {2, 4}, 1e-3, 2);
    std::vector<std::vector<cplx>> theta;
    for (long s = 0; s < g.size(); ++s)
      theta.push_back({mc.mean.at(s, 0, 0), mc.mean.at(s, 0, 1), mc.mean.at(s, 1, 0), mc.mean.at(s, 1, 1)});
    const auto ob = jessen::obstruction_constants(theta, 2);
    CHECK(std::abs(ob.at(0, 1)) == doctest::Approx(1.0));
  }
}
