// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "apharm/currents.hpp"
#include "apharm/jessen.hpp"
#include "apharm/pldiv.hpp"
#include "apharm/zeros.hpp"
#include "oracles.hpp"

using namespace apharm;

namespace {

const std::vector<double> kNu = {10, 20, 40, 80};

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome sine_jessen() {
  const auto t0 = std::chrono::steady_clock::now();
  const Grid g({Grid::axis(-1.5, 1.5, 0.5)});
  const auto p = jessen::jessen_profile(ExpSum::sin_pi(), g, kNu);
  double worst = 0;
  for (long s = 0; s < g.size(); ++s) {
    const double y = g.axes[0].at(s);
    worst = std::max(worst, std::abs(p.values[s] - (oracle::pi * std::abs(y) - std::log(2.0))));
  }
  const double t = seconds_since(t0);
  return {worst < 1e-3 && t < 10, fmt("max error %.2e, %.2f s", worst, t)};
}

Outcome density_convergence() {
  const double lo[1] = {-1}, hi[1] = {1};
  const auto est = density_estimate(ExpSum::sin_pi(), lo, hi, kNu);
  bool decreasing = true;
  for (std::size_t k = 1; k < est.cauchy.size(); ++k) decreasing = decreasing && est.cauchy[k] < est.cauchy[k - 1];
  return {decreasing && std::abs(est.value - 1.0) <= 0.02,
          fmt("final %.5f, cauchy decreasing %g", est.value, decreasing ? 1 : 0)};
}

Outcome riesz_consistency() {
  const Grid g({Grid::axis(-0.5, 0.5, 0.05)});
  const auto p = jessen::jessen_profile(ExpSum::sin_pi(), g, kNu);
  const auto mu = jessen::riesz_measure(p, {Box{{-0.5}, {0.55}}});
  const double lo[1] = {-0.5}, hi[1] = {0.5};
  const double density = density_estimate(ExpSum::sin_pi(), lo, hi, kNu).value;
  const double rel = std::abs(mu.total() - density) / density;
  return {rel < 0.02, fmt("Riesz mass %.6f, density %.6f, rel %.2e", mu.total(), density, rel)};
}

Outcome chain_counterexample() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto map = counterexample::build_counterexample_map(40);
  const std::vector<int> primes = {2, 7, 17, 37};
  std::vector<RealVec> ts;
  for (int p : primes) ts.push_back({static_cast<double>(p), 0.0});
  const auto w = ap_chain_witness(map, ts, 1.0);
  bool ok = w.verdict == "unbounded-trend";
  std::string masses;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    ok = ok && w.masses[i] >= 2 * primes[i] - 1 && (i == 0 || w.masses[i] > w.masses[i - 1]);
    masses += std::to_string(w.masses[i]) + " ";
  }
  const double t = seconds_since(t0);
  return {ok && t < 60, "masses " + masses + "verdict " + w.verdict + fmt(", %.2f s", t)};
}

Outcome trace_counterexample() {
  const auto u = PotentialField::registered("trace_counterexample");
  const Current f = ddc(u);
  const std::vector<double> c(4, 0.0);
  const auto tr = TestForm::trace(2, 1, c, 0.45);
  const auto mono = TestForm::monomial(2, {0}, {1}, c, 0.45, [](std::span<const cplx> z) { return std::conj(z[1]); });
  double lo = 1e300, hi = -1e300;
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b) {
      const double t[2] = {static_cast<double>(a), static_cast<double>(b)};
      const double v = pair_with_form(f, tr, t).real();
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  const double variation = (hi - lo) / std::abs(hi);
  const double t0[2] = {0, 0}, t4[2] = {0, 4};
  const double decay = std::abs(pair_with_form(f, mono, t4)) / std::abs(pair_with_form(f, mono, t0));
  bool det_ok = true;
  for (double x2 = -6; x2 <= 6 + 1e-12; x2 += 0.05)
    for (double y2 = -0.49; y2 <= 0.49 + 1e-12; y2 += 0.01) {
      const cplx z[2] = {0.0, cplx(x2, y2)};
      const auto l = levy_form(u, z);
      det_ok = det_ok && (l[0] * l[3] - l[1] * l[2]).real() > 0;
    }
  double sup_err = 0;
  for (double y2 : {0.0, 0.2, 0.4})
    sup_err = std::max(sup_err, std::abs(trace_bracket_sup(y2, 6, 1e-3) - 0.5 * std::exp(4 * y2 * y2 - 1)));
  return {variation < 1e-2 && decay < 1e-3 && det_ok && sup_err < 1e-3,
          fmt("variation %.2e, decay %.2e, sup error %.2e", variation, decay, sup_err) +
              (det_ok ? ", det > 0" : ", det fails")};
}

ObstructionMatrix obstruction_of(const std::string& name) {
  const Grid g({Grid::axis(-0.2, 0.2, 0.2), Grid::axis(-0.2, 0.2, 0.2)});
  const auto mc = mean_current(ddc(PotentialField::registered(name)), g, {5, 10}, 1e-3, 4);
  std::vector<std::vector<cplx>> theta;
  for (long s = 0; s < g.size(); ++s)
    theta.push_back({mc.mean.at(s, 0, 0), mc.mean.at(s, 0, 1), mc.mean.at(s, 1, 0), mc.mean.at(s, 1, 1)});
  return jessen::obstruction_constants(theta, 2);
}

Outcome obstruction() {
  // Levy matrix of 4(x1^2+y1^2) + 4(x1 y2 - x2 y1) is [[4, 2i], [-2i, 0]]: Im theta_12 = 2
  const auto z = obstruction_of("ztilde");
  const auto y = obstruction_of("y_quadratic");
  const double zc = z.at(0, 1);
  const bool ok = std::abs(zc - 2.0) < 1e-6 && z.residuals[1] < 1e-6 && !z.realizable_candidate &&
                  std::abs(y.at(0, 1)) < 1e-12 && y.realizable_candidate;
  return {ok, fmt("c12(ztilde) %.9f residual %.1e, c12(y-only) %.1e", zc, z.residuals[1], y.at(0, 1))};
}

Outcome pl_roundtrip() {
  std::mt19937_64 rng(20261014);
  std::uniform_int_distribution<int> nterms(1, 5), num(1, 4), den(1, 3);
  std::uniform_real_distribution<double> hh(-1.1, 1.1), lin(-1, 1);
  const Grid dense({Grid::axis(-1.5, 1.5, 0.005)});
  const Grid coarse({Grid::axis(-1.5, 1.5, 0.05)});
  double worst_gamma = 0, worst_dev = 0;
  bool count_ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    PLConvex a;
    a.n = 1;
    a.grad = {lin(rng)};
    a.offset = lin(rng);
    const int k = nterms(rng);
    while (static_cast<int>(a.terms.size()) < k) {
      const double h = hh(rng);
      bool clash = false;
      for (const auto& t : a.terms) clash = clash || std::abs(t.h - h) < 0.2;
      if (!clash) a.terms.push_back({2 * oracle::pi * num(rng) / den(rng), {1.0}, h});
    }
    std::vector<double> v;
    for (long s = 0; s < dense.size(); ++s) v.push_back(pldiv::pl_eval(a, dense.point(s)));
    auto d = pldiv::pl_decompose(jessen::profile_from_values(dense, v), 1);
    auto ta = a.terms;
    const auto by_h = [](const Hinge& x, const Hinge& y) { return x.h < y.h; };
    std::sort(ta.begin(), ta.end(), by_h);
    std::sort(d.terms.begin(), d.terms.end(), by_h);
    if (d.terms.size() != ta.size()) {
      count_ok = false;
      continue;
    }
    for (std::size_t q = 0; q < ta.size(); ++q) worst_gamma = std::max(worst_gamma, std::abs(d.terms[q].gamma - ta[q].gamma));
    const auto r = pldiv::realize_divisor(a, 1);
    worst_dev = std::max(worst_dev, pldiv::verify_realization(a, r.f, coarse, {20, 40}));
  }
  return {count_ok && worst_gamma < 1e-9 && worst_dev < 5e-3,
          fmt("worst gamma error %.2e, worst deviation %.2e", worst_gamma, worst_dev)};
}

Outcome winding_integrality() {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2, 2), c(1.0, 5.0), w(0.3, 2.5);
  double worst = 0;
  int rects = 0;
  bool doubling = true;
  while (rects < 50) {
    std::vector<oracle::SineFactor> fs;
    const int k = 1 + rects % 3;
    for (int q = 0; q < k; ++q) fs.push_back({c(rng), {u(rng), 0.3 * u(rng)}});
    const double x0 = u(rng), y0 = 0.5 * u(rng);
    const Rect r{x0, x0 + w(rng), y0, y0 + 0.6 * w(rng)};
    const auto f = oracle::product(fs);
    double wn;
    try {
      wn = winding_number(Holo1D::from(f), r);
    } catch (const NumericError&) {
      continue;  // contour through a zero: draw another rectangle
    }
    worst = std::max(worst, std::abs(wn - std::round(wn)));
    const auto a = zeros_in_rectangle(f, r), b = zeros_in_rectangle(f * f, r);
    doubling = doubling && b.total_mass == 2 * a.total_mass && a.points.size() == b.points.size();
    for (std::size_t i = 0; doubling && i < a.points.size(); ++i) doubling = b.points[i].mult == 2 * a.points[i].mult;
    ++rects;
  }
  return {worst < 1e-2 && doubling, fmt("worst distance to an integer %.2e, doubling %g", worst, doubling ? 1 : 0)};
}

Outcome zero_density_property() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> c(1.0, 4.0), x(-1, 1), side(0.2, 1.0);
  int cases = 0;
  bool ok = true;
  for (int trial = 0; trial < 20; ++trial) {
    // zero lines at Im = s_k; G' placed strictly above all of them
    std::vector<oracle::SineFactor> fs;
    double top = -1e300;
    for (int q = 0; q < 2; ++q) {
      fs.push_back({c(rng), {x(rng), 0.5 * x(rng)}});
      top = std::max(top, fs.back().s.imag());
    }
    const double lo[1] = {top + 0.1 + 0.2 * side(rng)}, hi[1] = {lo[0] + side(rng)};
    const auto f = oracle::product(fs);
    const auto est = density_estimate(f, lo, hi, {10, 20});
    if (!(est.value < 1e-6)) continue;
    ++cases;
    const auto s = zeros_in_rectangle(f, Rect{-20, 20, lo[0], hi[0]});
    ok = ok && s.total_mass == 0;
  }
  const double lo[1] = {-1}, hi[1] = {1};
  if (density_estimate(EmptyDivisor{}, lo, hi, {10}).value < 1e-6) {
    ++cases;
    ok = ok && zeros_in_rectangle(ExpSum::exponential(2.0, {1.5}), Rect{-20, 20, -1, 1}).total_mass == 0;
  }
  return {ok && cases > 0, fmt("%g zero-density cases, all searches empty %g", cases, ok ? 1 : 0)};
}

Outcome bohr_exactness() {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> coef(-1, 1), fr(-3, 3), yy(-0.5, 0.5);
  std::uniform_int_distribution<int> nterms(1, 4);
  double worst_ratio = 0;
  bool ok = true;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 2;
    std::vector<Term> terms;
    for (int k = nterms(rng); k > 0; --k) {
      RealVec f(n);
      for (auto& v : f) v = fr(rng);
      terms.push_back({{coef(rng), coef(rng)}, f});
    }
    terms.push_back({{coef(rng), coef(rng)}, RealVec(n, 0.0)});
    const ExpSum f(n, terms);
    std::vector<double> y(n);
    for (auto& v : y) v = yy(rng);
    const cplx c0 = apcore::bohr_mean(f, y, apcore::MeanMode::exact).value;
    for (double nu : {10.0, 100.0}) {
      const auto r = apcore::bohr_mean(f, y, apcore::MeanMode::numeric, nu);
      const double dev = std::abs(r.value - c0);
      ok = ok && dev < r.error_bound;
      worst_ratio = std::max(worst_ratio, dev / r.error_bound);
    }
  }
  return {ok, fmt("worst deviation / bound %.3f", worst_ratio)};
}

Outcome reconstruct() {
  DensityMeasure atoms;
  atoms.bins = {{{-0.6}, {-0.6}}, {{0.1}, {0.1}}, {{0.45}, {0.45}}};
  atoms.masses = {0.5, 1.0, 2.0};
  const auto r1 = jessen::reconstruct_convex(atoms, 1, Grid({Grid::axis(-1, 1, 0.05)}));
  const auto disk = jessen::disk_measure(0, 0, 0.5, 1.0, -1, 1, -1, 1, 0.1, kRieszNormalization);
  const Grid g2({Grid::axis(-0.99375, 0.99375, 0.0125), Grid::axis(-0.99375, 0.99375, 0.0125)});
  const auto r2 = jessen::reconstruct_convex(disk, 2, g2);
  return {r1.laplacian_l1_error < 0.02 && r2.laplacian_l1_error < 0.02,
          fmt("atomic L1 %.2e (convex %g), disk L1 %.2e", r1.laplacian_l1_error, r1.convex ? 1 : 0,
              r2.laplacian_l1_error)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"sine Jessen function", sine_jessen},
      {"zero density convergence", density_convergence},
      {"Riesz mass equals zero density", riesz_consistency},
      {"chain counterexample census", chain_counterexample},
      {"trace counterexample", trace_counterexample},
      {"obstruction constants", obstruction},
      {"PL decompose and realize roundtrip", pl_roundtrip},
      {"argument principle integrality", winding_integrality},
      {"zero density implies no zeros", zero_density_property},
      {"Bohr mean exactness", bohr_exactness},
      {"reconstruct_convex", reconstruct},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
