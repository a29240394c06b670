#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "apharm/error.hpp"
#include "apharm/zeros.hpp"

namespace apharm {

namespace {

using std::numbers::pi;

// sin(pi x) and cos(pi x) with exact argument reduction; integers give exact zeros.
double sinpi(double x) {
  double r = std::remainder(x, 2.0);
  if (r > 0.5) r = 1.0 - r;
  if (r < -0.5) r = -1.0 - r;
  return std::sin(pi * r);
}

double cospi(double x) {
  const double a = std::abs(std::remainder(x, 2.0));
  return sinpi(0.5 - a);
}

cplx csinpi(cplx z) {
  return {sinpi(z.real()) * std::cosh(pi * z.imag()), cospi(z.real()) * std::sinh(pi * z.imag())};
}

// sin(u)/u from eight Taylor terms
cplx sinc_series(cplx u) {
  const cplx u2 = u * u;
  cplx term = 1, sum = 1;
  for (int n = 1; n < 8; ++n) {
    term *= -u2 / static_cast<double>((2 * n) * (2 * n + 1));
    sum += term;
  }
  return sum;
}

// log sup over one period of |sin(pi k (x + 2i))|
double log_sup_sine(int k) {
  const double t = 2 * pi * k;
  const double log_cosh = t + std::log1p(std::exp(-2 * t)) - std::log(2.0);
  const double th = std::tanh(t);
  constexpr int kSamples = 256;
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < kSamples; ++j) {
    const double x = 2.0 * j / (kSamples * static_cast<double>(k));
    const double s = sinpi(k * x), c = cospi(k * x);
    best = std::max(best, log_cosh + 0.5 * std::log(s * s + c * c * th * th));
  }
  return best;
}

// log sup over one period of |g_k(x + 2i)|; |g_k| has period k.
double log_sup_g(int k) {
  const int samples = 256 * k;
  double best = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < samples; ++j) {
    const double x = static_cast<double>(k) * j / samples;
    best = std::max(best, std::log(std::abs(counterexample::g(k, cplx{x, 2.0}))));
  }
  return best;
}

}  // namespace

double CounterexampleMap::a(int k) const {
  require(k >= 2 && k <= K, "CounterexampleMap: index out of range");
  return std::exp(log_a[k]);
}

cplx CounterexampleMap::f1(cplx z1) const { return csinpi((z1 - 2.0) / 5.0); }

cplx CounterexampleMap::f2(cplx z1, cplx z2) const {
  cplx s = 0;
  for (int k = 2; k <= K; ++k) s += a(k) * counterexample::g(k, z1) * csinpi(static_cast<double>(k) * z2);
  return s;
}

namespace counterexample {

cplx g(int k, cplx zeta) {
  require(k >= 1, "g_k: k must be positive");
  const double kd = k;
  const double j = std::round(zeta.real() / kd);
  const cplx delta = zeta - kd * j;
  if (std::abs(delta) < 1e-3) {
    const long jl = static_cast<long>(j);
    const double sign = ((static_cast<long>(k - 1) * jl) % 2 == 0) ? 1.0 : -1.0;
    return sign * kd * sinc_series(pi * delta) / sinc_series(pi * delta / kd);
  }
  return csinpi(zeta) / csinpi(zeta / kd);
}

double g_integer(int k, long m) {
  require(k >= 1, "g_k: k must be positive");
  if (m % k != 0) return 0;
  return ((m - m / k) % 2 == 0) ? k : -k;
}

CounterexampleMap build_counterexample_map(int K) {
  require(K >= 2, "build_counterexample_map: K must be at least 2");
  CounterexampleMap map;
  map.K = K;
  map.log_a.assign(K + 1, 0.0);
  for (int k = 2; k <= K; ++k)
    map.log_a[k] = std::log(0.5) - 2 * std::log(static_cast<double>(k)) - log_sup_g(k) - log_sup_sine(k);
  return map;
}

DivisorSample map_zero_census(const CounterexampleMap& map, std::span<const cplx> centre, double radius) {
  require(centre.size() == 2, "map_zero_census: centre must lie in C^2");
  require(radius > 0, "map_zero_census: radius must be positive");
  require(std::abs(centre[0].imag()) + radius < 2 && std::abs(centre[1].imag()) + radius < 2,
          "map_zero_census: ball leaves the tube |Im z| < 2");
  DivisorSample out;
  out.window = {"ball", {centre[0].real(), centre[0].imag(), centre[1].real(), centre[1].imag()}, {radius}};
  const double inner = radius * (1 - 1e-9);
  const double c1 = centre[0].real();
  const long n_lo = static_cast<long>(std::ceil((c1 - radius - 2) / 5.0));
  const long n_hi = static_cast<long>(std::floor((c1 + radius - 2) / 5.0));
  for (long n = n_lo; n <= n_hi; ++n) {
    const long m = 5 * n + 2;
    const double d1 = std::norm(cplx(static_cast<double>(m), 0) - centre[0]);
    if (d1 >= inner * inner) continue;
    const double rho = std::sqrt(radius * radius - d1);
    double top = -std::numeric_limits<double>::infinity();
    for (int k = 2; k <= map.K; ++k)
      if (g_integer(k, m) != 0) top = std::max(top, map.log_a[k]);
    if (!std::isfinite(top))
      throw NumericError("map_zero_census: plane z1 = " + std::to_string(m) +
                         " lies in the zero set of the truncated map");
    // z2 -> f2(m, z2), rescaled by the largest coefficient
    ExpSum slice;
    bool first = true;
    for (int k = 2; k <= map.K; ++k) {
      const double gk = g_integer(k, m);
      if (gk == 0) continue;
      const double scale = gk * std::exp(map.log_a[k] - top);
      const ExpSum term = ExpSum::shifted_sine(pi * k, {1.0}, 0.0).scaled(scale);
      slice = first ? term : slice + term;
      first = false;
    }
    const cplx c2 = centre[1];
    const auto found = zeros_in_rectangle(slice, Rect{c2.real() - rho, c2.real() + rho, c2.imag() - rho,
                                                      c2.imag() + rho});
    out.dilations = std::max(out.dilations, found.dilations);
    out.cells_examined += found.cells_examined;
    for (const auto& p : found.points) {
      const cplx z2 = p.z[0];
      if (d1 + std::norm(z2 - c2) < inner * inner)
        out.points.push_back({{cplx(static_cast<double>(m), 0), z2}, p.mult});
    }
  }
  for (const auto& p : out.points) out.total_mass += p.mult;
  return out;
}

std::vector<int> primes_2_mod_5(int pmax) {
  std::vector<int> out;
  for (int p = 2; p <= pmax; ++p) {
    bool prime = true;
    for (int d = 2; d * d <= p && prime; ++d) prime = p % d != 0;
    if (prime && p % 5 == 2) out.push_back(p);
  }
  return out;
}

}  // namespace counterexample
}  // namespace apharm
