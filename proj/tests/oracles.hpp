#pragma once

// Closed forms and brute-force references used by the tests. Nothing here
// calls into the library beyond ExpSum construction.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include "apharm/expsum.hpp"

namespace oracle {

using apharm::cplx;
constexpr double pi = std::numbers::pi;

// x-mean of log|sin(c(<lambda,z> - s))| for unit lambda and c > 0.
inline double sine_jessen(double c, const std::vector<double>& lambda, cplx s, const std::vector<double>& y) {
  double ly = 0;
  for (std::size_t j = 0; j < y.size(); ++j) ly += lambda[j] * y[j];
  return c * std::abs(ly - s.imag()) - std::log(2.0);
}

struct SineFactor {
  double c;
  cplx s;
};

// Zeros of sin(c(z - s)) in one variable: s + k pi / c.
inline std::vector<cplx> sine_zeros(const SineFactor& f, double x0, double x1) {
  std::vector<cplx> z;
  const double step = pi / f.c;
  for (long k = static_cast<long>(std::floor((x0 - f.s.real()) / step)) - 1;
       f.s.real() + k * step <= x1 + step; ++k)
    z.push_back(f.s + static_cast<double>(k) * step);
  return z;
}

inline apharm::ExpSum product(const std::vector<SineFactor>& fs) {
  apharm::ExpSum f = apharm::ExpSum::constant(1, 1.0);
  for (const auto& s : fs) f = f * apharm::ExpSum::shifted_sine(s.c, {1.0}, s.s);
  return f;
}

// Composite Simpson on [a, b] with n (even) panels.
inline double simpson(const std::function<double(double)>& g, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = g(a) + g(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
  return s * h / 3.0;
}

inline double bump(double s) { return s < 1 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

// Integral of bump(|x|/r) over R^d, by the radial formula.
inline double bump_integral(int d, double r) {
  const double sphere = d == 2 ? 2 * pi : d == 4 ? 2 * pi * pi : 0.0;
  return sphere * std::pow(r, d) * simpson([&](double s) { return bump(s) * std::pow(s, d - 1); }, 0, 1);
}

inline std::vector<int> divisors_in(long m, int lo, int hi) {
  std::vector<int> d;
  for (int k = lo; k <= hi; ++k)
    if (m % k == 0) d.push_back(k);
  return d;
}

}  // namespace oracle
