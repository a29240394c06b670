#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "apharm/expsum.hpp"
#include "apharm/pldiv.hpp"

namespace apharm {

/// Evaluable holomorphic function of one variable with its derivative.
/// `bandwidth` bounds the spatial frequency and sets the contour sampling.
struct Holo1D {
  std::function<cplx(cplx)> f;
  std::function<cplx(cplx)> df;
  double bandwidth = 1;

  static Holo1D from(const ExpSum& g);
};

struct Rect {
  double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
};

struct Window {
  std::string shape;  // "rectangle" or "ball"
  std::vector<double> lo, hi;  // rectangle: {x0, y0}, {x1, y1}; ball: centre (re, im per axis), {radius}
};

struct ZeroPoint {
  std::vector<cplx> z;
  int mult = 1;
};

struct DivisorSample {
  Window window;
  std::vector<ZeroPoint> points;
  long total_mass = 0;
  int dilations = 0;        // contour perturbations applied to the outer rectangle
  long cells_examined = 0;
};

/// Zeros of f inside rect by the argument principle.
DivisorSample zeros_in_rectangle(const Holo1D& f, const Rect& rect);
DivisorSample zeros_in_rectangle(const ExpSum& f, const Rect& rect);

/// (1/2 pi i) * contour integral of f'/f around rect; throws NumericError when
/// the contour passes within a sample spacing of a zero.
double winding_number(const Holo1D& f, const Rect& rect);

struct EmptyDivisor {};
using DivisorSource = std::variant<ExpSum, HyperplaneDivisor, EmptyDivisor>;

struct DensityEstimate {
  std::vector<double> nu_schedule;
  std::vector<double> values;       // V(Pi_{nu,G'}) / (2 nu)^n
  std::vector<double> cauchy;       // |values[k+1] - values[k]|
  double value = 0;
  bool boundary_flag = false;       // zeros within h of dG'
};

DensityEstimate density_estimate(const DivisorSource& src, std::span<const double> gp_lo,
                                 std::span<const double> gp_hi, const std::vector<double>& nu_schedule,
                                 double h = 0.05);

/// Truncated f = (f1, f2) with f1 = sin(pi(z1-2)/5), f2 = sum_k a_k g_k(z1) sin(pi k z2).
struct CounterexampleMap {
  int K = 2;
  std::vector<double> log_a;  // log_a[k] for k = 2..K (entries 0, 1 unused)

  double a(int k) const;
  cplx f1(cplx z1) const;
  cplx f2(cplx z1, cplx z2) const;
};

namespace counterexample {

/// sin(pi zeta) / sin(pi zeta / k) with the removable singularities filled in.
cplx g(int k, cplx zeta);
/// g_k at an integer, exactly.
double g_integer(int k, long m);

CounterexampleMap build_counterexample_map(int K);

/// Common zeros in the open ball |z - centre| < radius.
DivisorSample map_zero_census(const CounterexampleMap& map, std::span<const cplx> centre, double radius);

/// Primes p = 2 mod 5 up to pmax.
std::vector<int> primes_2_mod_5(int pmax);

}  // namespace counterexample

struct ChainWitness {
  std::vector<long> masses;
  long max_mass = 0;
  std::string verdict;  // "bounded" or "unbounded-trend"
};

using WitnessSource = std::variant<CounterexampleMap, ExpSum, EmptyDivisor>;

ChainWitness ap_chain_witness(const WitnessSource& src, const std::vector<RealVec>& translations,
                              double bump_radius);

}  // namespace apharm
