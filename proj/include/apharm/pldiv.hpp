#pragma once

#include <span>
#include <string>
#include <vector>

#include "apharm/expsum.hpp"
#include "apharm/grid.hpp"
#include "apharm/jessen.hpp"

namespace apharm {

/// gamma * (<y, lambda> - h)^+
struct Hinge {
  double gamma = 0;
  RealVec lambda;
  double h = 0;
};

/// sum_j gamma_j (<y,lambda_j> - h_j)^+ + <grad, y> + offset
struct PLConvex {
  int n = 1;
  std::vector<Hinge> terms;
  RealVec grad;
  double offset = 0;
  double residual = 0;  // sup fit error when produced by pl_decompose
};

/// alpha = start + k * step for k = 0..count-1, or all k in Z when count < 0.
struct Progression {
  double start = 0;
  double step = 1;
  long count = -1;
  int mult = 1;

  bool infinite() const { return count < 0; }
};

/// Planes <z, lambda> - i h - alpha = 0 for alpha in the progressions.
struct PlaneFamily {
  RealVec lambda;
  double h = 0;
  std::vector<Progression> progressions;

  /// (alpha, multiplicity) with lo < alpha < hi, increasing.
  std::vector<std::pair<double, int>> alphas(double lo, double hi) const;
};

struct HyperplaneDivisor {
  int n = 1;
  std::vector<PlaneFamily> families;
};

struct Realization {
  HyperplaneDivisor divisor;
  ExpSum f;
  std::vector<ExpSum> factors;  // one sine per hinge, then the exponential factor
};

namespace pldiv {

double pl_eval(const PLConvex& a, std::span<const double> y);

/// Merge hinges sharing a plane and orient every lambda so that its first
/// nonzero component is positive (the flip moves into the linear part).
PLConvex canonical(const PLConvex& a);

/// Hinge decomposition of sampled values; base_dim 1 or 2.
PLConvex pl_decompose(const JessenProfile& samples, int base_dim);
PLConvex pl_decompose(const PLConvex& exact);

/// Largest Q accepted for a realizable density P/Q.
inline constexpr long kMaxDenominator = 1000;

Realization realize_divisor(const PLConvex& a, int n);

/// min over affine l of max_s |v_s - l(y_s)| on the grid nodes.
double best_affine_sup(const Grid& grid, const std::vector<double>& v);

/// Sup deviation of jessen_profile(f) from A on the grid, up to the best
/// (minimax) affine function.
double verify_realization(const PLConvex& a, const ExpSum& f, const Grid& grid,
                          const std::vector<double>& nu_schedule,
                          kernels::Exec exec = kernels::Exec::parallel);

}  // namespace pldiv
}  // namespace apharm
