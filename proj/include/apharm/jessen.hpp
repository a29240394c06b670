#pragma once

#include <numbers>
#include <string>
#include <vector>

#include "apharm/expsum.hpp"
#include "apharm/grid.hpp"
#include "apharm/kernels.hpp"

namespace apharm {

/// Density of the zero divisor per unit Laplacian mass of the Jessen function:
/// mu = Laplacian(A) / (2 pi). Pinned on sin(pi z): A = pi|y| - ln 2 carries
/// Laplacian mass 2 pi at y = 0 and the zeros have density 1.
inline constexpr double kRieszNormalization = 1.0 / (2.0 * std::numbers::pi);

struct JessenProfile {
  Grid grid;
  std::vector<double> values;                // A at the last nu
  std::vector<double> error;                 // |A_nu_last - A_nu_prev| per sample
  std::vector<char> flagged;                 // quadrature could not resolve |f| there
  std::vector<double> nu_schedule;
  std::vector<std::vector<double>> history;  // history[k][sample]: value at nu_schedule[k]

  double value_range() const;
};

struct DensityMeasure {
  std::vector<Box> bins;
  std::vector<double> masses;
  double normalization = kRieszNormalization;  // masses = normalization * Laplacian mass

  double total() const;
  /// Laplacian mass of bin i.
  double laplacian_mass(std::size_t i) const { return masses[i] / normalization; }
};

struct ObstructionMatrix {
  int n = 0;
  std::vector<double> c;          // row-major n x n, antisymmetric
  std::vector<double> residuals;  // max deviation of Im theta_jk from c_jk over the samples
  double scale = 0;               // max |theta_jk| over samples
  double tolerance = 0;           // tol_c
  bool realizable_candidate = false;

  double at(int j, int k) const { return c[j * n + k]; }
};

struct ConvexRecovery {
  Grid grid;
  std::vector<double> potential;   // A1
  std::vector<double> correction;  // A2
  std::vector<double> combined;    // A1 + A2
  bool convex = false;             // discrete convexity along every axis
  double laplacian_l1_error = 0;   // |Riesz(combined) - mu|_1 / |mu|_1 on the input bins (or a coarse partition)
};

namespace jessen {

JessenProfile jessen_profile(const ExpSum& f, const Grid& y_grid, std::vector<double> nu_schedule,
                             kernels::Exec exec = kernels::Exec::parallel);

/// Profile from closed-form values (no quadrature), e.g. for oracle inputs.
JessenProfile profile_from_values(const Grid& grid, std::vector<double> values);

enum class Precondition { convex, subharmonic };

/// Smallest second difference along any axis (convex) or smallest discrete
/// Laplacian numerator (subharmonic) over the interior nodes.
double min_curvature(const JessenProfile& p, Precondition pre);
double convexity_tolerance(const JessenProfile& p);

DensityMeasure riesz_measure(const JessenProfile& p, const std::vector<Box>& bins,
                             double normalization = kRieszNormalization,
                             Precondition pre = Precondition::convex);

/// Redistribute a measure onto other bins (atoms go whole, uniform bins by overlap).
DensityMeasure rebin(const DensityMeasure& mu, const std::vector<Box>& bins);

/// Relative L1 distance sum|a_i - b_i| / sum|b_i| of Laplacian masses on shared bins.
double l1_relative(const DensityMeasure& a, const DensityMeasure& b);

ConvexRecovery reconstruct_convex(const DensityMeasure& mu, int base_dim, const Grid& out_grid,
                                  kernels::Exec exec = kernels::Exec::parallel);

/// Uniform Laplacian mass `mass` on the disk |y - c| < r, binned on square bins
/// of side `bin` tiling [lo0,hi0) x [lo1,hi1).
DensityMeasure disk_measure(double c0, double c1, double r, double mass, double lo0, double hi0,
                            double lo1, double hi1, double bin, double normalization = 1.0);

/// theta[s] is the n x n coefficient matrix (row-major) at sample s.
ObstructionMatrix obstruction_constants(const std::vector<std::vector<cplx>>& theta, int n,
                                        double hermitian_tol = 1e-9);

}  // namespace jessen
}  // namespace apharm
