#pragma once

// Data-parallel quadrature kernels.
//
// Every kernel has a serial reference loop and an OpenMP loop over the same
// per-cell routine. Cell results land in a buffer indexed by cell and are
// reduced with pairwise_sum, so both variants return bit-identical values.

#include <functional>
#include <span>
#include <vector>

#include "apharm/expsum.hpp"

namespace apharm::kernels {

enum class Exec { serial, parallel };

/// Composite midpoint mean of f(x+iy) over the box |x_j| < nu with
/// cells[j] equal cells along axis j.
cplx box_mean(const ExpSum& f, std::span<const double> y, double nu,
              std::span<const long> cells, Exec exec = Exec::parallel);

struct LogMeanResult {
  double value = 0;
  bool flagged = false;      // a cell could not be integrated (|f| underflow)
  long refined_cells = 0;    // bisections triggered by the singularity test
  long singular_cells = 0;   // depth-limit cells integrated with the local model
};

/// (1/(2nu))^n * integral over |x|_inf < nu of log|f(x+iy)| dx.
LogMeanResult log_modulus_mean(const ExpSum& f, std::span<const double> y, double nu,
                               Exec exec = Exec::parallel);

/// Integral of log|g(x)| over [a, b] for a one-variable exponential sum g,
/// with singularity-aware refinement. Exposed for testing.
LogMeanResult log_abs_line_integral(const ExpSum& g, double a, double b, Exec exec = Exec::serial);

/// Uniform-density box of a planar measure.
struct DensityBox {
  double lo[2];
  double hi[2];
  double density;  // Laplacian mass per unit area
};

/// (1/2pi) * integral of log|zeta - y| over union of boxes with the given
/// densities, evaluated at every node (row-major, axis 0 slowest).
std::vector<double> log_potential_2d(std::span<const DensityBox> boxes,
                                     std::span<const double> axis0,
                                     std::span<const double> axis1, Exec exec = Exec::parallel);

/// Closed form of the integral of log|zeta| over [u0,u1]x[v0,v1].
double log_box_integral(double u0, double u1, double v0, double v1);

/// Trapezoid sum of integrand over the grid {lo_j + i*h, i = 0..count_j-1} in
/// R^d, times h^d. The integrand must vanish on the grid boundary.
cplx grid_integral(const std::function<cplx(std::span<const double>)>& integrand,
                   std::span<const double> lo, std::span<const long> count, double h,
                   Exec exec = Exec::parallel);

}  // namespace apharm::kernels
