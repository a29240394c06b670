#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "apharm/expsum.hpp"
#include "apharm/grid.hpp"
#include "apharm/kernels.hpp"

namespace apharm {

/// Real coordinates of z in C^n are ordered (x_1..x_n, y_1..y_n).
std::vector<double> real_coords(std::span<const cplx> z);
std::vector<cplx> complex_point(std::span<const double> r);

/// Potential u on C^n: a registered closed form with exact Levy matrix, or grid
/// samples differentiated by centred differences.
struct PotentialField {
  std::string id;
  int n = 2;
  std::function<double(std::span<const cplx>)> u;
  std::function<std::vector<cplx>(std::span<const cplx>)> levy;  // exact, row-major n x n
  double tube_half_width = std::numeric_limits<double>::infinity();  // declared tube |y_j| < w
  bool plurisubharmonic = false;

  Grid grid;  // sampled variant: axes over all 2n real coordinates
  std::vector<double> samples;

  bool sampled() const { return !samples.empty(); }

  /// "euclidean" |z|^2, "trace_counterexample" y1^2+y2^2+x1 Re e^{-z2^2},
  /// "ztilde" 4(x1^2+y1^2)+4(x1 y2-x2 y1), "ztilde_lattice" |z1 - i z2|^2,
  /// "y_quadratic" y1^2+y1 y2+y2^2.
  static PotentialField registered(const std::string& name);
  static std::vector<std::string> registered_names();
  static PotentialField from_samples(const Grid& grid, std::vector<double> values);
};

/// Mixed Wirtinger derivatives u_{j kbar} (row-major n x n). Under
/// dd^c = (i/2) d dbar this is the coefficient matrix of dd^c u.
std::vector<cplx> levy_form(const PotentialField& u, std::span<const cplx> z);

/// Increasing multi-indices of length m in {0..n-1}, lexicographic.
std::vector<std::vector<int>> multi_indices(int n, int m);

/// (m,m)-current F = (i/2)^m sum F_IJ dz_I1 ^ dzb_J1 ^ dz_I2 ^ dzb_J2 ...
/// given pointwise by its coefficient matrix over multi_indices(n, m).
struct Current {
  int n = 2;
  int m = 1;
  std::function<std::vector<cplx>(std::span<const cplx>)> coefficients;
  bool positive = false;
  double tube_half_width = std::numeric_limits<double>::infinity();
};

Current ddc(const PotentialField& u);
/// (dd^c u)^2 on C^2: single coefficient 2 det(u_{j kbar}).
Current ddc_squared(const PotentialField& u);

struct CurrentGrid {
  int n = 2;
  int m = 1;
  Grid grid;
  std::vector<int> roles;  // grid axis a samples real coordinate roles[a]
  std::vector<std::vector<int>> index_sets;
  std::vector<cplx> coef;  // [sample][I][J]
  std::string convention = "ddc=(i/2)d dbar";
  bool positive = false;

  std::size_t width() const { return index_sets.size(); }
  cplx at(long sample, std::size_t i, std::size_t j) const {
    return coef[(static_cast<std::size_t>(sample) * width() + i) * width() + j];
  }
};

CurrentGrid sample_current(const Current& f, const Grid& grid, std::vector<int> roles);

/// Max |F_IJ - conj F_JI| and the smallest eigenvalue bound check.
double hermitian_defect(const CurrentGrid& f);
bool positive_semidefinite(const CurrentGrid& f, double rel_tol = 1e-10);

/// Test form (i/2)^k phi(z) sum_w weight_w dz_K ^ dzb_L (interleaved), with
/// phi supported in the ball |z - centre| <= radius (real coordinates).
struct TestForm {
  int n = 2;
  int k = 1;
  struct Monomial {
    std::vector<int> K, L;
    cplx weight;
  };
  std::vector<Monomial> monomials;
  std::function<cplx(std::span<const double>)> phi;
  std::vector<double> centre;
  double radius = 0;

  /// phi * dz_K ^ dzb_L with phi = bump(|z - c| / r) * weight_fn(z)
  static TestForm monomial(int n, std::vector<int> K, std::vector<int> L, std::vector<double> centre, double radius,
                           std::function<cplx(std::span<const cplx>)> weight_fn = nullptr);
  /// phi * beta^k / k!, beta = dd^c |z|^2; F ^ Phi = phi * tr F * dm
  static TestForm trace(int n, int k, std::vector<double> centre, double radius);
};

/// exp(-1/(1-s^2)) for s < 1, else 0
double bump(double s);

/// Sign of dz_I1 ^ dzb_J1 ^ ... ^ dz_K1 ^ dzb_L1 ^ ... relative to
/// prod_j dz_j ^ dzb_j, or 0 when the product vanishes.
int wedge_sign(const std::vector<int>& I, const std::vector<int>& J, const std::vector<int>& K,
               const std::vector<int>& L);

/// Integral of F(z + t) ^ Phi(z) for a real translation t in R^n, trapezoid
/// rule with spacing h over the support of phi.
cplx pair_with_form(const Current& f, const TestForm& phi, std::span<const double> t, double h = 0.05,
                    kernels::Exec exec = kernels::Exec::parallel);

struct MeanCurrent {
  Grid y_grid;
  std::vector<double> nu_schedule;
  std::vector<std::vector<cplx>> history;  // history[k]: coefficients [sample][I][J] at nu_schedule[k]
  std::vector<double> cauchy;             // max coefficient change between successive nu
  bool x_independent = false;             // last change below tol
  CurrentGrid mean;                       // final average as a y-only CurrentGrid
};

/// x-box averages of every coefficient over |x_j| < nu at the y-grid nodes,
/// by the midpoint rule with `per_unit` cells per unit length.
MeanCurrent mean_current(const Current& f, const Grid& y_grid, const std::vector<double>& nu_schedule,
                         double tol = 1e-3, double per_unit = 4, kernels::Exec exec = kernels::Exec::parallel);

/// Discrete d-closedness defect of a (1,1) CurrentGrid: max of
/// |d_l F_jk - d_j F_lk| and |dbar_l F_jk - dbar_k F_jl| by centred differences.
double closedness_residual(const CurrentGrid& f);

/// max over x2 nodes of (x2^2 + y2^2) exp(-2 (x2^2 - y2^2))
double trace_bracket_sup(double y2, double x2_max, double dx);

}  // namespace apharm
