#pragma once

#include <complex>
#include <limits>
#include <span>
#include <vector>

namespace apharm {

using cplx = std::complex<double>;
using RealVec = std::vector<double>;
using CplxVec = std::vector<cplx>;

struct Term {
  cplx coef;
  RealVec freq;
};

/// Finite exponential sum  f(z) = sum_k c_k exp(i <lambda_k, z>)  on C^n.
///
/// Terms are kept in lexicographic frequency order with pairwise distinct
/// frequencies; the constructor merges duplicates. Every value is an entire
/// function, almost periodic in every tube domain.
class ExpSum {
public:
  ExpSum() = default;
  ExpSum(int n, std::vector<Term> terms);

  static ExpSum constant(int n, cplx c);
  /// c * exp(i <lambda, z>)
  static ExpSum exponential(cplx c, RealVec freq);
  /// sin(pi z) in one variable: (-i/2) e^{i pi z} + (i/2) e^{-i pi z}.
  static ExpSum sin_pi();
  /// sin(c (<lambda,z> - shift)) with real c, real unit lambda, complex shift.
  static ExpSum shifted_sine(double c, const RealVec& lambda, cplx shift);

  int dim() const { return n_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  bool is_zero_expression() const;

  cplx operator()(std::span<const cplx> z) const;
  cplx operator()(cplx z) const;  // n == 1 shorthand
  /// d/dz_axis as an ExpSum.
  ExpSum derivative(int axis) const;

  ExpSum operator*(const ExpSum& other) const;
  ExpSum operator+(const ExpSum& other) const;
  ExpSum scaled(cplx s) const;

  /// sum |c_k|
  double coef_l1() const;
  /// largest |lambda_kj| over all terms, per axis
  RealVec max_abs_freq() const;

private:
  void canonicalize();

  int n_ = 0;
  std::vector<Term> terms_;
};

/// Axis-aligned base box G of the tube T_G = R^n + iG.
struct TubeDomain {
  int n = 0;
  RealVec base_lo;
  RealVec base_hi;

  TubeDomain() = default;
  TubeDomain(RealVec lo, RealVec hi);
  bool contains(std::span<const double> y) const;
};

/// Truncation Pi_{t,E} = { |x|_inf < t, y in E } with E a sub-box.
struct Truncation {
  double t = 0;
  RealVec e_lo;
  RealVec e_hi;
};

struct TranslationCertificate {
  double epsilon = 0;
  double window_half_length = std::numeric_limits<double>::infinity();
  bool relatively_dense = false;  // false <=> window_half_length is the +inf flag
  struct Witness {
    RealVec tau;
    double deviation;
  };
  std::vector<Witness> witnesses;
  RealVec scan_lo;
  RealVec scan_hi;
  double step = 0;
};

namespace apcore {

cplx eval(const ExpSum& f, std::span<const cplx> z);
ExpSum translate(const ExpSum& f, std::span<const double> tau);

enum class MeanMode { exact, numeric };

struct MeanResult {
  cplx value;
  double error_bound = 0;  // a-priori; 0 in exact mode
};

MeanResult bohr_mean(const ExpSum& f, std::span<const double> y, MeanMode mode, double nu = 0);

struct FourierCoefficient {
  cplx at_height;  // a_lambda(y)
  cplx tube;       // c_lambda = a_lambda(y) e^{<lambda,y>}
};

FourierCoefficient fourier_coefficient(const ExpSum& f, std::span<const double> lambda,
                                       std::span<const double> y);

/// Rigorous coefficient bound of sup over T_{G'} of |f(z+tau) - f(z)|.
double translation_deviation_bound(const ExpSum& f, std::span<const double> tau,
                                   std::span<const double> gp_lo, std::span<const double> gp_hi);

TranslationCertificate epsilon_translation_set(const ExpSum& f, double epsilon,
                                               std::span<const double> gp_lo,
                                               std::span<const double> gp_hi,
                                               std::span<const double> scan_lo,
                                               std::span<const double> scan_hi, double step);

/// Cells per axis for the box midpoint rule on |x_j| < nu: at least 16 samples
/// per period of the fastest component along that axis.
std::vector<long> midpoint_resolution(const ExpSum& f, double nu);

}  // namespace apcore
}  // namespace apharm
