#include "apharm/expsum.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "apharm/error.hpp"
#include "apharm/kernels.hpp"
#include "apharm/summation.hpp"

namespace apharm {

namespace {

constexpr cplx I{0.0, 1.0};

cplx inner(const RealVec& lambda, std::span<const cplx> z) {
  cplx s = 0;
  for (std::size_t j = 0; j < lambda.size(); ++j) s += lambda[j] * z[j];
  return s;
}

double inner(const RealVec& lambda, std::span<const double> v) {
  double s = 0;
  for (std::size_t j = 0; j < lambda.size(); ++j) s += lambda[j] * v[j];
  return s;
}

bool is_zero_freq(const RealVec& f) {
  return std::all_of(f.begin(), f.end(), [](double v) { return v == 0.0; });
}

}  // namespace

ExpSum::ExpSum(int n, std::vector<Term> terms) : n_(n), terms_(std::move(terms)) {
  require(n > 0, "ExpSum: dimension must be positive");
  for (const auto& t : terms_)
    require(static_cast<int>(t.freq.size()) == n, "ExpSum: frequency length differs from n");
  canonicalize();
}

void ExpSum::canonicalize() {
  std::map<RealVec, cplx> merged;
  for (auto& t : terms_) merged[t.freq] += t.coef;
  terms_.clear();
  for (auto& [freq, coef] : merged)
    if (coef != cplx{0.0, 0.0}) terms_.push_back({coef, freq});
}

ExpSum ExpSum::constant(int n, cplx c) { return ExpSum(n, {{c, RealVec(n, 0.0)}}); }

ExpSum ExpSum::exponential(cplx c, RealVec freq) {
  const int n = static_cast<int>(freq.size());
  return ExpSum(n, {{c, std::move(freq)}});
}

ExpSum ExpSum::sin_pi() {
  using std::numbers::pi;
  return ExpSum(1, {{cplx{0, -0.5}, {pi}}, {cplx{0, 0.5}, {-pi}}});
}

ExpSum ExpSum::shifted_sine(double c, const RealVec& lambda, cplx shift) {
  // sin(u) = (e^{iu} - e^{-iu}) / 2i with u = c<lambda,z> - c*shift
  const int n = static_cast<int>(lambda.size());
  RealVec fp(n), fm(n);
  for (int j = 0; j < n; ++j) {
    fp[j] = c * lambda[j];
    fm[j] = -c * lambda[j];
  }
  const cplx ep = std::exp(-I * c * shift) / (2.0 * I);
  const cplx em = -std::exp(I * c * shift) / (2.0 * I);
  return ExpSum(n, {{ep, fp}, {em, fm}});
}

bool ExpSum::is_zero_expression() const { return terms_.empty(); }

cplx ExpSum::operator()(std::span<const cplx> z) const {
  require(static_cast<int>(z.size()) == n_, "eval: point dimension differs from ExpSum dimension");
  CplxVec vals;
  vals.reserve(terms_.size());
  for (const auto& t : terms_) vals.push_back(t.coef * std::exp(I * inner(t.freq, z)));
  return pairwise_sum(vals);
}

cplx ExpSum::operator()(cplx z) const { return (*this)(std::span<const cplx>(&z, 1)); }

ExpSum ExpSum::derivative(int axis) const {
  require(axis >= 0 && axis < n_, "derivative: axis out of range");
  std::vector<Term> out;
  for (const auto& t : terms_) out.push_back({I * t.freq[axis] * t.coef, t.freq});
  return ExpSum(n_, std::move(out));
}

ExpSum ExpSum::operator*(const ExpSum& other) const {
  require(n_ == other.n_, "ExpSum product: dimension mismatch");
  std::vector<Term> out;
  out.reserve(terms_.size() * other.terms_.size());
  for (const auto& a : terms_)
    for (const auto& b : other.terms_) {
      RealVec f(n_);
      for (int j = 0; j < n_; ++j) f[j] = a.freq[j] + b.freq[j];
      out.push_back({a.coef * b.coef, std::move(f)});
    }
  return ExpSum(n_, std::move(out));
}

ExpSum ExpSum::operator+(const ExpSum& other) const {
  require(n_ == other.n_, "ExpSum sum: dimension mismatch");
  auto out = terms_;
  out.insert(out.end(), other.terms_.begin(), other.terms_.end());
  return ExpSum(n_, std::move(out));
}

ExpSum ExpSum::scaled(cplx s) const {
  auto out = terms_;
  for (auto& t : out) t.coef *= s;
  return ExpSum(n_, std::move(out));
}

double ExpSum::coef_l1() const {
  double s = 0;
  for (const auto& t : terms_) s += std::abs(t.coef);
  return s;
}

RealVec ExpSum::max_abs_freq() const {
  RealVec m(n_, 0.0);
  for (const auto& t : terms_)
    for (int j = 0; j < n_; ++j) m[j] = std::max(m[j], std::abs(t.freq[j]));
  return m;
}

TubeDomain::TubeDomain(RealVec lo, RealVec hi)
    : n(static_cast<int>(lo.size())), base_lo(std::move(lo)), base_hi(std::move(hi)) {
  require(n > 0 && base_hi.size() == base_lo.size(), "TubeDomain: bad dimensions");
  for (int j = 0; j < n; ++j) require(base_lo[j] < base_hi[j], "TubeDomain: base_lo must be < base_hi");
}

bool TubeDomain::contains(std::span<const double> y) const {
  if (static_cast<int>(y.size()) != n) return false;
  for (int j = 0; j < n; ++j)
    if (!(y[j] > base_lo[j] && y[j] < base_hi[j])) return false;
  return true;
}

namespace apcore {

cplx eval(const ExpSum& f, std::span<const cplx> z) { return f(z); }

ExpSum translate(const ExpSum& f, std::span<const double> tau) {
  require(static_cast<int>(tau.size()) == f.dim(), "translate: dimension mismatch");
  auto terms = f.terms();
  for (auto& t : terms) t.coef *= std::exp(I * inner(t.freq, tau));
  return ExpSum(f.dim(), std::move(terms));
}

std::vector<long> midpoint_resolution(const ExpSum& f, double nu) {
  const RealVec fastest = f.max_abs_freq();
  std::vector<long> cells(f.dim());
  for (int j = 0; j < f.dim(); ++j) {
    if (fastest[j] == 0.0) {
      cells[j] = 1;
      continue;
    }
    const double width = (2.0 * std::numbers::pi / fastest[j]) / 16.0;
    cells[j] = std::max<long>(1, static_cast<long>(std::ceil(2.0 * nu / width)));
  }
  return cells;
}

MeanResult bohr_mean(const ExpSum& f, std::span<const double> y, MeanMode mode, double nu) {
  require(static_cast<int>(y.size()) == f.dim(), "bohr_mean: dimension mismatch");
  if (mode == MeanMode::exact) {
    for (const auto& t : f.terms())
      if (is_zero_freq(t.freq)) return {t.coef, 0.0};
    return {cplx{0, 0}, 0.0};
  }
  require(nu > 0, "bohr_mean: nu must be positive");
  const auto cells = midpoint_resolution(f, nu);
  MeanResult r;
  r.value = kernels::box_mean(f, y, nu, cells);
  for (const auto& t : f.terms()) {
    if (is_zero_freq(t.freq)) continue;
    double fastest = 0;
    for (double l : t.freq) fastest = std::max(fastest, std::abs(l));
    r.error_bound += std::abs(t.coef) * std::exp(-inner(t.freq, y)) * 2.0 / (nu * fastest);
  }
  return r;
}

FourierCoefficient fourier_coefficient(const ExpSum& f, std::span<const double> lambda,
                                       std::span<const double> y) {
  require(static_cast<int>(lambda.size()) == f.dim() && static_cast<int>(y.size()) == f.dim(),
          "fourier_coefficient: dimension mismatch");
  for (const auto& t : f.terms()) {
    bool same = true;
    for (int j = 0; j < f.dim() && same; ++j)
      same = std::abs(t.freq[j] - lambda[j]) <= 1e-12 * std::max(1.0, std::abs(lambda[j]));
    if (same) {
      const double lam_y = inner(t.freq, y);
      return {t.coef * std::exp(-lam_y), t.coef};
    }
  }
  return {cplx{0, 0}, cplx{0, 0}};
}

double translation_deviation_bound(const ExpSum& f, std::span<const double> tau,
                                   std::span<const double> gp_lo, std::span<const double> gp_hi) {
  double s = 0;
  for (const auto& t : f.terms()) {
    double phase = 0, growth = 0;
    for (int j = 0; j < f.dim(); ++j) {
      phase += t.freq[j] * tau[j];
      growth += std::max(-t.freq[j] * gp_lo[j], -t.freq[j] * gp_hi[j]);
    }
    // |e^{i phase} - 1| = 2 |sin(phase/2)|
    s += std::abs(t.coef) * 2.0 * std::abs(std::sin(0.5 * phase)) * std::exp(growth);
  }
  return s;
}

namespace {

// Dilate a boolean grid by a Chebyshev radius along every axis (separable,
// prefix counts along each grid line).
std::vector<char> dilate(std::vector<char> mask, const std::vector<long>& dims, long radius) {
  const int n = static_cast<int>(dims.size());
  const long total = static_cast<long>(mask.size());
  long stride = 1;
  std::vector<long> prefix;
  for (int axis = n - 1; axis >= 0; --axis) {
    const long len = dims[axis];
    std::vector<char> out(mask.size(), 0);
    prefix.assign(len + 1, 0);
    for (long base = 0; base < total; ++base) {
      if ((base / stride) % len != 0) continue;  // first element of a grid line
      for (long c = 0; c < len; ++c) prefix[c + 1] = prefix[c] + mask[base + c * stride];
      for (long c = 0; c < len; ++c) {
        const long from = std::max(0L, c - radius), to = std::min(len - 1, c + radius);
        out[base + c * stride] = prefix[to + 1] - prefix[from] > 0;
      }
    }
    mask.swap(out);
    stride *= len;
  }
  return mask;
}

bool windows_covered(const std::vector<char>& mask, const std::vector<long>& dims, long m) {
  const int n = static_cast<int>(dims.size());
  const auto covered = dilate(mask, dims, m);
  for (std::size_t idx = 0; idx < covered.size(); ++idx) {
    long rem = static_cast<long>(idx);
    bool inner_window = true;
    for (int j = n - 1; j >= 0; --j) {
      const long c = rem % dims[j];
      rem /= dims[j];
      if (c < m || c > dims[j] - 1 - m) inner_window = false;
    }
    if (inner_window && !covered[idx]) return false;
  }
  return true;
}

}  // namespace

TranslationCertificate epsilon_translation_set(const ExpSum& f, double epsilon,
                                               std::span<const double> gp_lo,
                                               std::span<const double> gp_hi,
                                               std::span<const double> scan_lo,
                                               std::span<const double> scan_hi, double step) {
  const int n = f.dim();
  require(epsilon > 0, "epsilon_translation_set: epsilon must be positive");
  require(step > 0, "epsilon_translation_set: step must be positive");
  require(static_cast<int>(gp_lo.size()) == n && static_cast<int>(gp_hi.size()) == n &&
              static_cast<int>(scan_lo.size()) == n && static_cast<int>(scan_hi.size()) == n,
          "epsilon_translation_set: dimension mismatch");
  std::vector<long> dims(n);
  long total = 1;
  for (int j = 0; j < n; ++j) {
    require(scan_hi[j] > scan_lo[j], "epsilon_translation_set: empty scan box");
    require(gp_lo[j] <= gp_hi[j], "epsilon_translation_set: empty G'");
    dims[j] = static_cast<long>(std::floor((scan_hi[j] - scan_lo[j]) / step + 1e-9)) + 1;
    total *= dims[j];
  }

  TranslationCertificate cert;
  cert.epsilon = epsilon;
  cert.scan_lo.assign(scan_lo.begin(), scan_lo.end());
  cert.scan_hi.assign(scan_hi.begin(), scan_hi.end());
  cert.step = step;

  std::vector<char> mask(total, 0);
  RealVec tau(n);
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    for (int j = n - 1; j >= 0; --j) {
      tau[j] = scan_lo[j] + static_cast<double>(rem % dims[j]) * step;
      rem /= dims[j];
    }
    const double dev = translation_deviation_bound(f, tau, gp_lo, gp_hi);
    if (dev < epsilon) {
      mask[idx] = 1;
      cert.witnesses.push_back({tau, dev});
    }
  }
  if (cert.witnesses.empty()) return cert;

  // Smallest L = m*step such that every grid-centred window of half-length L
  // lying inside the scan box meets a witness.
  long max_m = dims[0];
  for (long d : dims) max_m = std::min(max_m, (d - 1) / 2);
  if (max_m < 1 || !windows_covered(mask, dims, max_m)) return cert;
  // covering is monotone in m: a window of half-length m+1 contains the one
  // of half-length m with the same centre
  long lo = 0, hi = max_m;
  while (hi - lo > 1) {
    const long mid = (lo + hi) / 2;
    (windows_covered(mask, dims, mid) ? hi : lo) = mid;
  }
  cert.window_half_length = static_cast<double>(hi) * step;
  cert.relatively_dense = true;
  return cert;
}

}  // namespace apcore
}  // namespace apharm
