#include "apharm/pldiv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "apharm/error.hpp"
#include "apharm/summation.hpp"

namespace apharm {

namespace {

using std::numbers::pi;

double dot(const RealVec& a, std::span<const double> b) {
  double s = 0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

bool negative_orientation(const RealVec& v) {
  for (double c : v)
    if (c != 0) return c < 0;
  return false;
}

bool same_plane(const Hinge& a, const Hinge& b, double tol) {
  for (std::size_t j = 0; j < a.lambda.size(); ++j)
    if (std::abs(a.lambda[j] - b.lambda[j]) > tol) return false;
  return std::abs(a.h - b.h) <= tol * (1 + std::abs(a.h));
}

bool hinge_order(const Hinge& a, const Hinge& b) {
  if (a.lambda != b.lambda) return a.lambda < b.lambda;
  return a.h < b.h;
}

// Least-squares affine fit over grid nodes; returns the residual values.
std::vector<double> remove_affine(const Grid& g, const std::vector<double>& v, RealVec* grad = nullptr,
                                  double* offset = nullptr) {
  const int n = g.dim(), m = n + 1;
  std::vector<double> a(m * m, 0.0), r(m, 0.0);
  for (long s = 0; s < g.size(); ++s) {
    const auto y = g.point(s);
    std::vector<double> basis(m, 1.0);
    for (int j = 0; j < n; ++j) basis[j + 1] = y[j];
    for (int i = 0; i < m; ++i) {
      r[i] += basis[i] * v[s];
      for (int k = 0; k < m; ++k) a[i * m + k] += basis[i] * basis[k];
    }
  }
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int row = col + 1; row < m; ++row)
      if (std::abs(a[row * m + col]) > std::abs(a[piv * m + col])) piv = row;
    for (int k = 0; k < m; ++k) std::swap(a[col * m + k], a[piv * m + k]);
    std::swap(r[col], r[piv]);
    require(std::abs(a[col * m + col]) > 0, "affine fit: degenerate grid");
    for (int row = 0; row < m; ++row) {
      if (row == col) continue;
      const double f = a[row * m + col] / a[col * m + col];
      for (int k = 0; k < m; ++k) a[row * m + k] -= f * a[col * m + k];
      r[row] -= f * r[col];
    }
  }
  std::vector<double> coef(m);
  for (int i = 0; i < m; ++i) coef[i] = r[i] / a[i * m + i];
  std::vector<double> out(v.size());
  for (long s = 0; s < g.size(); ++s) {
    const auto y = g.point(s);
    double lin = coef[0];
    for (int j = 0; j < n; ++j) lin += coef[j + 1] * y[j];
    out[s] = v[s] - lin;
  }
  if (grad) grad->assign(coef.begin() + 1, coef.end());
  if (offset) *offset = coef[0];
  return out;
}

double sup_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// min over affine l of sup |v - l| on the grid nodes. For a fixed slope the
// best constant is the midrange, so the remaining function of the slope is
// convex and is minimised by nested ternary search.
double minimax_affine_residual(const Grid& g, const std::vector<double>& v) {
  const int n = g.dim();
  RealVec b0;
  const double e0 = sup_abs(remove_affine(g, v, &b0));
  std::vector<std::vector<double>> pts(g.size());
  for (long s = 0; s < g.size(); ++s) pts[s] = g.point(s);
  std::vector<double> radius(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const double width = g.axes[j].hi() - g.axes[j].lo;
    radius[j] = width > 0 ? 4 * e0 / width : 0.0;
  }
  RealVec b = b0;
  const auto spread = [&]() {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (long s = 0; s < g.size(); ++s) {
      const double r = v[s] - dot(b, pts[s]);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    return 0.5 * (hi - lo);
  };
  const auto search = [&](auto&& self, int j) -> double {
    if (j == n) return spread();
    double a = b0[j] - radius[j], c = b0[j] + radius[j];
    const auto at = [&](double t) {
      b[j] = t;
      return self(self, j + 1);
    };
    constexpr int kIterations = 60;
    for (int it = 0; it < kIterations && c - a > 1e-14 * (1 + std::abs(b0[j])); ++it) {
      const double m1 = a + (c - a) / 3, m2 = c - (c - a) / 3;
      if (at(m1) <= at(m2))
        c = m2;
      else
        a = m1;
    }
    return at(0.5 * (a + c));
  };
  return std::min(e0, search(search, 0));
}

double max_error(const JessenProfile& p) {
  double m = 0;
  for (double e : p.error)
    if (std::isfinite(e)) m = std::max(m, e);
  return m;
}

// Hinge sum on every grid node.
std::vector<double> hinge_values(const Grid& g, const std::vector<Hinge>& terms) {
  std::vector<double> out(g.size(), 0.0);
  for (long s = 0; s < g.size(); ++s) {
    const auto y = g.point(s);
    for (const auto& t : terms) out[s] += t.gamma * std::max(0.0, dot(t.lambda, y) - t.h);
  }
  return out;
}

struct Fraction {
  long p, q;
};

// Best rational approximation with denominator <= qmax (continued fractions).
Fraction rational(double x, long qmax) {
  long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  double r = x;
  for (int it = 0; it < 64; ++it) {
    const double a = std::floor(r);
    const long ai = static_cast<long>(a);
    const long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > qmax) break;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
    const double f = r - a;
    if (f < 1e-15 || std::abs(x - static_cast<double>(p1) / q1) <= 1e-15 * x) break;
    r = 1.0 / f;
  }
  return {p1, q1};
}

PLConvex decompose_1d(const JessenProfile& p) {
  const Axis& ax = p.grid.axes[0];
  require(ax.count >= 3, "pl_decompose: need at least 3 samples");
  const auto& v = p.values;
  const long n = ax.count;
  std::vector<double> slope(n - 1);
  for (long i = 0; i + 1 < n; ++i) slope[i] = (v[i + 1] - v[i]) / ax.h;
  const auto [smin, smax] = std::minmax_element(slope.begin(), slope.end());
  const double tol_slope = std::max({1e-6 * (*smax - *smin), 3 * max_error(p), 1e-12});

  PLConvex out;
  out.n = 1;
  // Consecutive nodes whose slope jumps exceed the tolerance form one kink;
  // its location is the jump-weighted centroid.
  long i = 1;
  while (i < n - 1) {
    double jump = slope[i] - slope[i - 1];
    if (jump <= tol_slope) {
      ++i;
      continue;
    }
    double mass = 0, moment = 0;
    while (i < n - 1 && (jump = slope[i] - slope[i - 1]) > tol_slope) {
      mass += jump;
      moment += jump * ax.at(i);
      ++i;
    }
    out.terms.push_back({mass, {1.0}, moment / mass});
  }
  out.grad = {slope[0]};
  out.offset = v[0] - slope[0] * ax.lo;
  std::vector<double> err(n);
  for (long s = 0; s < n; ++s) {
    const double y = ax.at(s);
    err[s] = v[s] - pldiv::pl_eval(out, std::span<const double>(&y, 1));
  }
  out.residual = sup_abs(err);
  return out;
}

PLConvex decompose_2d(const JessenProfile& p) {
  const Grid& g = p.grid;
  const Axis &a0 = g.axes[0], &a1 = g.axes[1];
  require(a0.count >= 4 && a1.count >= 4, "pl_decompose: need at least 4 samples per axis");
  const auto& v = p.values;
  const auto at = [&](long i, long j) { return v[i * a1.count + j]; };
  const double tol_v = std::max(1e-9 * (p.value_range() + 1), 3 * max_error(p));
  const double tol_g = 4 * tol_v / std::min(a0.h, a1.h);

  // 3x3-node blocks lying on one plane, clustered by gradient.
  const long b0 = a0.count - 2, b1 = a1.count - 2;
  std::vector<int> label(b0 * b1, -1);
  std::vector<std::array<double, 2>> grads;
  std::vector<std::vector<double>> offsets;
  for (long i = 0; i < b0; ++i)
    for (long j = 0; j < b1; ++j) {
      const double g0 = (at(i + 1, j) - at(i, j)) / a0.h, g1 = (at(i, j + 1) - at(i, j)) / a1.h;
      bool planar = true;
      for (int di = 0; di < 3 && planar; ++di)
        for (int dj = 0; dj < 3 && planar; ++dj)
          planar = std::abs(at(i + di, j + dj) - at(i, j) - g0 * di * a0.h - g1 * dj * a1.h) <= tol_v;
      if (!planar) continue;
      int c = -1;
      for (std::size_t k = 0; k < grads.size() && c < 0; ++k)
        if (std::abs(grads[k][0] - g0) <= tol_g && std::abs(grads[k][1] - g1) <= tol_g) c = static_cast<int>(k);
      if (c < 0) {
        c = static_cast<int>(grads.size());
        grads.push_back({g0, g1});
        offsets.emplace_back();
      }
      label[i * b1 + j] = c;
      offsets[c].push_back(at(i, j) - grads[c][0] * a0.at(i) - grads[c][1] * a1.at(j));
    }
  std::vector<double> offset(grads.size());
  for (std::size_t c = 0; c < grads.size(); ++c)
    offset[c] = pairwise_sum(offsets[c]) / static_cast<double>(offsets[c].size());

  // Adjacent cluster pairs give crease candidates, ranked by witness count.
  const int nc = static_cast<int>(grads.size());
  std::vector<long> witness(nc * nc, 0);
  constexpr int kReach = 3;
  for (long i = 0; i < b0; ++i)
    for (long j = 0; j < b1; ++j) {
      const int a = label[i * b1 + j];
      if (a < 0) continue;
      for (long di = -kReach; di <= kReach; ++di)
        for (long dj = -kReach; dj <= kReach; ++dj) {
          const long ii = i + di, jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= b0 || jj >= b1) continue;
          const int b = label[ii * b1 + jj];
          if (b > a) ++witness[a * nc + b];
        }
    }
  struct Candidate {
    Hinge hinge;
    long count;
  };
  std::vector<Candidate> cands;
  for (int a = 0; a < nc; ++a)
    for (int b = a + 1; b < nc; ++b) {
      if (witness[a * nc + b] == 0) continue;
      const double d0 = grads[b][0] - grads[a][0], d1 = grads[b][1] - grads[a][1];
      const double gamma = std::hypot(d0, d1);
      Hinge hg{gamma, {d0 / gamma, d1 / gamma}, (offset[a] - offset[b]) / gamma};
      if (negative_orientation(hg.lambda)) {
        hg.lambda = {-hg.lambda[0], -hg.lambda[1]};
        hg.h = -hg.h;
      }
      cands.push_back({hg, witness[a * nc + b]});
    }
  std::stable_sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
    if (x.count != y.count) return x.count > y.count;
    return hinge_order(x.hinge, y.hinge);
  });

  const double tol_res = std::max(1e-6 * p.value_range(), 3 * max_error(p)) + 1e-12;
  const auto residual_of = [&](const std::vector<Hinge>& terms) {
    const auto hv = hinge_values(g, terms);
    std::vector<double> rest(v.size());
    for (std::size_t s = 0; s < v.size(); ++s) rest[s] = v[s] - hv[s];
    return sup_abs(remove_affine(g, rest));
  };
  std::vector<Hinge> chosen;
  double res = residual_of(chosen);
  constexpr std::size_t kMaxCreases = 8;
  for (const auto& c : cands) {
    if (res <= tol_res || chosen.size() == kMaxCreases) break;
    if (std::any_of(chosen.begin(), chosen.end(), [&](const Hinge& h) { return same_plane(h, c.hinge, 1e-6); }))
      continue;
    auto trial = chosen;
    trial.push_back(c.hinge);
    const double r = residual_of(trial);
    if (r < res) {
      chosen = std::move(trial);
      res = r;
    }
  }
  PLConvex out;
  out.n = 2;
  out.terms = chosen;
  const auto hv = hinge_values(g, chosen);
  std::vector<double> rest(v.size());
  for (std::size_t s = 0; s < v.size(); ++s) rest[s] = v[s] - hv[s];
  out.residual = sup_abs(remove_affine(g, rest, &out.grad, &out.offset));
  std::sort(out.terms.begin(), out.terms.end(), hinge_order);
  return out;
}

}  // namespace

std::vector<std::pair<double, int>> PlaneFamily::alphas(double lo, double hi) const {
  std::vector<std::pair<double, int>> out;
  for (const auto& pr : progressions) {
    require(pr.step > 0 && pr.mult >= 1, "PlaneFamily: progression needs positive step and multiplicity");
    long k0 = static_cast<long>(std::ceil((lo - pr.start) / pr.step));
    long k1 = static_cast<long>(std::floor((hi - pr.start) / pr.step));
    if (!pr.infinite()) {
      k0 = std::max(k0, 0L);
      k1 = std::min(k1, pr.count - 1);
    }
    for (long k = k0; k <= k1; ++k) {
      const double a = pr.start + static_cast<double>(k) * pr.step;
      if (a > lo && a < hi) out.emplace_back(a, pr.mult);
    }
  }
  std::sort(out.begin(), out.end());
  std::vector<std::pair<double, int>> merged;
  for (const auto& e : out) {
    if (!merged.empty() && std::abs(merged.back().first - e.first) <= 1e-12 * (1 + std::abs(e.first)))
      merged.back().second += e.second;
    else
      merged.push_back(e);
  }
  return merged;
}

namespace pldiv {

double pl_eval(const PLConvex& a, std::span<const double> y) {
  require(static_cast<int>(y.size()) == a.n, "pl_eval: dimension mismatch");
  std::vector<double> parts;
  for (const auto& t : a.terms) parts.push_back(t.gamma * std::max(0.0, dot(t.lambda, y) - t.h));
  parts.push_back(a.grad.empty() ? 0.0 : dot(a.grad, y));
  parts.push_back(a.offset);
  return pairwise_sum(parts);
}

PLConvex canonical(const PLConvex& a) {
  PLConvex out = a;
  out.terms.clear();
  if (out.grad.empty()) out.grad.assign(a.n, 0.0);
  require(static_cast<int>(out.grad.size()) == a.n, "PLConvex: gradient length differs from n");
  for (Hinge t : a.terms) {
    require(static_cast<int>(t.lambda.size()) == a.n, "PLConvex: lambda length differs from n");
    require(t.gamma > 0, "PLConvex: gamma must be positive");
    double norm = 0;
    for (double c : t.lambda) norm += c * c;
    norm = std::sqrt(norm);
    require(norm > 0, "PLConvex: zero lambda");
    for (double& c : t.lambda) c /= norm;
    t.gamma *= norm;
    t.h /= norm;
    if (negative_orientation(t.lambda)) {
      // gamma(<y,l> - h)^+ = gamma(<y,-l> + h)^+ + gamma(<y,l> - h)
      for (int j = 0; j < a.n; ++j) out.grad[j] += t.gamma * t.lambda[j];
      out.offset -= t.gamma * t.h;
      for (double& c : t.lambda) c = -c;
      t.h = -t.h;
    }
    auto it = std::find_if(out.terms.begin(), out.terms.end(), [&](const Hinge& h) { return same_plane(h, t, 1e-12); });
    if (it != out.terms.end())
      it->gamma += t.gamma;
    else
      out.terms.push_back(t);
  }
  std::sort(out.terms.begin(), out.terms.end(), hinge_order);
  return out;
}

PLConvex pl_decompose(const JessenProfile& samples, int base_dim) {
  require(base_dim == 1 || base_dim == 2, "pl_decompose: base_dim must be 1 or 2");
  require(samples.grid.dim() == base_dim, "pl_decompose: grid dimension differs from base_dim");
  if (jessen::min_curvature(samples, jessen::Precondition::convex) < -jessen::convexity_tolerance(samples))
    throw InputError("pl_decompose: samples fail the convexity check");
  PLConvex out = base_dim == 1 ? decompose_1d(samples) : decompose_2d(samples);
  const double tol = std::max(1e-6 * samples.value_range(), 3 * max_error(samples)) + 1e-12;
  if (out.residual > tol)
    throw InputError("pl_decompose: not PL within tolerance (residual " + std::to_string(out.residual) + ")");
  return out;
}

PLConvex pl_decompose(const PLConvex& exact) { return canonical(exact); }

Realization realize_divisor(const PLConvex& a, int n) {
  require(a.n == n, "realize_divisor: PLConvex dimension differs from n");
  const PLConvex c = canonical(a);
  Realization out;
  out.divisor.n = n;
  RealVec big_g = c.grad;
  double re_b = c.offset;
  for (const auto& t : c.terms) {
    const double rho = t.gamma / (2 * pi);
    const Fraction fr = rational(rho, kMaxDenominator);
    const double approx = static_cast<double>(fr.p) / static_cast<double>(fr.q);
    if (fr.p <= 0 || std::abs(approx - rho) > 1e-9 * rho)
      throw UnsupportedDensity("unsupported density: gamma/(2 pi) = " + std::to_string(rho) +
                               " is not P/Q with Q <= " + std::to_string(kMaxDenominator));
    // sin(pi rho (<z,lambda> - i h)): zeros <z,lambda> - i h = k Q / P
    out.factors.push_back(ExpSum::shifted_sine(pi * approx, t.lambda, cplx{0, t.h}));
    out.divisor.families.push_back(
        {t.lambda, t.h, {Progression{0.0, static_cast<double>(fr.q) / static_cast<double>(fr.p), -1, 1}}});
    for (int j = 0; j < n; ++j) big_g[j] += 0.5 * t.gamma * t.lambda[j];
    re_b += std::log(2.0) - 0.5 * t.gamma * t.h;
  }
  RealVec freq(n);
  for (int j = 0; j < n; ++j) freq[j] = -big_g[j];
  out.factors.push_back(ExpSum::exponential(std::exp(re_b), freq));
  out.f = out.factors.front();
  for (std::size_t k = 1; k < out.factors.size(); ++k) out.f = out.f * out.factors[k];
  return out;
}

double best_affine_sup(const Grid& grid, const std::vector<double>& v) {
  require(static_cast<long>(v.size()) == grid.size(), "best_affine_sup: size mismatch");
  return minimax_affine_residual(grid, v);
}

double verify_realization(const PLConvex& a, const ExpSum& f, const Grid& grid,
                          const std::vector<double>& nu_schedule, kernels::Exec exec) {
  require(grid.dim() == a.n && f.dim() == a.n, "verify_realization: dimension mismatch");
  const auto prof = jessen::jessen_profile(f, grid, nu_schedule, exec);
  std::vector<double> target(grid.size());
  for (long s = 0; s < grid.size(); ++s) {
    const auto y = grid.point(s);
    target[s] = pl_eval(a, y);
  }
  std::vector<double> diff(grid.size());
  for (long s = 0; s < grid.size(); ++s) diff[s] = prof.values[s] - target[s];
  return best_affine_sup(grid, diff);
}

}  // namespace pldiv
}  // namespace apharm
