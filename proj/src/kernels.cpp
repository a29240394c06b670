#include "apharm/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include "apharm/error.hpp"
#include "apharm/summation.hpp"

namespace apharm::kernels {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr int kMaxDepth = 12;
constexpr int kMaxLocalZeros = 4;

constexpr std::array<double, 8> kGL8x = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                         -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                         0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGL8w = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                         0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                         0.2223810344533745, 0.1012285362903763};
constexpr std::array<double, 4> kGL4x = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                         0.8611363115940526};
constexpr std::array<double, 4> kGL4w = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                         0.3478548451374538};

// The serial reference loop and the OpenMP loop run the same body.
template <class Body>
void for_each_index(long count, Exec exec, Body&& body) {
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < count; ++i) body(i);
  } else {
    for (long i = 0; i < count; ++i) body(i);
  }
}

// A one-variable exponential sum g(w) = sum d_k e^{i mu_k w}, flattened.
struct Line {
  std::vector<cplx> d;
  std::vector<double> mu;
  double lipschitz = 0;  // sum |d_k mu_k|: bound of |g'| on the real axis
  double fastest = 0;

  cplx value(cplx w) const {
    cplx s = 0;
    for (std::size_t k = 0; k < d.size(); ++k) s += d[k] * std::exp(I * mu[k] * w);
    return s;
  }
  // k-th derivative
  cplx derivative(cplx w, int k) const {
    cplx s = 0;
    for (std::size_t j = 0; j < d.size(); ++j) s += d[j] * std::pow(I * mu[j], k) * std::exp(I * mu[j] * w);
    return s;
  }
  void value_and_derivative(cplx w, cplx& v, cplx& dv) const {
    v = 0;
    dv = 0;
    for (std::size_t k = 0; k < d.size(); ++k) {
      const cplx e = d[k] * std::exp(I * mu[k] * w);
      v += e;
      dv += I * mu[k] * e;
    }
  }
};

Line make_line(const ExpSum& g1) {
  Line line;
  for (const auto& t : g1.terms()) {
    line.d.push_back(t.coef);
    line.mu.push_back(t.freq[0]);
    line.lipschitz += std::abs(t.coef) * std::abs(t.freq[0]);
    line.fastest = std::max(line.fastest, std::abs(t.freq[0]));
  }
  return line;
}

// Slice of f along axis 0 at height y with the other real coordinates fixed.
Line make_slice(const ExpSum& f, std::span<const double> y, std::span<const double> x_other) {
  std::vector<Term> terms;
  terms.reserve(f.terms().size());
  for (const auto& t : f.terms()) {
    double re = -t.freq[0] * y[0], im = 0;
    for (std::size_t j = 1; j < t.freq.size(); ++j) {
      re -= t.freq[j] * y[j];
      im += t.freq[j] * x_other[j - 1];
    }
    terms.push_back({t.coef * std::exp(cplx{re, im}), {t.freq[0]}});
  }
  return make_line(ExpSum(1, std::move(terms)));
}

double cell_width(double fastest) {
  if (fastest == 0.0) return 0.5;
  return std::min(0.5, (2.0 * std::numbers::pi / fastest) / 16.0);
}

// Integral of log|x - w| over [lo, hi].
double log_distance_integral(double lo, double hi, cplx w) {
  const double p = w.real(), q = w.imag();
  auto prim = [&](double x) {
    const double u = x - p;
    const double r2 = u * u + q * q;
    const double ulog = (r2 == 0.0) ? 0.0 : 0.5 * u * std::log(r2);
    const double at = (q == 0.0) ? 0.0 : q * std::atan(u / q);
    return ulog - u + at;
  };
  return prim(hi) - prim(lo);
}

struct LineAccumulator {
  double integral = 0;
  long refined = 0;
  long singular = 0;
  bool flagged = false;
};

// Zeros of g near the cell centre, by Newton iteration with deflation.
int local_zeros(const Line& g, double c, double r, std::array<cplx, kMaxLocalZeros>& zeros) {
  int found = 0;
  for (int z = 0; z < kMaxLocalZeros; ++z) {
    cplx w = (found == 0) ? cplx{c, 0.0} : cplx{c + 0.31 * r, 0.17 * r};
    double last_step = 0;
    bool ok = false;
    for (int it = 0; it < 100; ++it) {
      cplx v, dv;
      g.value_and_derivative(w, v, dv);
      if (v == cplx{0, 0}) {
        ok = true;
        last_step = 0;
        break;
      }
      cplx q = dv / v;
      for (int j = 0; j < found; ++j) q -= 1.0 / (w - zeros[j]);
      if (!std::isfinite(q.real()) || !std::isfinite(q.imag()) || q == cplx{0, 0}) break;
      const cplx step = 1.0 / q;
      w -= step;
      last_step = std::abs(step);
      if (std::abs(w - c) > 8.0 * r) break;
      if (last_step < 1e-15 * std::max(1.0, std::abs(w))) {
        ok = true;
        break;
      }
    }
    ok = ok || last_step < 1e-3 * r;
    if (!ok || std::abs(w - c) > 4.0 * r) break;
    zeros[found++] = w;
  }
  // A cluster of m nearly equal roots is a root of multiplicity m, which
  // values of g locate only to ~eps^(1/m); polish it as a simple root of g^(m-1).
  std::sort(zeros.begin(), zeros.begin() + found,
            [](cplx x, cplx y) { return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag()); });
  const double cluster = std::max(1e-3 * r, 1e-6);
  for (int a = 0; a < found;) {
    int b = a + 1;
    while (b < found && std::abs(zeros[b] - zeros[a]) < cluster) ++b;
    const int m = b - a;
    if (m > 1) {
      cplx w = 0;
      for (int j = a; j < b; ++j) w += zeros[j];
      w /= static_cast<double>(m);
      for (int it = 0; it < 20; ++it) {
        const cplx num = g.derivative(w, m - 1), den = g.derivative(w, m);
        if (den == cplx{0, 0}) break;
        const cplx step = num / den;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag()) || std::abs(step) > cluster) break;
        w -= step;
        if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(w))) break;
      }
      for (int j = a; j < b; ++j) zeros[j] = w;
    }
    a = b;
  }
  return found;
}

void integrate_cell(const Line& g, double lo, double hi, int depth, LineAccumulator& acc) {
  const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
  const double gc = std::abs(g.value(cplx{c, 0.0}));
  const bool smooth = gc > 4.0 * g.lipschitz * r;
  if (!smooth && depth < kMaxDepth) {
    ++acc.refined;
    integrate_cell(g, lo, c, depth + 1, acc);
    integrate_cell(g, c, hi, depth + 1, acc);
    return;
  }
  std::array<cplx, kMaxLocalZeros> zeros{};
  int nz = 0;
  double sum = 0;
  if (!smooth) {
    ++acc.singular;
    nz = local_zeros(g, c, r, zeros);
    for (int j = 0; j < nz; ++j) sum += log_distance_integral(lo, hi, zeros[j]);
  }
  double quad = 0;
  for (std::size_t i = 0; i < kGL8x.size(); ++i) {
    const double x = c + r * kGL8x[i];
    const double a = std::abs(g.value(cplx{x, 0.0}));
    double v = std::log(a);
    for (int j = 0; j < nz; ++j) v -= std::log(std::abs(cplx{x, 0.0} - zeros[j]));
    if (!std::isfinite(v)) {
      acc.flagged = true;
      continue;
    }
    quad += kGL8w[i] * v;
  }
  acc.integral += sum + r * quad;
}

LogMeanResult line_integral(const Line& g, double a, double b, Exec exec) {
  LogMeanResult out;
  if (g.d.empty()) {
    out.flagged = true;
    out.value = -std::numeric_limits<double>::infinity();
    return out;
  }
  const long cells = std::max<long>(1, static_cast<long>(std::ceil((b - a) / cell_width(g.fastest))));
  const double w = (b - a) / static_cast<double>(cells);
  std::vector<LineAccumulator> acc(cells);
  for_each_index(cells, exec, [&](long i) {
    const double lo = a + static_cast<double>(i) * w;
    const double hi = (i + 1 == cells) ? b : a + static_cast<double>(i + 1) * w;
    integrate_cell(g, lo, hi, 0, acc[i]);
  });
  std::vector<double> vals(cells);
  for (long i = 0; i < cells; ++i) {
    vals[i] = acc[i].integral;
    out.flagged = out.flagged || acc[i].flagged;
    out.refined_cells += acc[i].refined;
    out.singular_cells += acc[i].singular;
  }
  out.value = pairwise_sum(vals);
  return out;
}

// Product Gauss-Legendre nodes for the axes 1..n-1 of the box |x| < nu.
struct OuterNodes {
  std::vector<double> coords;  // row-major, n-1 per node
  std::vector<double> weights;
};

OuterNodes outer_nodes(const ExpSum& f, double nu) {
  const int n = f.dim();
  const RealVec fastest = f.max_abs_freq();
  OuterNodes out;
  out.weights = {1.0};
  for (int axis = 1; axis < n; ++axis) {
    const long cells = std::max<long>(1, static_cast<long>(std::ceil(2.0 * nu / cell_width(fastest[axis]))));
    const double w = 2.0 * nu / static_cast<double>(cells);
    std::vector<double> x1, w1;
    for (long c = 0; c < cells; ++c)
      for (std::size_t q = 0; q < kGL4x.size(); ++q) {
        x1.push_back(-nu + (static_cast<double>(c) + 0.5) * w + 0.5 * w * kGL4x[q]);
        w1.push_back(0.5 * w * kGL4w[q]);
      }
    const int prev_dim = axis - 1;
    std::vector<double> coords, weights;
    for (std::size_t k = 0; k < out.weights.size(); ++k)
      for (std::size_t q = 0; q < x1.size(); ++q) {
        for (int j = 0; j < prev_dim; ++j) coords.push_back(out.coords[k * prev_dim + j]);
        coords.push_back(x1[q]);
        weights.push_back(out.weights[k] * w1[q]);
      }
    out.coords.swap(coords);
    out.weights.swap(weights);
  }
  return out;
}

}  // namespace

cplx box_mean(const ExpSum& f, std::span<const double> y, double nu, std::span<const long> cells,
              Exec exec) {
  const int n = f.dim();
  require(static_cast<int>(y.size()) == n && static_cast<int>(cells.size()) == n,
          "box_mean: dimension mismatch");
  require(nu > 0, "box_mean: nu must be positive");
  std::vector<double> h(n);
  long rows = 1;
  for (int j = 0; j < n; ++j) {
    require(cells[j] > 0, "box_mean: cell counts must be positive");
    h[j] = 2.0 * nu / static_cast<double>(cells[j]);
    if (j > 0) rows *= cells[j];
  }
  // n == 1: split the only axis into blocks so the loop still has parallel work
  constexpr long kBlock = 4096;
  const long blocks = (n == 1) ? (cells[0] + kBlock - 1) / kBlock : 1;
  const long items = rows * blocks;
  std::vector<cplx> partial(items);
  for_each_index(items, exec, [&](long item) {
    const long row = item / blocks, block = item % blocks;
    std::vector<double> x_other(n - 1);
    long rem = row;
    for (int j = n - 1; j >= 1; --j) {
      x_other[j - 1] = -nu + (static_cast<double>(rem % cells[j]) + 0.5) * h[j];
      rem /= cells[j];
    }
    const Line g = make_slice(f, y, x_other);
    const long from = (n == 1) ? block * kBlock : 0;
    const long to = (n == 1) ? std::min(cells[0], from + kBlock) : cells[0];
    std::vector<cplx> vals;
    vals.reserve(to - from);
    for (long i = from; i < to; ++i) vals.push_back(g.value(-nu + (static_cast<double>(i) + 0.5) * h[0]));
    partial[item] = pairwise_sum(vals);
  });
  double count = 1;
  for (long c : cells) count *= static_cast<double>(c);
  return pairwise_sum(partial) / count;
}

LogMeanResult log_abs_line_integral(const ExpSum& g, double a, double b, Exec exec) {
  require(g.dim() == 1, "log_abs_line_integral: one-variable sum expected");
  require(b > a, "log_abs_line_integral: empty interval");
  return line_integral(make_line(g), a, b, exec);
}

LogMeanResult log_modulus_mean(const ExpSum& f, std::span<const double> y, double nu, Exec exec) {
  const int n = f.dim();
  require(static_cast<int>(y.size()) == n, "log_modulus_mean: dimension mismatch");
  require(nu > 0, "log_modulus_mean: nu must be positive");
  require(!f.is_zero_expression(), "log_modulus_mean: f is identically zero");
  const double volume = std::pow(2.0 * nu, n);
  if (n == 1) {
    auto r = line_integral(make_slice(f, y, {}), -nu, nu, exec);
    r.value /= volume;
    return r;
  }
  const OuterNodes outer = outer_nodes(f, nu);
  const long count = static_cast<long>(outer.weights.size());
  std::vector<LogMeanResult> parts(count);
  for_each_index(count, exec, [&](long k) {
    std::span<const double> xo(outer.coords.data() + k * (n - 1), n - 1);
    parts[k] = line_integral(make_slice(f, y, xo), -nu, nu, Exec::serial);
  });
  std::vector<double> vals(count);
  LogMeanResult out;
  for (long k = 0; k < count; ++k) {
    vals[k] = outer.weights[k] * parts[k].value;
    out.flagged = out.flagged || parts[k].flagged;
    out.refined_cells += parts[k].refined_cells;
    out.singular_cells += parts[k].singular_cells;
  }
  out.value = pairwise_sum(vals) / volume;
  return out;
}

double log_box_integral(double u0, double u1, double v0, double v1) {
  // G_uv = log sqrt(u^2+v^2); G is C^1 across the axes.
  auto G = [](double u, double v) {
    if (u == 0.0 || v == 0.0) return 0.0;
    const double r2 = u * u + v * v;
    return 0.5 * u * v * (std::log(r2) - 3.0) + 0.5 * u * u * std::atan(v / u) +
           0.5 * v * v * std::atan(u / v);
  };
  return G(u1, v1) - G(u0, v1) - G(u1, v0) + G(u0, v0);
}

std::vector<double> log_potential_2d(std::span<const DensityBox> boxes, std::span<const double> axis0,
                                     std::span<const double> axis1, Exec exec) {
  const long n0 = static_cast<long>(axis0.size()), n1 = static_cast<long>(axis1.size());
  std::vector<double> out(n0 * n1, 0.0);
  const double inv2pi = 1.0 / (2.0 * std::numbers::pi);
  for_each_index(n0 * n1, exec, [&](long idx) {
    const double p = axis0[idx / n1], q = axis1[idx % n1];
    std::vector<double> terms;
    terms.reserve(boxes.size());
    for (const auto& b : boxes) {
      if (b.density == 0.0) continue;
      terms.push_back(b.density * log_box_integral(b.lo[0] - p, b.hi[0] - p, b.lo[1] - q, b.hi[1] - q));
    }
    out[idx] = inv2pi * pairwise_sum(terms);
  });
  return out;
}

cplx grid_integral(const std::function<cplx(std::span<const double>)>& integrand,
                   std::span<const double> lo, std::span<const long> count, double h, Exec exec) {
  const int d = static_cast<int>(lo.size());
  require(d > 0 && static_cast<int>(count.size()) == d, "grid_integral: dimension mismatch");
  require(h > 0, "grid_integral: spacing must be positive");
  long rows = 1;
  for (int j = 0; j + 1 < d; ++j) rows *= count[j];
  std::vector<cplx> partial(rows);
  for_each_index(rows, exec, [&](long row) {
    std::vector<double> x(d);
    long rem = row;
    for (int j = d - 2; j >= 0; --j) {
      x[j] = lo[j] + static_cast<double>(rem % count[j]) * h;
      rem /= count[j];
    }
    std::vector<cplx> vals(count[d - 1]);
    for (long i = 0; i < count[d - 1]; ++i) {
      x[d - 1] = lo[d - 1] + static_cast<double>(i) * h;
      vals[i] = integrand(x);
    }
    partial[row] = pairwise_sum(vals);
  });
  return pairwise_sum(partial) * std::pow(h, d);
}

}  // namespace apharm::kernels
