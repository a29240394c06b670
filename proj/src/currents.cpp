#include "apharm/currents.hpp"

#include <algorithm>
#include <cmath>

#include "apharm/error.hpp"
#include "apharm/summation.hpp"

namespace apharm {

namespace {

constexpr cplx I{0.0, 1.0};

std::vector<cplx> constant_matrix(std::vector<cplx> m) { return m; }

void check_point(const PotentialField& u, std::span<const cplx> z) {
  require(static_cast<int>(z.size()) == u.n, "levy_form: point dimension differs from the potential");
  for (const auto& v : z)
    require(std::abs(v.imag()) < u.tube_half_width, "levy_form: point outside the declared tube");
}

// Index of the grid node at coordinate r along axis a, or -1.
long node_of(const Axis& ax, double r) {
  const double t = (r - ax.lo) / ax.h;
  const long i = std::lround(t);
  if (std::abs(t - static_cast<double>(i)) > 1e-9 || i < 1 || i > ax.count - 2) return -1;
  return i;
}

std::vector<cplx> levy_fd(const PotentialField& u, std::span<const cplx> z) {
  const int n = u.n, d = 2 * n;
  const auto r = real_coords(z);
  std::vector<long> idx(d);
  for (int a = 0; a < d; ++a) {
    idx[a] = node_of(u.grid.axes[a], r[a]);
    if (idx[a] < 0) throw InputError("levy_form: point is not an interior node of the sample grid");
  }
  const auto val = [&](int a, int da, int b, int db) {
    std::vector<long> k = idx;
    k[a] += da;
    k[b] += db;
    return u.samples[u.grid.flat(k)];
  };
  std::vector<double> hess(d * d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      const double ha = u.grid.axes[a].h, hb = u.grid.axes[b].h;
      if (a == b)
        hess[a * d + b] = (val(a, 1, a, 0) - 2 * val(a, 0, a, 0) + val(a, -1, a, 0)) / (ha * ha);
      else
        hess[a * d + b] =
            (val(a, 1, b, 1) - val(a, 1, b, -1) - val(a, -1, b, 1) + val(a, -1, b, -1)) / (4 * ha * hb);
    }
  std::vector<cplx> out(n * n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const double xx = hess[j * d + k], yy = hess[(n + j) * d + n + k];
      const double xy = hess[j * d + n + k], yx = hess[(n + j) * d + k];
      out[j * n + k] = 0.25 * cplx(xx + yy, xy - yx);
    }
  return out;
}

std::vector<cplx> cholesky_ok(std::vector<cplx> a, int n, double shift, bool& ok) {
  for (int i = 0; i < n; ++i) a[i * n + i] += shift;
  ok = true;
  for (int j = 0; j < n && ok; ++j) {
    double d = a[j * n + j].real();
    for (int k = 0; k < j; ++k) d -= std::norm(a[j * n + k]);
    if (!(d > 0)) {
      ok = false;
      break;
    }
    const double l = std::sqrt(d);
    a[j * n + j] = l;
    for (int i = j + 1; i < n; ++i) {
      cplx s = a[i * n + j];
      for (int k = 0; k < j; ++k) s -= a[i * n + k] * std::conj(a[j * n + k]);
      a[i * n + j] = s / l;
    }
  }
  return a;
}

}  // namespace

std::vector<double> real_coords(std::span<const cplx> z) {
  const std::size_t n = z.size();
  std::vector<double> r(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    r[j] = z[j].real();
    r[n + j] = z[j].imag();
  }
  return r;
}

std::vector<cplx> complex_point(std::span<const double> r) {
  const std::size_t n = r.size() / 2;
  std::vector<cplx> z(n);
  for (std::size_t j = 0; j < n; ++j) z[j] = {r[j], r[n + j]};
  return z;
}

std::vector<std::string> PotentialField::registered_names() {
  return {"euclidean", "trace_counterexample", "ztilde", "ztilde_lattice", "y_quadratic"};
}

PotentialField PotentialField::registered(const std::string& name) {
  PotentialField p;
  p.id = name;
  p.n = 2;
  if (name == "euclidean") {
    p.u = [](std::span<const cplx> z) { return std::norm(z[0]) + std::norm(z[1]); };
    p.levy = [](std::span<const cplx>) { return constant_matrix({1.0, 0.0, 0.0, 1.0}); };
    p.plurisubharmonic = true;
  } else if (name == "trace_counterexample") {
    p.u = [](std::span<const cplx> z) {
      const double y1 = z[0].imag(), y2 = z[1].imag();
      return y1 * y1 + y2 * y2 + z[0].real() * std::exp(-z[1] * z[1]).real();
    };
    p.levy = [](std::span<const cplx> z) {
      const cplx z2 = z[1];
      const cplx off = -0.5 * z2 * std::exp(-z2 * z2);  // u_{2 1bar}
      return std::vector<cplx>{0.5, std::conj(off), off, 0.5};
    };
  } else if (name == "ztilde") {
    p.u = [](std::span<const cplx> z) {
      const double x1 = z[0].real(), y1 = z[0].imag(), x2 = z[1].real(), y2 = z[1].imag();
      return 4 * (x1 * x1 + y1 * y1) + 4 * (x1 * y2 - x2 * y1);
    };
    p.levy = [](std::span<const cplx>) { return constant_matrix({4.0, 2.0 * I, -2.0 * I, 0.0}); };
  } else if (name == "ztilde_lattice") {
    p.u = [](std::span<const cplx> z) { return std::norm(z[0] - I * z[1]); };
    p.levy = [](std::span<const cplx>) { return constant_matrix({1.0, I, -I, 1.0}); };
    p.plurisubharmonic = true;
  } else if (name == "y_quadratic") {
    p.u = [](std::span<const cplx> z) {
      const double y1 = z[0].imag(), y2 = z[1].imag();
      return y1 * y1 + y1 * y2 + y2 * y2;
    };
    p.levy = [](std::span<const cplx>) { return constant_matrix({0.5, 0.25, 0.25, 0.5}); };
    p.plurisubharmonic = true;
  } else {
    throw InputError("unknown potential '" + name + "'");
  }
  return p;
}

PotentialField PotentialField::from_samples(const Grid& grid, std::vector<double> values) {
  require(grid.dim() % 2 == 0 && grid.dim() > 0, "PotentialField: grid must cover 2n real coordinates");
  require(static_cast<long>(values.size()) == grid.size(), "PotentialField: sample count differs from grid");
  PotentialField p;
  p.id = "samples";
  p.n = grid.dim() / 2;
  p.grid = grid;
  p.samples = std::move(values);
  return p;
}

std::vector<cplx> levy_form(const PotentialField& u, std::span<const cplx> z) {
  check_point(u, z);
  return u.sampled() ? levy_fd(u, z) : u.levy(z);
}

std::vector<std::vector<int>> multi_indices(int n, int m) {
  require(n > 0 && m >= 0 && m <= n, "multi_indices: need 0 <= m <= n");
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == m) {
      out.push_back(cur);
      return;
    }
    for (int j = start; j < n; ++j) {
      cur.push_back(j);
      rec(j + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

Current ddc(const PotentialField& u) {
  Current c;
  c.n = u.n;
  c.m = 1;
  c.positive = u.plurisubharmonic;
  c.tube_half_width = u.tube_half_width;
  c.coefficients = [u](std::span<const cplx> z) { return levy_form(u, z); };
  return c;
}

Current ddc_squared(const PotentialField& u) {
  require(u.n == 2, "ddc_squared: implemented on C^2");
  Current c;
  c.n = 2;
  c.m = 2;
  c.positive = u.plurisubharmonic;
  c.tube_half_width = u.tube_half_width;
  c.coefficients = [u](std::span<const cplx> z) {
    const auto l = levy_form(u, z);
    return std::vector<cplx>{2.0 * (l[0] * l[3] - l[1] * l[2])};
  };
  return c;
}

CurrentGrid sample_current(const Current& f, const Grid& grid, std::vector<int> roles) {
  require(static_cast<int>(roles.size()) == grid.dim(), "sample_current: one role per grid axis");
  for (int r : roles) require(r >= 0 && r < 2 * f.n, "sample_current: role out of range");
  CurrentGrid g;
  g.n = f.n;
  g.m = f.m;
  g.grid = grid;
  g.roles = std::move(roles);
  g.index_sets = multi_indices(f.n, f.m);
  g.positive = f.positive;
  const std::size_t w = g.index_sets.size();
  g.coef.resize(grid.size() * w * w);
  std::vector<double> r(2 * f.n, 0.0);
  for (long s = 0; s < grid.size(); ++s) {
    const auto p = grid.point(s);
    for (int a = 0; a < grid.dim(); ++a) r[g.roles[a]] = p[a];
    const auto c = f.coefficients(complex_point(r));
    require(c.size() == w * w, "sample_current: coefficient matrix has the wrong size");
    std::copy(c.begin(), c.end(), g.coef.begin() + s * w * w);
  }
  return g;
}

double hermitian_defect(const CurrentGrid& f) {
  double d = 0;
  const std::size_t w = f.width();
  for (long s = 0; s < f.grid.size(); ++s)
    for (std::size_t i = 0; i < w; ++i)
      for (std::size_t j = 0; j < w; ++j) d = std::max(d, std::abs(f.at(s, i, j) - std::conj(f.at(s, j, i))));
  return d;
}

bool positive_semidefinite(const CurrentGrid& f, double rel_tol) {
  const int w = static_cast<int>(f.width());
  for (long s = 0; s < f.grid.size(); ++s) {
    std::vector<cplx> a(f.coef.begin() + s * w * w, f.coef.begin() + (s + 1) * w * w);
    double scale = 0;
    for (const auto& v : a) scale = std::max(scale, std::abs(v));
    if (scale == 0) continue;
    bool ok = false;
    cholesky_ok(a, w, rel_tol * scale, ok);
    if (!ok) return false;
  }
  return true;
}

double bump(double s) { return s < 1 ? std::exp(-1.0 / (1.0 - s * s)) : 0.0; }

TestForm TestForm::monomial(int n, std::vector<int> K, std::vector<int> L, std::vector<double> centre,
                            double radius, std::function<cplx(std::span<const cplx>)> weight_fn) {
  require(K.size() == L.size(), "TestForm: bidegree must be (k,k)");
  require(static_cast<int>(centre.size()) == 2 * n && radius > 0, "TestForm: bad support");
  TestForm t;
  t.n = n;
  t.k = static_cast<int>(K.size());
  t.monomials.push_back({std::move(K), std::move(L), 1.0});
  t.centre = centre;
  t.radius = radius;
  t.phi = [centre, radius, weight_fn](std::span<const double> r) -> cplx {
    double d2 = 0;
    for (std::size_t a = 0; a < r.size(); ++a) d2 += (r[a] - centre[a]) * (r[a] - centre[a]);
    const double b = bump(std::sqrt(d2) / radius);
    if (b == 0) return 0.0;
    return weight_fn ? b * weight_fn(complex_point(r)) : cplx(b);
  };
  return t;
}

TestForm TestForm::trace(int n, int k, std::vector<double> centre, double radius) {
  TestForm t = monomial(n, {}, {}, std::move(centre), radius);
  t.k = k;
  t.monomials.clear();
  for (const auto& s : multi_indices(n, k)) t.monomials.push_back({s, s, 1.0});
  return t;
}

int wedge_sign(const std::vector<int>& I, const std::vector<int>& J, const std::vector<int>& K,
               const std::vector<int>& L) {
  std::vector<int> pos;
  const auto add = [&](const std::vector<int>& a, const std::vector<int>& b) {
    for (std::size_t q = 0; q < a.size(); ++q) {
      pos.push_back(2 * a[q]);
      pos.push_back(2 * b[q] + 1);
    }
  };
  add(I, J);
  add(K, L);
  auto sorted = pos;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t q = 0; q < sorted.size(); ++q)
    if (sorted[q] != static_cast<int>(q)) return 0;
  int inversions = 0;
  for (std::size_t a = 0; a < pos.size(); ++a)
    for (std::size_t b = a + 1; b < pos.size(); ++b)
      if (pos[a] > pos[b]) ++inversions;
  return inversions % 2 == 0 ? 1 : -1;
}

cplx pair_with_form(const Current& f, const TestForm& phi, std::span<const double> t, double h,
                    kernels::Exec exec) {
  require(f.n == phi.n && f.m + phi.k == f.n, "pair_with_form: bidegrees do not add up to (n,n)");
  require(static_cast<int>(t.size()) == f.n, "pair_with_form: translation must lie in R^n");
  require(h > 0, "pair_with_form: spacing must be positive");
  const int n = f.n, d = 2 * n;
  for (int j = 0; j < n; ++j)
    require(std::abs(phi.centre[n + j]) + phi.radius < f.tube_half_width,
            "pair_with_form: support of the test form leaves the tube");
  const auto sets = multi_indices(n, f.m);
  const std::size_t w = sets.size();
  struct Entry {
    std::size_t ij;
    cplx factor;
  };
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < w; ++i)
    for (std::size_t j = 0; j < w; ++j)
      for (const auto& mono : phi.monomials) {
        const int s = wedge_sign(sets[i], sets[j], mono.K, mono.L);
        if (s != 0) entries.push_back({i * w + j, static_cast<double>(s) * mono.weight});
      }
  if (entries.empty()) return 0.0;
  const long count = static_cast<long>(std::ceil(2 * phi.radius / h)) + 1;
  std::vector<double> lo(d);
  std::vector<long> counts(d, count);
  for (int a = 0; a < d; ++a) lo[a] = phi.centre[a] - 0.5 * static_cast<double>(count - 1) * h;
  const auto integrand = [&](std::span<const double> r) -> cplx {
    const cplx p = phi.phi(r);
    if (p == cplx{0, 0}) return 0.0;
    std::vector<double> shifted(r.begin(), r.end());
    for (int j = 0; j < n; ++j) shifted[j] += t[j];
    const auto c = f.coefficients(complex_point(shifted));
    cplx s = 0;
    for (const auto& e : entries) s += e.factor * c[e.ij];
    return s * p;
  };
  return kernels::grid_integral(integrand, lo, counts, h, exec);
}

MeanCurrent mean_current(const Current& f, const Grid& y_grid, const std::vector<double>& nu_schedule, double tol,
                         double per_unit, kernels::Exec exec) {
  require(y_grid.dim() == f.n, "mean_current: y grid must have n axes");
  require(!nu_schedule.empty() && per_unit > 0, "mean_current: empty schedule");
  for (std::size_t k = 0; k < nu_schedule.size(); ++k)
    require(nu_schedule[k] > 0 && (k == 0 || nu_schedule[k] > nu_schedule[k - 1]),
            "mean_current: nu schedule must be positive and increasing");
  const int n = f.n;
  const std::size_t w = multi_indices(n, f.m).size();
  MeanCurrent out;
  out.y_grid = y_grid;
  out.nu_schedule = nu_schedule;
  for (double nu : nu_schedule) {
    const long cells = std::max(1L, static_cast<long>(std::ceil(2 * nu * per_unit)));
    const double hx = 2 * nu / static_cast<double>(cells);
    std::vector<double> lo(n, -nu + 0.5 * hx);
    std::vector<long> counts(n, cells);
    std::vector<cplx> layer(y_grid.size() * w * w);
    for (long s = 0; s < y_grid.size(); ++s) {
      const auto y = y_grid.point(s);
      for (std::size_t ij = 0; ij < w * w; ++ij) {
        const auto integrand = [&](std::span<const double> x) {
          std::vector<cplx> z(n);
          for (int j = 0; j < n; ++j) z[j] = {x[j], y[j]};
          return f.coefficients(z)[ij];
        };
        layer[s * w * w + ij] = kernels::grid_integral(integrand, lo, counts, hx, exec) / std::pow(2 * nu, n);
      }
    }
    if (!out.history.empty()) {
      double change = 0;
      for (std::size_t q = 0; q < layer.size(); ++q) change = std::max(change, std::abs(layer[q] - out.history.back()[q]));
      out.cauchy.push_back(change);
    }
    out.history.push_back(std::move(layer));
  }
  out.x_independent = !out.cauchy.empty() && out.cauchy.back() < tol;
  CurrentGrid& g = out.mean;
  g.n = n;
  g.m = f.m;
  g.grid = y_grid;
  g.roles.clear();
  for (int j = 0; j < n; ++j) g.roles.push_back(n + j);
  g.index_sets = multi_indices(n, f.m);
  g.coef = out.history.back();
  g.positive = f.positive;
  return out;
}

double closedness_residual(const CurrentGrid& f) {
  require(f.m == 1, "closedness_residual: implemented for (1,1)-currents");
  const int n = f.n;
  const Grid& g = f.grid;
  double worst = 0;
  for (long s = 0; s < g.size(); ++s) {
    const auto idx = g.index(s);
    bool interior = true;
    for (int a = 0; a < g.dim(); ++a) interior = interior && idx[a] > 0 && idx[a] < g.axes[a].count - 1;
    if (!interior) continue;
    // D[c][j][k]: derivative of F_jk along real coordinate c
    std::vector<cplx> deriv(2 * n * n * n, 0.0);
    for (int a = 0; a < g.dim(); ++a) {
      const long st = g.stride(a);
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          deriv[(f.roles[a] * n + j) * n + k] =
              (f.at(s + st, j, k) - f.at(s - st, j, k)) / (2 * g.axes[a].h);
    }
    const auto dz = [&](int l, int j, int k) {
      return 0.5 * (deriv[(l * n + j) * n + k] - I * deriv[((n + l) * n + j) * n + k]);
    };
    const auto dzb = [&](int l, int j, int k) {
      return 0.5 * (deriv[(l * n + j) * n + k] + I * deriv[((n + l) * n + j) * n + k]);
    };
    for (int l = 0; l < n; ++l)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          worst = std::max(worst, std::abs(dz(l, j, k) - dz(j, l, k)));
          worst = std::max(worst, std::abs(dzb(l, j, k) - dzb(k, j, l)));
        }
  }
  return worst;
}

double trace_bracket_sup(double y2, double x2_max, double dx) {
  require(x2_max > 0 && dx > 0, "trace_bracket_sup: bad grid");
  const long count = static_cast<long>(std::floor(2 * x2_max / dx + 0.5));
  double best = 0;
  for (long i = 0; i <= count; ++i) {
    const double x2 = -x2_max + static_cast<double>(i) * dx;
    best = std::max(best, (x2 * x2 + y2 * y2) * std::exp(-2 * (x2 * x2 - y2 * y2)));
  }
  return best;
}

}  // namespace apharm
