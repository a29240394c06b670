#include "apharm/jessen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "apharm/error.hpp"
#include "apharm/summation.hpp"

namespace apharm {

double JessenProfile::value_range() const {
  if (values.empty()) return 0;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return *hi - *lo;
}

double DensityMeasure::total() const { return pairwise_sum(masses); }

namespace jessen {

namespace {

bool interior(const Grid& g, std::span<const long> idx) {
  for (int j = 0; j < g.dim(); ++j)
    if (idx[j] == 0 || idx[j] == g.axes[j].count - 1) return false;
  return true;
}

double common_spacing(const Grid& g) {
  const double h = g.axes[0].h;
  for (const auto& a : g.axes)
    require(std::abs(a.h - h) <= 1e-12 * h, "Riesz measure: grid spacing must agree across axes");
  return h;
}

// Second difference along `axis` at flat index `flat`.
double second_difference(const JessenProfile& p, long flat, int axis) {
  const long s = p.grid.stride(axis);
  return p.values[flat + s] - 2.0 * p.values[flat] + p.values[flat - s];
}

// Laplacian-mass of the cell around an interior node: sum of second
// differences times h^{n-2}.
double node_mass(const JessenProfile& p, long flat, double h) {
  double lap = 0;
  for (int j = 0; j < p.grid.dim(); ++j) lap += second_difference(p, flat, j);
  return lap * std::pow(h, p.grid.dim() - 2);
}

double overlap(const Box& a, const Box& b) {
  double v = 1;
  for (std::size_t j = 0; j < a.lo.size(); ++j) {
    const double w = std::min(a.hi[j], b.hi[j]) - std::max(a.lo[j], b.lo[j]);
    if (w <= 0) return 0;
    v *= w;
  }
  return v;
}

std::vector<Box> uniform_partition(const Grid& g, int per_axis) {
  std::vector<Box> bins;
  const int n = g.dim();
  long total = 1;
  for (int j = 0; j < n; ++j) total *= per_axis;
  for (long b = 0; b < total; ++b) {
    Box box{std::vector<double>(n), std::vector<double>(n)};
    long rem = b;
    for (int j = n - 1; j >= 0; --j) {
      const long k = rem % per_axis;
      rem /= per_axis;
      const double lo = g.axes[j].lo, hi = g.axes[j].hi();
      const double w = (hi - lo) / per_axis;
      box.lo[j] = lo + k * w;
      box.hi[j] = (k + 1 == per_axis) ? hi + g.axes[j].h : lo + (k + 1) * w;
    }
    bins.push_back(std::move(box));
  }
  return bins;
}

}  // namespace

JessenProfile jessen_profile(const ExpSum& f, const Grid& y_grid, std::vector<double> nu_schedule,
                             kernels::Exec exec) {
  require(!f.is_zero_expression(), "jessen_profile: f is identically zero");
  require(y_grid.dim() == f.dim(), "jessen_profile: grid dimension differs from f");
  require(!nu_schedule.empty(), "jessen_profile: empty nu schedule");
  for (std::size_t k = 0; k < nu_schedule.size(); ++k) {
    require(nu_schedule[k] > 0, "jessen_profile: nu must be positive");
    require(k == 0 || nu_schedule[k] > nu_schedule[k - 1], "jessen_profile: nu schedule must increase");
  }
  JessenProfile p;
  p.grid = y_grid;
  p.nu_schedule = nu_schedule;
  const long samples = y_grid.size();
  p.history.assign(nu_schedule.size(), std::vector<double>(samples));
  p.values.resize(samples);
  p.error.resize(samples);
  p.flagged.assign(samples, 0);
  for (long s = 0; s < samples; ++s) {
    const auto y = y_grid.point(s);
    for (std::size_t k = 0; k < nu_schedule.size(); ++k) {
      const auto r = kernels::log_modulus_mean(f, y, nu_schedule[k], exec);
      p.history[k][s] = r.value;
      if (r.flagged) p.flagged[s] = 1;
    }
    p.values[s] = p.history.back()[s];
    p.error[s] = nu_schedule.size() > 1
                     ? std::abs(p.history.back()[s] - p.history[nu_schedule.size() - 2][s])
                     : std::numeric_limits<double>::infinity();
  }
  return p;
}

JessenProfile profile_from_values(const Grid& grid, std::vector<double> values) {
  require(static_cast<long>(values.size()) == grid.size(), "profile_from_values: size mismatch");
  JessenProfile p;
  p.grid = grid;
  p.values = std::move(values);
  p.error.assign(p.values.size(), 0.0);
  p.flagged.assign(p.values.size(), 0);
  return p;
}

double convexity_tolerance(const JessenProfile& p) { return 1e-6 * std::max(p.value_range(), 1e-300); }

double min_curvature(const JessenProfile& p, Precondition pre) {
  double worst = std::numeric_limits<double>::infinity();
  for (long s = 0; s < p.grid.size(); ++s) {
    const auto idx = p.grid.index(s);
    if (pre == Precondition::convex) {
      for (int j = 0; j < p.grid.dim(); ++j) {
        if (idx[j] == 0 || idx[j] == p.grid.axes[j].count - 1) continue;
        worst = std::min(worst, second_difference(p, s, j));
      }
    } else if (interior(p.grid, idx)) {
      double lap = 0;
      for (int j = 0; j < p.grid.dim(); ++j) lap += second_difference(p, s, j);
      worst = std::min(worst, lap);
    }
  }
  return worst;
}

DensityMeasure riesz_measure(const JessenProfile& p, const std::vector<Box>& bins, double normalization,
                             Precondition pre) {
  require(normalization > 0, "riesz_measure: normalization must be positive");
  require(!bins.empty(), "riesz_measure: no bins");
  const double h = common_spacing(p.grid);
  double tol = convexity_tolerance(p);
  if (pre == Precondition::subharmonic) {
    // Piecewise-constant densities have log-singular second derivatives at
    // bin corners, where the 5-point stencil dips below zero.
    double peak = 0;
    for (long s = 0; s < p.grid.size(); ++s) {
      const auto idx = p.grid.index(s);
      if (!interior(p.grid, idx)) continue;
      double lap = 0;
      for (int j = 0; j < p.grid.dim(); ++j) lap += second_difference(p, s, j);
      peak = std::max(peak, lap);
    }
    tol = std::max(tol, 1e-2 * peak);
  }
  if (min_curvature(p, pre) < -tol)
    throw InputError(pre == Precondition::convex ? "riesz_measure: profile fails the convexity check"
                                                 : "riesz_measure: profile fails the subharmonicity check");
  std::vector<std::vector<double>> per_bin(bins.size());
  for (long s = 0; s < p.grid.size(); ++s) {
    const auto idx = p.grid.index(s);
    if (!interior(p.grid, idx)) continue;
    const auto y = p.grid.point(s);
    const auto it = std::find_if(bins.begin(), bins.end(), [&](const Box& b) { return b.contains(y); });
    if (it == bins.end()) throw InputError("riesz_measure: bins do not cover the profile grid");
    double m = node_mass(p, s, h);
    if (m < 0 && m >= -tol * std::pow(h, p.grid.dim() - 2) * p.grid.dim()) m = 0;
    per_bin[it - bins.begin()].push_back(m);
  }
  DensityMeasure mu;
  mu.bins = bins;
  mu.normalization = normalization;
  for (auto& v : per_bin) mu.masses.push_back(std::max(0.0, normalization * pairwise_sum(v)));
  return mu;
}

DensityMeasure rebin(const DensityMeasure& mu, const std::vector<Box>& bins) {
  DensityMeasure out;
  out.bins = bins;
  out.normalization = mu.normalization;
  for (const auto& target : bins) {
    std::vector<double> parts;
    for (std::size_t i = 0; i < mu.bins.size(); ++i) {
      const Box& src = mu.bins[i];
      if (src.is_atom()) {
        if (target.contains(src.lo)) parts.push_back(mu.masses[i]);
      } else {
        const double ov = overlap(src, target);
        if (ov > 0) parts.push_back(mu.masses[i] * ov / src.volume());
      }
    }
    out.masses.push_back(pairwise_sum(parts));
  }
  return out;
}

double l1_relative(const DensityMeasure& a, const DensityMeasure& b) {
  require(a.masses.size() == b.masses.size(), "l1_relative: bin count mismatch");
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.masses.size(); ++i) {
    num += std::abs(a.laplacian_mass(i) - b.laplacian_mass(i));
    den += std::abs(b.laplacian_mass(i));
  }
  return den == 0 ? num : num / den;
}

namespace {

// (1/2) * integral of |y - s| ds / (b - a) over [a, b]
double hinge_kernel_1d(double y, double a, double b) {
  if (a == b) return 0.5 * std::abs(y - a);
  if (y <= a) return 0.5 * ((a + b) / 2 - y);
  if (y >= b) return 0.5 * (y - (a + b) / 2);
  return 0.5 * ((y - a) * (y - a) + (b - y) * (b - y)) / (2.0 * (b - a));
}

// Bins below 1e-9 of the total mass count as roundoff, not support.
void check_support(const DensityMeasure& mu, const Grid& g) {
  const double floor = 1e-9 * std::abs(mu.total());
  for (std::size_t i = 0; i < mu.bins.size(); ++i) {
    require(mu.masses[i] >= 0, "reconstruct_convex: measure has a negative bin");
    if (mu.masses[i] <= floor) continue;
    const Box& b = mu.bins[i];
    require(static_cast<int>(b.lo.size()) == g.dim(), "reconstruct_convex: bin dimension mismatch");
    for (int j = 0; j < g.dim(); ++j)
      require(b.lo[j] > g.axes[j].lo && b.hi[j] < g.axes[j].hi(),
              "reconstruct_convex: support touches the boundary of G");
  }
}

}  // namespace

ConvexRecovery reconstruct_convex(const DensityMeasure& mu, int base_dim, const Grid& out_grid,
                                  kernels::Exec exec) {
  require(base_dim == 1 || base_dim == 2, "reconstruct_convex: base_dim must be 1 or 2");
  require(out_grid.dim() == base_dim, "reconstruct_convex: grid dimension differs from base_dim");
  require(mu.masses.size() == mu.bins.size(), "reconstruct_convex: malformed measure");
  check_support(mu, out_grid);

  ConvexRecovery rec;
  rec.grid = out_grid;
  const long nodes = out_grid.size();
  rec.potential.assign(nodes, 0.0);
  if (base_dim == 1) {
    for (long s = 0; s < nodes; ++s) {
      const double y = out_grid.axes[0].at(s);
      std::vector<double> terms;
      for (std::size_t i = 0; i < mu.bins.size(); ++i)
        if (mu.masses[i] != 0)
          terms.push_back(mu.laplacian_mass(i) * hinge_kernel_1d(y, mu.bins[i].lo[0], mu.bins[i].hi[0]));
      rec.potential[s] = pairwise_sum(terms);
    }
  } else {
    std::vector<kernels::DensityBox> boxes;
    for (std::size_t i = 0; i < mu.bins.size(); ++i) {
      if (mu.masses[i] == 0) continue;
      require(!mu.bins[i].is_atom(), "reconstruct_convex: atoms are not supported on a 2D base");
      const Box& b = mu.bins[i];
      boxes.push_back({{b.lo[0], b.lo[1]}, {b.hi[0], b.hi[1]}, mu.laplacian_mass(i) / b.volume()});
    }
    std::vector<double> a0(out_grid.axes[0].count), a1(out_grid.axes[1].count);
    for (long i = 0; i < out_grid.axes[0].count; ++i) a0[i] = out_grid.axes[0].at(i);
    for (long i = 0; i < out_grid.axes[1].count; ++i) a1[i] = out_grid.axes[1].at(i);
    rec.potential = kernels::log_potential_2d(boxes, a0, a1, exec);
  }

  // Linear correction: 1D removes the chord through the end values, 2D the
  // least-squares plane.
  rec.correction.assign(nodes, 0.0);
  if (base_dim == 1) {
    const double y0 = out_grid.axes[0].lo, y1 = out_grid.axes[0].hi();
    const double v0 = rec.potential.front(), v1 = rec.potential.back();
    for (long s = 0; s < nodes; ++s) {
      const double t = (nodes > 1) ? (out_grid.axes[0].at(s) - y0) / (y1 - y0) : 0.0;
      rec.correction[s] = -(v0 + t * (v1 - v0));
    }
  } else {
    double m[3][3] = {}, r[3] = {};
    for (long s = 0; s < nodes; ++s) {
      const auto y = out_grid.point(s);
      const double basis[3] = {1.0, y[0], y[1]};
      for (int a = 0; a < 3; ++a) {
        r[a] += basis[a] * rec.potential[s];
        for (int b = 0; b < 3; ++b) m[a][b] += basis[a] * basis[b];
      }
    }
    // Gaussian elimination on the 3x3 normal equations
    for (int col = 0; col < 3; ++col) {
      int piv = col;
      for (int row = col + 1; row < 3; ++row)
        if (std::abs(m[row][col]) > std::abs(m[piv][col])) piv = row;
      std::swap(m[col], m[piv]);
      std::swap(r[col], r[piv]);
      for (int row = 0; row < 3; ++row) {
        if (row == col) continue;
        const double f = m[row][col] / m[col][col];
        for (int k = 0; k < 3; ++k) m[row][k] -= f * m[col][k];
        r[row] -= f * r[col];
      }
    }
    const double c0 = r[0] / m[0][0], c1 = r[1] / m[1][1], c2 = r[2] / m[2][2];
    for (long s = 0; s < nodes; ++s) {
      const auto y = out_grid.point(s);
      rec.correction[s] = -(c0 + c1 * y[0] + c2 * y[1]);
    }
  }
  rec.combined.resize(nodes);
  for (long s = 0; s < nodes; ++s) rec.combined[s] = rec.potential[s] + rec.correction[s];

  const JessenProfile prof = profile_from_values(out_grid, rec.combined);
  const double tol = convexity_tolerance(prof);
  rec.convex = min_curvature(prof, Precondition::convex) >= -tol;
  // Certificate on the input bins when they are cells covering the grid,
  // otherwise on an 8-per-axis partition of the grid hull.
  const bool atomic = std::any_of(mu.bins.begin(), mu.bins.end(), [](const Box& b) { return b.is_atom(); });
  bool done = false;
  if (!atomic) {
    try {
      const auto recovered = riesz_measure(prof, mu.bins, mu.normalization, Precondition::subharmonic);
      rec.laplacian_l1_error = l1_relative(recovered, mu);
      done = true;
    } catch (const InputError&) {
    }
  }
  if (!done) {
    const auto coarse = uniform_partition(out_grid, 8);
    const auto recovered = riesz_measure(prof, coarse, mu.normalization, Precondition::subharmonic);
    rec.laplacian_l1_error = l1_relative(recovered, rebin(mu, coarse));
  }
  return rec;
}

DensityMeasure disk_measure(double c0, double c1, double r, double mass, double lo0, double hi0,
                            double lo1, double hi1, double bin, double normalization) {
  require(r > 0 && mass >= 0 && bin > 0, "disk_measure: bad parameters");
  const long n0 = static_cast<long>(std::round((hi0 - lo0) / bin));
  const long n1 = static_cast<long>(std::round((hi1 - lo1) / bin));
  require(n0 > 0 && n1 > 0, "disk_measure: empty tiling");
  DensityMeasure mu;
  mu.normalization = normalization;
  std::vector<double> areas;
  constexpr int kSub = 64;
  for (long i = 0; i < n0; ++i)
    for (long j = 0; j < n1; ++j) {
      Box b{{lo0 + i * bin, lo1 + j * bin}, {lo0 + (i + 1) * bin, lo1 + (j + 1) * bin}};
      const double dx = std::max({b.lo[0] - c0, 0.0, c0 - b.hi[0]});
      const double dy = std::max({b.lo[1] - c1, 0.0, c1 - b.hi[1]});
      double area = 0;
      if (dx * dx + dy * dy < r * r) {
        const double fx = std::max(std::abs(b.lo[0] - c0), std::abs(b.hi[0] - c0));
        const double fy = std::max(std::abs(b.lo[1] - c1), std::abs(b.hi[1] - c1));
        if (fx * fx + fy * fy <= r * r) {
          area = bin * bin;
        } else {
          long inside = 0;
          for (int a = 0; a < kSub; ++a)
            for (int c = 0; c < kSub; ++c) {
              const double px = b.lo[0] + (a + 0.5) * bin / kSub - c0;
              const double py = b.lo[1] + (c + 0.5) * bin / kSub - c1;
              if (px * px + py * py < r * r) ++inside;
            }
          area = bin * bin * static_cast<double>(inside) / (kSub * kSub);
        }
      }
      mu.bins.push_back(std::move(b));
      areas.push_back(area);
    }
  const double total_area = pairwise_sum(areas);
  for (double a : areas) mu.masses.push_back(total_area > 0 ? normalization * mass * a / total_area : 0.0);
  return mu;
}

ObstructionMatrix obstruction_constants(const std::vector<std::vector<cplx>>& theta, int n,
                                        double hermitian_tol) {
  require(n > 0, "obstruction_constants: n must be positive");
  require(!theta.empty(), "obstruction_constants: no samples");
  ObstructionMatrix out;
  out.n = n;
  out.c.assign(n * n, 0.0);
  out.residuals.assign(n * n, 0.0);
  for (const auto& m : theta) {
    require(static_cast<int>(m.size()) == n * n, "obstruction_constants: sample is not n x n");
    for (const auto& v : m) out.scale = std::max(out.scale, std::abs(v));
  }
  const double herm_bound = hermitian_tol * std::max(1.0, out.scale);
  for (const auto& m : theta)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (std::abs(m[j * n + k] - std::conj(m[k * n + j])) > herm_bound)
          throw InputError("obstruction_constants: coefficient field is not Hermitian");

  out.tolerance = 1e-3 * out.scale;
  double cmax = 0;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      std::vector<double> im(theta.size());
      for (std::size_t s = 0; s < theta.size(); ++s)
        im[s] = 0.5 * (theta[s][j * n + k] + std::conj(theta[s][k * n + j])).imag();
      const double c = pairwise_sum(im) / static_cast<double>(im.size());
      double res = 0;
      for (double v : im) res = std::max(res, std::abs(v - c));
      out.c[j * n + k] = c;
      out.c[k * n + j] = -c;
      out.residuals[j * n + k] = out.residuals[k * n + j] = res;
      cmax = std::max(cmax, std::abs(c));
    }
  out.realizable_candidate = cmax < out.tolerance;
  return out;
}

}  // namespace jessen
}  // namespace apharm
