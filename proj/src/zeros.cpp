#include "apharm/zeros.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "apharm/error.hpp"
#include "apharm/summation.hpp"

namespace apharm {

namespace {

using std::numbers::pi;
constexpr cplx I{0.0, 1.0};
constexpr double kGolden = 0.6180339887498949;
constexpr double kResolution = 1e-6;
constexpr double kIntegrality = 0.05;
constexpr int kAttempts = 20;

double frac(double v) { return v - std::floor(v); }

struct Edge {
  cplx a, b;
};

std::array<Edge, 4> edges(const Rect& r) {
  const cplx p00{r.x0, r.y0}, p10{r.x1, r.y0}, p11{r.x1, r.y1}, p01{r.x0, r.y1};
  return {Edge{p00, p10}, Edge{p10, p11}, Edge{p11, p01}, Edge{p01, p00}};
}

long edge_panels(const Holo1D& f, double len) {
  const double periods = len * f.bandwidth / (2 * pi);
  return 32 + static_cast<long>(std::ceil(16 * periods));
}

cplx simpson(cplx fa, cplx fm, cplx fb, double w) { return (fa + 4.0 * fm + fb) * (w / 6.0); }

cplx adaptive(const std::function<cplx(double)>& q, double a, double b, cplx fa, cplx fm, cplx fb,
              cplx whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const cplx flm = q(0.5 * (a + m)), frm = q(0.5 * (m + b));
  const cplx left = simpson(fa, flm, fm, m - a), right = simpson(fm, frm, fb, b - m);
  const cplx delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15 * std::max(tol, 1e-10 * std::abs(whole))) return left + right + delta / 15.0;
  return adaptive(q, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive(q, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

// Integral of f'/f dz along the edge, or nullopt when a sample lies within
// a quarter sample spacing (in Newton distance) of a zero.
std::optional<cplx> edge_integral(const Holo1D& f, const Edge& e, int depth) {
  const cplx dz = e.b - e.a;
  const double len = std::abs(dz);
  const long n = edge_panels(f, len);
  const double spacing = len / static_cast<double>(n);
  std::vector<cplx> samples(2 * n + 1);
  for (long i = 0; i <= 2 * n; ++i) {
    const cplx z = e.a + dz * (static_cast<double>(i) / (2.0 * n));
    const cplx v = f.f(z), d = f.df(z);
    if (v == cplx{0, 0} || !std::isfinite(std::abs(v)) || !std::isfinite(std::abs(d))) return std::nullopt;
    if (4 * std::abs(v) < spacing * std::abs(d)) return std::nullopt;
    samples[i] = d / v * dz;
  }
  const auto q = [&](double t) {
    const cplx z = e.a + dz * t;
    return f.df(z) / f.f(z) * dz;
  };
  std::vector<cplx> parts(n);
  const double w = 1.0 / static_cast<double>(n);
  for (long i = 0; i < n; ++i) {
    const cplx fa = samples[2 * i], fm = samples[2 * i + 1], fb = samples[2 * i + 2];
    parts[i] = adaptive(q, i * w, (i + 1) * w, fa, fm, fb, simpson(fa, fm, fb, w), 1e-11, depth);
  }
  return pairwise_sum(parts);
}

// Locator checks only need the rounded winding, so they refine less deeply
// and do not chase the rounding floor next to multiple zeros.
constexpr int kFullDepth = 16, kCheckDepth = 4;

std::optional<double> try_winding(const Holo1D& f, const Rect& r, int depth = kFullDepth) {
  std::array<cplx, 4> parts;
  const auto es = edges(r);
  for (int k = 0; k < 4; ++k) {
    const auto v = edge_integral(f, es[k], depth);
    if (!v) return std::nullopt;
    parts[k] = *v;
  }
  const cplx total = pairwise_sum(parts);
  return (total / (2.0 * pi * I)).real();
}

bool integral_value(double w) { return std::abs(w - std::round(w)) <= kIntegrality; }

Rect dilate(const Rect& r, double factor) {
  const double cx = 0.5 * (r.x0 + r.x1), cy = 0.5 * (r.y0 + r.y1);
  const double hx = 0.5 * (r.x1 - r.x0) * factor, hy = 0.5 * (r.y1 - r.y0) * factor;
  return {cx - hx, cx + hx, cy - hy, cy + hy};
}

bool inside(const Rect& r, cplx z) {
  return z.real() > r.x0 && z.real() < r.x1 && z.imag() > r.y0 && z.imag() < r.y1;
}

struct Locator {
  const Holo1D& f;
  std::vector<ZeroPoint> points;
  long cells = 0;

  struct Root {
    cplx z;
    double floor;
  };

  std::optional<Root> newton(const Rect& cell, int mult) const {
    cplx z{0.5 * (cell.x0 + cell.x1), 0.5 * (cell.y0 + cell.y1)};
    cplx best = z;
    double best_v = std::numeric_limits<double>::infinity(), last = best_v;
    int stalled = 0;
    for (int it = 0; it < 60 && stalled < 3; ++it) {
      const cplx v = f.f(z), d = f.df(z);
      if (v == cplx{0, 0}) return Root{z, 0.0};
      if (std::abs(v) < best_v) {
        best_v = std::abs(v);
        best = z;
      }
      if (d == cplx{0, 0}) break;
      const cplx step = static_cast<double>(mult) * v / d;
      z -= step;
      if (!inside(cell, z)) return std::nullopt;
      if (std::abs(step) <= 1e-14 * (1.0 + std::abs(z))) return Root{z, std::abs(f.f(z))};
      stalled = std::abs(step) >= 0.5 * last ? stalled + 1 : 0;
      last = std::abs(step);
    }
    // multiple roots stall at the rounding floor; the tiny-box winding decides
    if (last <= 0.1 * kResolution) return Root{best, best_v};
    return std::nullopt;
  }

  void locate(const Rect& cell, int mult, int depth) {
    ++cells;
    if (mult == 0) return;
    if (const auto root = newton(cell, mult)) {
      // the check box grows until |f| on it clears the rounding floor by 1e6
      const cplx z = root->z;
      for (double r = 0.5 * kResolution;; r *= 4) {
        const Rect tiny{z.real() - r, z.real() + r, z.imag() - r, z.imag() + r};
        if (!(tiny.x0 > cell.x0 && tiny.x1 < cell.x1 && tiny.y0 > cell.y0 && tiny.y1 < cell.y1)) break;
        double lo = std::numeric_limits<double>::infinity();
        for (const auto& e : edges(tiny)) lo = std::min({lo, std::abs(f.f(e.a)), std::abs(f.f(0.5 * (e.a + e.b)))});
        if (lo < 1e6 * root->floor) continue;
        const auto w = try_winding(f, tiny, kCheckDepth);
        if (w && integral_value(*w) && std::lround(*w) == mult) {
          points.push_back({{z}, mult});
          return;
        }
        break;
      }
    }
    if (std::max(cell.x1 - cell.x0, cell.y1 - cell.y0) <= kResolution || depth > 60) {
      points.push_back({{cplx{0.5 * (cell.x0 + cell.x1), 0.5 * (cell.y0 + cell.y1)}}, mult});
      return;
    }
    for (int a = 0; a < kAttempts; ++a) {
      const double fx = 0.5 + 0.4 * (frac((a + 1) * kGolden) - 0.5);
      const double fy = 0.5 + 0.4 * (frac((a + 1) * kGolden * kGolden + 0.3) - 0.5);
      const double xm = cell.x0 + fx * (cell.x1 - cell.x0), ym = cell.y0 + fy * (cell.y1 - cell.y0);
      // long thin cells are cut across their long side only
      const double wx = cell.x1 - cell.x0, wy = cell.y1 - cell.y0;
      std::vector<Rect> kids;
      if (wx > 2 * wy)
        kids = {Rect{cell.x0, xm, cell.y0, cell.y1}, Rect{xm, cell.x1, cell.y0, cell.y1}};
      else if (wy > 2 * wx)
        kids = {Rect{cell.x0, cell.x1, cell.y0, ym}, Rect{cell.x0, cell.x1, ym, cell.y1}};
      else
        kids = {Rect{cell.x0, xm, cell.y0, ym}, Rect{xm, cell.x1, cell.y0, ym}, Rect{cell.x0, xm, ym, cell.y1},
                Rect{xm, cell.x1, ym, cell.y1}};
      std::vector<int> w(kids.size());
      bool ok = true;
      long sum = 0;
      for (std::size_t k = 0; k < kids.size() && ok; ++k) {
        const auto v = try_winding(f, kids[k], kCheckDepth);
        ok = v && integral_value(*v) && std::lround(*v) >= 0;
        if (ok) {
          w[k] = static_cast<int>(std::lround(*v));
          sum += w[k];
        }
      }
      if (!ok || sum != mult) continue;
      for (std::size_t k = 0; k < kids.size(); ++k) locate(kids[k], w[k], depth + 1);
      return;
    }
    throw NumericError("zeros_in_rectangle: no zero-free subdivision of [" + std::to_string(cell.x0) + ", " +
                       std::to_string(cell.x1) + "] x [" + std::to_string(cell.y0) + ", " + std::to_string(cell.y1) +
                       "] found");
  }
};

}  // namespace

Holo1D Holo1D::from(const ExpSum& g) {
  require(g.dim() == 1, "Holo1D: ExpSum must have one variable");
  const ExpSum dg = g.derivative(0);
  double bw = 0;
  if (!g.empty()) bw = g.max_abs_freq()[0];
  return {[g](cplx z) { return g(z); }, [dg](cplx z) { return dg(z); }, std::max(bw, 1e-3)};
}

double winding_number(const Holo1D& f, const Rect& rect) {
  const auto w = try_winding(f, rect);
  if (!w) throw NumericError("winding_number: contour passes through or next to a zero");
  return *w;
}

DivisorSample zeros_in_rectangle(const Holo1D& f, const Rect& rect) {
  require(rect.x0 < rect.x1 && rect.y0 < rect.y1, "zeros_in_rectangle: empty rectangle");
  DivisorSample out;
  std::optional<double> w;
  Rect used = rect;
  for (int k = 0; k <= kAttempts; ++k) {
    used = k == 0 ? rect : dilate(rect, 1.0 + std::ldexp(frac(k * kGolden), -6));
    w = try_winding(f, used);
    if (w) {
      out.dilations = k;
      break;
    }
  }
  if (!w) throw NumericError("zeros_in_rectangle: every perturbed contour passes next to a zero");
  if (!integral_value(*w))
    throw NumericError("zeros_in_rectangle: winding integral " + std::to_string(*w) + " is not an integer");
  out.window = {"rectangle", {used.x0, used.y0}, {used.x1, used.y1}};
  Locator loc{f, {}, 0};
  loc.locate(used, static_cast<int>(std::lround(*w)), 0);
  out.points = std::move(loc.points);
  std::sort(out.points.begin(), out.points.end(), [](const ZeroPoint& a, const ZeroPoint& b) {
    const cplx za = a.z[0], zb = b.z[0];
    return za.real() != zb.real() ? za.real() < zb.real() : za.imag() < zb.imag();
  });
  for (const auto& p : out.points) out.total_mass += p.mult;
  out.cells_examined = loc.cells;
  return out;
}

DivisorSample zeros_in_rectangle(const ExpSum& f, const Rect& rect) {
  require(!f.is_zero_expression(), "zeros_in_rectangle: f is identically zero");
  return zeros_in_rectangle(Holo1D::from(f), rect);
}

namespace {

// Length of {y in box : <y, lambda> = c} for a unit lambda in R^2.
double line_in_box(const RealVec& lambda, double c, std::span<const double> lo, std::span<const double> hi) {
  const double p0 = c * lambda[0], p1 = c * lambda[1];
  const double d0 = -lambda[1], d1 = lambda[0];
  double tmin = -std::numeric_limits<double>::infinity(), tmax = std::numeric_limits<double>::infinity();
  const double p[2] = {p0, p1}, d[2] = {d0, d1};
  for (int j = 0; j < 2; ++j) {
    if (std::abs(d[j]) < 1e-15) {
      if (p[j] <= lo[j] || p[j] >= hi[j]) return 0;
      continue;
    }
    double t0 = (lo[j] - p[j]) / d[j], t1 = (hi[j] - p[j]) / d[j];
    if (t0 > t1) std::swap(t0, t1);
    tmin = std::max(tmin, t0);
    tmax = std::min(tmax, t1);
  }
  return std::max(0.0, tmax - tmin);
}

double hyperplane_volume(const HyperplaneDivisor& d, std::span<const double> lo, std::span<const double> hi,
                         double nu, double h, bool& flag) {
  require(d.n == 1 || d.n == 2, "density_estimate: hyperplane divisors are supported for n <= 2");
  std::vector<double> parts;
  for (const auto& fam : d.families) {
    require(static_cast<int>(fam.lambda.size()) == d.n, "density_estimate: family dimension mismatch");
    double norm = 0;
    for (double v : fam.lambda) norm += v * v;
    norm = std::sqrt(norm);
    require(norm > 0, "density_estimate: zero normal vector");
    RealVec lam = fam.lambda;
    for (double& v : lam) v /= norm;
    const double hh = fam.h / norm;
    for (int j = 0; j < d.n; ++j)
      if (std::abs(lam[j]) > 1 - 1e-12) {
        const double yj = hh / lam[j];
        if (std::abs(yj - lo[j]) < h || std::abs(yj - hi[j]) < h) flag = true;
      }
    if (d.n == 1) {
      const double y = hh / lam[0];
      if (!(y > lo[0] && y < hi[0])) continue;
      for (const auto& [alpha, mult] : fam.alphas(-nu * norm, nu * norm)) parts.push_back(mult);
    } else {
      const double ly = line_in_box(lam, hh, lo, hi);
      if (ly == 0) continue;
      const double reach = nu * (std::abs(lam[0]) + std::abs(lam[1])) * norm;
      const double xlo[2] = {-nu, -nu}, xhi[2] = {nu, nu};
      for (const auto& [alpha, mult] : fam.alphas(-reach, reach))
        parts.push_back(mult * ly * line_in_box(lam, alpha / norm, xlo, xhi));
    }
  }
  return pairwise_sum(parts);
}

}  // namespace

DensityEstimate density_estimate(const DivisorSource& src, std::span<const double> gp_lo,
                                 std::span<const double> gp_hi, const std::vector<double>& nu_schedule,
                                 double h) {
  require(!nu_schedule.empty(), "density_estimate: empty nu schedule");
  for (std::size_t k = 0; k < nu_schedule.size(); ++k) {
    require(nu_schedule[k] > 0, "density_estimate: nu must be positive");
    require(k == 0 || nu_schedule[k] > nu_schedule[k - 1], "density_estimate: nu schedule must increase");
  }
  require(gp_lo.size() == gp_hi.size() && !gp_lo.empty(), "density_estimate: malformed G'");
  for (std::size_t j = 0; j < gp_lo.size(); ++j) require(gp_lo[j] < gp_hi[j], "density_estimate: empty G'");
  const int n = static_cast<int>(gp_lo.size());

  DensityEstimate est;
  est.nu_schedule = nu_schedule;
  for (double nu : nu_schedule) {
    double volume = 0;
    if (const auto* f = std::get_if<ExpSum>(&src)) {
      require(f->dim() == 1 && n == 1, "density_estimate: ExpSum sources must have one variable");
      const auto s = zeros_in_rectangle(*f, Rect{-nu, nu, gp_lo[0], gp_hi[0]});
      volume = static_cast<double>(s.total_mass);
      for (const auto& p : s.points)
        if (std::abs(p.z[0].imag() - gp_lo[0]) < h || std::abs(p.z[0].imag() - gp_hi[0]) < h)
          est.boundary_flag = true;
    } else if (const auto* d = std::get_if<HyperplaneDivisor>(&src)) {
      require(d->n == n, "density_estimate: divisor dimension differs from G'");
      volume = hyperplane_volume(*d, gp_lo, gp_hi, nu, h, est.boundary_flag);
    }
    est.values.push_back(volume / std::pow(2 * nu, n));
  }
  for (std::size_t k = 1; k < est.values.size(); ++k)
    est.cauchy.push_back(std::abs(est.values[k] - est.values[k - 1]));
  est.value = est.values.back();
  return est;
}

ChainWitness ap_chain_witness(const WitnessSource& src, const std::vector<RealVec>& translations,
                              double bump_radius) {
  require(!translations.empty(), "ap_chain_witness: no translations");
  require(bump_radius > 0, "ap_chain_witness: radius must be positive");
  ChainWitness out;
  for (const auto& t : translations) {
    long mass = 0;
    if (const auto* map = std::get_if<CounterexampleMap>(&src)) {
      require(t.size() == 2, "ap_chain_witness: translations must lie in R^2");
      const cplx centre[2] = {cplx{t[0], 0}, cplx{t[1], 0}};
      mass = counterexample::map_zero_census(*map, centre, bump_radius).total_mass;
    } else if (const auto* f = std::get_if<ExpSum>(&src)) {
      require(f->dim() == 1 && !t.empty(), "ap_chain_witness: one-variable source needs a translation");
      const double r = bump_radius;
      const auto s = zeros_in_rectangle(*f, Rect{t[0] - r, t[0] + r, -r, r});
      for (const auto& p : s.points)
        if (std::abs(p.z[0] - cplx{t[0], 0}) < r * (1 - 1e-9)) mass += p.mult;
    }
    out.masses.push_back(mass);
    out.max_mass = std::max(out.max_mass, mass);
  }
  bool increasing = out.masses.size() >= 2;
  for (std::size_t k = 1; k < out.masses.size(); ++k) increasing = increasing && out.masses[k] > out.masses[k - 1];
  out.verdict = increasing ? "unbounded-trend" : "bounded";
  return out;
}

}  // namespace apharm
