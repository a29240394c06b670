#include "apharm/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "apharm/currents.hpp"
#include "apharm/error.hpp"
#include "apharm/io.hpp"
#include "apharm/jessen.hpp"
#include "apharm/pldiv.hpp"
#include "apharm/zeros.hpp"

namespace apharm::cli {

namespace {

namespace fs = std::filesystem;
using io::num;

struct Globals {
  std::string nu = "10,20,40,80";
  double grid_h = 0.05;
  double tol = 1e-3;
  std::string out = ".";
  unsigned long long seed = 0;
};

struct Args {
  std::string expsum, profile, measure, input, potential, form = "trace", rect, atoms, disk, mode = "exact";
  std::string z, y, lambda, t, y_lo, y_hi, gp_lo, gp_hi, scan_lo, scan_hi, divisor;
  double eps = 0.1, step = 0.01, bin_width = 0.1, radius = 0.45, normalization = kRieszNormalization;
  int base_dim = 1, pmax = 37, K = 0;
  bool squared = false, subharmonic = false;
};

std::vector<double> list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw InputError(what + ": cannot parse '" + cell + "'");
    }
  }
  if (out.empty()) throw InputError(what + ": empty list");
  return out;
}

std::vector<cplx> complex_list(const std::string& s, const std::string& what) {
  const auto v = list(s, what);
  require(v.size() % 2 == 0, what + ": expected re,im pairs");
  std::vector<cplx> z;
  for (std::size_t i = 0; i < v.size(); i += 2) z.emplace_back(v[i], v[i + 1]);
  return z;
}

class Runner {
public:
  Runner(const Globals& g, const Args& a, std::ostream& out, std::string command)
      : g_(g), a_(a), out_(out), meta_{std::move(command), g.seed, g.tol} {
    require(g.grid_h > 0 && g.tol > 0, "--grid-h and --tol must be positive");
  }

  int ap_eval() {
    const auto f = load_expsum();
    const auto z = complex_list(need(a_.z, "--z"), "--z");
    out_ << num(apcore::eval(f, z)) << "\n";
    return 0;
  }

  int ap_mean() {
    const auto f = load_expsum();
    const auto y = list(need(a_.y, "--y"), "--y");
    if (a_.mode == "exact") {
      out_ << num(apcore::bohr_mean(f, y, apcore::MeanMode::exact).value) << "\n";
    } else if (a_.mode == "numeric") {
      const auto r = apcore::bohr_mean(f, y, apcore::MeanMode::numeric, nu().back());
      out_ << num(r.value) << " bound=" << num(r.error_bound) << "\n";
    } else {
      throw InputError("--mode must be exact or numeric");
    }
    return 0;
  }

  int ap_coeff() {
    const auto f = load_expsum();
    const auto c = apcore::fourier_coefficient(f, list(need(a_.lambda, "--lambda"), "--lambda"),
                                               list(need(a_.y, "--y"), "--y"));
    out_ << "a=" << num(c.at_height) << " c=" << num(c.tube) << "\n";
    return 0;
  }

  int ap_test() {
    const auto f = load_expsum();
    const auto cert = apcore::epsilon_translation_set(
        f, a_.eps, list(need(a_.gp_lo, "--gp-lo"), "--gp-lo"), list(need(a_.gp_hi, "--gp-hi"), "--gp-hi"),
        list(need(a_.scan_lo, "--scan-lo"), "--scan-lo"), list(need(a_.scan_hi, "--scan-hi"), "--scan-hi"),
        a_.step);
    io::write_json(path("ap_test.json"), io::to_json(cert), meta_);
    out_ << "witnesses=" << cert.witnesses.size() << " L="
         << (cert.relatively_dense ? num(cert.window_half_length) : std::string("inf")) << "\n";
    return 0;
  }

  int jessen_compute() {
    const auto p = profile();
    io::write_text(path("jessen_profile.csv"), io::profile_csv(p, meta_));
    plot_profile(p, "jessen_profile", "Jessen function");
    const auto [lo, hi] = std::minmax_element(p.values.begin(), p.values.end());
    const long flagged = std::count(p.flagged.begin(), p.flagged.end(), 1);
    out_ << "samples=" << p.grid.size() << " min=" << num(*lo) << " max=" << num(*hi) << " flagged=" << flagged
         << "\n";
    return 0;
  }

  int jessen_riesz() {
    const auto p = a_.profile.empty() ? profile() : io::profile_from_csv(io::read_text(a_.profile));
    const auto mu = jessen::riesz_measure(p, tiling(p.grid, a_.bin_width), a_.normalization,
                                          a_.subharmonic ? jessen::Precondition::subharmonic
                                                         : jessen::Precondition::convex);
    io::write_text(path("riesz_measure.csv"), io::measure_csv(mu, meta_));
    out_ << "bins=" << mu.bins.size() << " total=" << num(mu.total()) << "\n";
    return 0;
  }

  int jessen_reconstruct() {
    DensityMeasure mu;
    if (!a_.measure.empty()) {
      mu = io::measure_from_csv(io::read_text(a_.measure), a_.normalization);
    } else if (!a_.atoms.empty()) {
      mu.normalization = a_.normalization;
      std::stringstream ss(a_.atoms);
      std::string cell;
      while (std::getline(ss, cell, ',')) {
        const auto colon = cell.find(':');
        require(colon != std::string::npos, "--atoms: expected position:mass");
        const double s = list(cell.substr(0, colon), "--atoms").front();
        mu.bins.push_back({{s}, {s}});
        mu.masses.push_back(list(cell.substr(colon + 1), "--atoms").front());
      }
    } else if (!a_.disk.empty()) {
      const auto d = list(a_.disk, "--disk");
      require(d.size() == 4, "--disk: expected c0,c1,r,mass");
      const auto lo = list(need(a_.y_lo, "--y-lo"), "--y-lo"), hi = list(need(a_.y_hi, "--y-hi"), "--y-hi");
      require(lo.size() == 2 && hi.size() == 2, "--disk needs a 2D grid");
      mu = jessen::disk_measure(d[0], d[1], d[2], d[3] / a_.normalization, lo[0], hi[0], lo[1], hi[1], a_.bin_width,
                                a_.normalization);
    } else {
      throw InputError("jessen reconstruct: give --measure, --atoms or --disk");
    }
    const Grid grid = y_grid();
    const auto rec = jessen::reconstruct_convex(mu, grid.dim(), grid);
    std::ostringstream os;
    os << io::header_line(meta_) << "\n";
    for (int j = 0; j < grid.dim(); ++j) os << "y_" << (j + 1) << ",";
    os << "A1,A2,A\n";
    for (long s = 0; s < grid.size(); ++s) {
      for (double v : grid.point(s)) os << num(v) << ",";
      os << num(rec.potential[s]) << "," << num(rec.correction[s]) << "," << num(rec.combined[s]) << "\n";
    }
    io::write_text(path("reconstruct.csv"), os.str());
    out_ << "convex=" << (rec.convex ? "true" : "false") << " laplacian_l1_error=" << num(rec.laplacian_l1_error)
         << "\n";
    return 0;
  }

  int jessen_obstruction() {
    const auto u = PotentialField::registered(need(a_.potential, "--potential"));
    const auto mc = mean_current(ddc(u), y_grid(), nu(), g_.tol, 4);
    const auto ob = jessen::obstruction_constants(theta_samples(mc.mean), u.n);
    io::write_json(path("obstruction.json"), io::to_json(ob), meta_);
    for (int j = 0; j < ob.n; ++j)
      for (int k = j + 1; k < ob.n; ++k)
        out_ << "c_" << j + 1 << k + 1 << "=" << num(ob.at(j, k)) << " residual=" << num(ob.residuals[j * ob.n + k])
             << "\n";
    out_ << "verdict=" << (ob.realizable_candidate ? "realizable-candidate" : "obstructed") << "\n";
    return 0;
  }

  int zeros_count() {
    const auto f = load_expsum();
    const auto r = list(need(a_.rect, "--rect"), "--rect");
    require(r.size() == 4, "--rect: expected x0,x1,y0,y1");
    const auto s = zeros_in_rectangle(f, Rect{r[0], r[1], r[2], r[3]});
    io::write_json(path("zeros.json"), io::to_json(s), meta_);
    out_ << "total_mass=" << s.total_mass << "\n";
    for (const auto& p : s.points) out_ << num(p.z[0]) << " mult=" << p.mult << "\n";
    return 0;
  }

  int zeros_density() {
    DivisorSource src = EmptyDivisor{};
    if (!a_.divisor.empty())
      src = io::hyperplane_from_json(io::read_json(a_.divisor));
    else
      src = load_expsum();
    const auto lo = list(need(a_.gp_lo, "--gp-lo"), "--gp-lo"), hi = list(need(a_.gp_hi, "--gp-hi"), "--gp-hi");
    const auto est = density_estimate(src, lo, hi, nu(), g_.grid_h);
    std::ostringstream os;
    os << io::header_line(meta_) << "\nnu,value,cauchy\n";
    for (std::size_t k = 0; k < est.values.size(); ++k)
      os << num(est.nu_schedule[k]) << "," << num(est.values[k]) << ","
         << (k == 0 ? std::string("nan") : num(est.cauchy[k - 1])) << "\n";
    io::write_text(path("density.csv"), os.str());
    out_ << "density=" << num(est.value) << (est.boundary_flag ? " boundary-flag" : "") << "\n";
    return 0;
  }

  int current_levy() {
    const auto u = PotentialField::registered(need(a_.potential, "--potential"));
    const auto z = complex_list(need(a_.z, "--z"), "--z");
    const auto l = levy_form(u, z);
    io::json rows = io::json::array();
    for (int j = 0; j < u.n; ++j) {
      io::json row = io::json::array();
      for (int k = 0; k < u.n; ++k) {
        row.push_back({l[j * u.n + k].real(), l[j * u.n + k].imag()});
        out_ << num(l[j * u.n + k]) << (k + 1 == u.n ? "\n" : " ");
      }
      rows.push_back(row);
    }
    io::write_json(path("levy.json"), {{"potential", u.id}, {"z", a_.z}, {"levy", rows}}, meta_);
    return 0;
  }

  int current_pair() {
    const auto u = PotentialField::registered(need(a_.potential, "--potential"));
    const Current f = a_.squared ? ddc_squared(u) : ddc(u);
    const auto t = a_.t.empty() ? std::vector<double>(u.n, 0.0) : list(a_.t, "--t");
    const std::vector<double> centre(2 * u.n, 0.0);
    TestForm phi;
    if (a_.form == "trace") {
      phi = TestForm::trace(u.n, u.n - f.m, centre, a_.radius);
    } else if (a_.form == "dz1dzb2") {
      require(f.m == 1 && u.n == 2, "--form dz1dzb2 pairs with a (1,1)-current on C^2");
      phi = TestForm::monomial(2, {0}, {1}, centre, a_.radius, [](std::span<const cplx> z) { return std::conj(z[1]); });
    } else {
      throw InputError("--form must be trace or dz1dzb2");
    }
    out_ << num(pair_with_form(f, phi, t, g_.grid_h)) << "\n";
    return 0;
  }

  int current_mean() {
    const auto u = PotentialField::registered(need(a_.potential, "--potential"));
    const auto mc = mean_current(a_.squared ? ddc_squared(u) : ddc(u), y_grid(), nu(), g_.tol, 4);
    io::write_text(path("mean_current.csv"), io::mean_current_csv(mc, meta_));
    out_ << (mc.x_independent ? "x-independent limit reached" : "x-independent limit not reached")
         << " last_change=" << (mc.cauchy.empty() ? std::string("nan") : num(mc.cauchy.back())) << "\n";
    return 0;
  }

  int pl_decompose() {
    const auto p = a_.profile.empty() ? profile() : io::profile_from_csv(io::read_text(a_.profile));
    const auto a = pldiv::pl_decompose(p, p.grid.dim());
    auto j = io::to_json(a);
    j["residual"] = a.residual;
    io::write_json(path("pl.json"), j, meta_);
    out_ << "terms=" << a.terms.size() << " residual=" << num(a.residual) << "\n";
    for (const auto& t : a.terms) {
      out_ << "gamma=" << num(t.gamma) << " lambda=";
      for (std::size_t q = 0; q < t.lambda.size(); ++q) out_ << (q ? "," : "") << num(t.lambda[q]);
      out_ << " h=" << num(t.h) << "\n";
    }
    return 0;
  }

  int pl_realize() {
    const auto a = io::plconvex_from_json(io::read_json(need(a_.input, "--in")));
    const auto r = pldiv::realize_divisor(a, a.n);
    io::write_json(path("divisor.json"), io::to_json(r.divisor), meta_);
    io::write_json(path("realized_f.json"), io::to_json(r.f), meta_);
    out_ << "families=" << r.divisor.families.size() << " terms_in_f=" << r.f.terms().size() << "\n";
    return 0;
  }

  int pl_verify() {
    const auto a = io::plconvex_from_json(io::read_json(need(a_.input, "--in")));
    const ExpSum f = a_.expsum.empty() ? pldiv::realize_divisor(a, a.n).f : load_expsum();
    const double dev = pldiv::verify_realization(a, f, y_grid(), nu());
    out_ << "deviation=" << num(dev) << "\n";
    return dev <= 5e-3 ? 0 : 3;
  }

  int chain_counterexample() {
    const auto primes = counterexample::primes_2_mod_5(a_.pmax);
    require(!primes.empty(), "--pmax: no primes = 2 mod 5 below it");
    const int K = a_.K > 0 ? a_.K : std::max(40, primes.back());
    require(K >= primes.back(), "--K must be at least the largest prime");
    const auto map = counterexample::build_counterexample_map(K);
    std::vector<RealVec> ts;
    for (int p : primes) ts.push_back({static_cast<double>(p), 0.0});
    const auto w = ap_chain_witness(map, ts, 1.0);
    bool bounds = true;
    std::ostringstream os;
    os << io::header_line(meta_) << " K=" << K << "\np,mass,lower_bound\n";
    out_ << "p mass 2p-1\n";
    for (std::size_t i = 0; i < primes.size(); ++i) {
      os << primes[i] << "," << w.masses[i] << "," << 2 * primes[i] - 1 << "\n";
      out_ << primes[i] << " " << w.masses[i] << " " << 2 * primes[i] - 1 << "\n";
      bounds = bounds && w.masses[i] >= 2 * primes[i] - 1;
    }
    io::write_text(path("chain_census.csv"), os.str());
    io::write_json(path("chain_witness.json"),
                   {{"K", K}, {"primes", primes}, {"masses", w.masses}, {"max", w.max_mass}, {"trend", w.verdict}},
                   meta_);
    if (bounds && w.verdict == "unbounded-trend") {
      out_ << "verdict: not almost periodic\n";
      return 0;
    }
    out_ << "verdict: inconclusive\n";
    return 3;
  }

  int trace_counterexample() {
    const auto u = PotentialField::registered("trace_counterexample");
    const Current f = ddc(u);
    const std::vector<double> centre(4, 0.0);
    const auto tr = TestForm::trace(2, 1, centre, a_.radius);
    const auto mono =
        TestForm::monomial(2, {0}, {1}, centre, a_.radius, [](std::span<const cplx> z) { return std::conj(z[1]); });
    std::ostringstream os;
    os << io::header_line(meta_) << "\nt1,t2,trace_pairing,Re(mixed_pairing),Im(mixed_pairing)\n";
    double tmin = 1e300, tmax = -1e300;
    for (int a = 0; a <= 2; ++a)
      for (int b = 0; b <= 2; ++b) {
        const double t[2] = {static_cast<double>(a), static_cast<double>(b)};
        const double v = pair_with_form(f, tr, t, g_.grid_h).real();
        const cplx m = pair_with_form(f, mono, t, g_.grid_h);
        tmin = std::min(tmin, v);
        tmax = std::max(tmax, v);
        os << a << "," << b << "," << num(v) << "," << num(m.real()) << "," << num(m.imag()) << "\n";
      }
    const double t0[2] = {0, 0}, t4[2] = {0, 4};
    const cplx m0 = pair_with_form(f, mono, t0, g_.grid_h), m4 = pair_with_form(f, mono, t4, g_.grid_h);
    const double variation = (tmax - tmin) / std::abs(tmax);
    const double decay = std::abs(m4) / std::abs(m0);
    bool det_positive = true;
    for (double x2 = -6; x2 <= 6 + 1e-12; x2 += 0.05)
      for (double y2 = -0.49; y2 <= 0.49 + 1e-12; y2 += 0.01) {
        const cplx z[2] = {0.0, cplx(x2, y2)};
        const auto l = levy_form(u, z);
        det_positive = det_positive && (l[0] * l[3] - l[1] * l[2]).real() > 0;
      }
    double sup_err = 0;
    for (double y2 : {0.0, 0.2, 0.4})
      sup_err = std::max(sup_err, std::abs(trace_bracket_sup(y2, 6, 1e-3) - 0.5 * std::exp(4 * y2 * y2 - 1)));
    os << "# trace_variation=" << num(variation) << " mixed_decay=" << num(decay) << " det_positive=" << det_positive
       << " sup_identity_error=" << num(sup_err) << "\n";
    io::write_text(path("trace_counterexample.csv"), os.str());
    out_ << "trace variation over t in {0,1,2}^2: " << num(variation) << "\n";
    out_ << "|(F(z+(0,4)),Phi)| / |(F(z),Phi)|: " << num(decay) << "\n";
    out_ << "det Levy > 0 on |y2| <= 0.49: " << (det_positive ? "yes" : "no") << "\n";
    out_ << "sup identity error: " << num(sup_err) << "\n";
    const bool ok = variation < 1e-2 && decay < 1e-3 && det_positive && sup_err < 1e-3;
    out_ << (ok ? "verdict: trace almost periodic, current not almost periodic\n" : "verdict: inconclusive\n");
    return ok ? 0 : 3;
  }

  int sine_suite() {
    const auto f = ExpSum::sin_pi();
    const Grid grid({Grid::axis(-1.5, 1.5, g_.grid_h)});
    const auto p = jessen::jessen_profile(f, grid, nu());
    io::write_text(path("sine_profile.csv"), io::profile_csv(p, meta_));
    plot_profile(p, "sine_profile", "Jessen function of sin(pi z)", [](double y) {
      return std::numbers::pi * std::abs(y) - std::log(2.0);
    });
    double worst = 0;
    for (long s = 0; s < grid.size(); ++s) {
      const double y = grid.axes[0].at(s);
      worst = std::max(worst, std::abs(p.values[s] - (std::numbers::pi * std::abs(y) - std::log(2.0))));
    }
    const double gp_lo[1] = {-1}, gp_hi[1] = {1};
    const auto est = density_estimate(f, gp_lo, gp_hi, nu(), g_.grid_h);
    const auto mu = jessen::riesz_measure(p, tiling(grid, 0.1));
    std::ostringstream os;
    os << io::header_line(meta_) << "\nnu,density,cauchy\n";
    for (std::size_t k = 0; k < est.values.size(); ++k)
      os << num(est.nu_schedule[k]) << "," << num(est.values[k]) << ","
         << (k == 0 ? std::string("nan") : num(est.cauchy[k - 1])) << "\n";
    io::write_text(path("sine_density.csv"), os.str());
    io::write_text(path("sine_riesz.csv"), io::measure_csv(mu, meta_));
    out_ << "max |A - (pi|y| - ln 2)| = " << num(worst) << "\n";
    out_ << "zero density = " << num(est.value) << "\n";
    out_ << "Riesz mass on (-1.5,1.5) = " << num(mu.total()) << "\n";
    return 0;
  }

private:
  const std::string& need(const std::string& v, const std::string& flag) const {
    if (v.empty()) throw InputError(flag + " is required");
    return v;
  }

  fs::path path(const std::string& name) const { return fs::path(g_.out) / name; }

  std::vector<double> nu() const {
    const auto v = list(g_.nu, "--nu");
    for (double x : v) require(x > 0, "--nu values must be positive");
    return v;
  }

  ExpSum load_expsum() const { return io::expsum_from_json(io::read_json(need(a_.expsum, "--expsum"))); }

  Grid y_grid() const {
    const auto lo = list(need(a_.y_lo, "--y-lo"), "--y-lo"), hi = list(need(a_.y_hi, "--y-hi"), "--y-hi");
    require(lo.size() == hi.size(), "--y-lo and --y-hi differ in length");
    std::vector<Axis> axes;
    for (std::size_t j = 0; j < lo.size(); ++j) axes.push_back(Grid::axis(lo[j], hi[j], g_.grid_h));
    return Grid(axes);
  }

  JessenProfile profile() const { return jessen::jessen_profile(load_expsum(), y_grid(), nu()); }

  // Bins of side w tiling the grid hull; the last bin per axis reaches past the end node.
  static std::vector<Box> tiling(const Grid& g, double w) {
    require(w > 0, "--bin-width must be positive");
    std::vector<std::vector<std::pair<double, double>>> per_axis;
    for (const auto& ax : g.axes) {
      std::vector<std::pair<double, double>> cuts;
      const long count = std::max(1L, static_cast<long>(std::ceil((ax.hi() - ax.lo) / w - 1e-9)));
      for (long k = 0; k < count; ++k)
        cuts.emplace_back(ax.lo + k * w, k + 1 == count ? ax.hi() + ax.h : ax.lo + (k + 1) * w);
      per_axis.push_back(cuts);
    }
    std::vector<Box> bins;
    if (g.dim() == 1) {
      for (const auto& c : per_axis[0]) bins.push_back({{c.first}, {c.second}});
    } else {
      require(g.dim() == 2, "bins are built for one or two axes");
      for (const auto& c0 : per_axis[0])
        for (const auto& c1 : per_axis[1]) bins.push_back({{c0.first, c1.first}, {c0.second, c1.second}});
    }
    return bins;
  }

  static std::vector<std::vector<cplx>> theta_samples(const CurrentGrid& g) {
    std::vector<std::vector<cplx>> out;
    const std::size_t w = g.width();
    for (long s = 0; s < g.grid.size(); ++s) out.emplace_back(g.coef.begin() + s * w * w, g.coef.begin() + (s + 1) * w * w);
    return out;
  }

  void plot_profile(const JessenProfile& p, const std::string& stem, const std::string& title,
                    const std::function<double(double)>& oracle = nullptr) const {
    if (p.grid.dim() != 1) return;
    std::vector<double> y, a, o;
    for (long s = 0; s < p.grid.size(); ++s) {
      y.push_back(p.grid.axes[0].at(s));
      a.push_back(p.values[s]);
      if (oracle) o.push_back(oracle(y.back()));
    }
    if (oracle)
      io::write_plot(path(stem), {y, a, o}, {"y", "A", "closed_form"}, title, meta_);
    else
      io::write_plot(path(stem), {y, a}, {"y", "A"}, title, meta_);
  }

  const Globals& g_;
  const Args& a_;
  std::ostream& out_;
  io::Meta meta_;
};

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"apharm: almost periodic holomorphic functions, divisors and currents in tube domains", "apharm"};
  app.require_subcommand(1);
  Globals g;
  Args a;
  app.add_option("--nu", g.nu, "nu schedule, comma separated")->capture_default_str();
  app.add_option("--grid-h", g.grid_h, "grid spacing")->capture_default_str();
  app.add_option("--tol", g.tol, "tolerance")->capture_default_str();
  app.add_option("--out", g.out, "output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "seed recorded in output headers")->capture_default_str();

  using Handler = int (Runner::*)();
  std::map<CLI::App*, std::pair<std::string, Handler>> handlers;
  const auto group = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->require_subcommand(1);
    sub->fallthrough();
    return sub;
  };
  const auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help, Handler h) {
    auto* sub = parent->add_subcommand(name, help);
    sub->fallthrough();
    handlers[sub] = {parent->get_name() + " " + name, h};
    return sub;
  };

  auto* ap = group("ap", "exponential sums");
  auto* c = leaf(ap, "eval", "evaluate f(z)", &Runner::ap_eval);
  c->add_option("--expsum", a.expsum)->required();
  c->add_option("--z", a.z, "re,im pairs")->required();
  c = leaf(ap, "mean", "Bohr mean at height y", &Runner::ap_mean);
  c->add_option("--expsum", a.expsum)->required();
  c->add_option("--y", a.y)->required();
  c->add_option("--mode", a.mode, "exact or numeric");
  c = leaf(ap, "coeff", "Fourier coefficient", &Runner::ap_coeff);
  c->add_option("--expsum", a.expsum)->required();
  c->add_option("--lambda", a.lambda)->required();
  c->add_option("--y", a.y)->required();
  c = leaf(ap, "test-ap", "epsilon-translation set", &Runner::ap_test);
  c->add_option("--expsum", a.expsum)->required();
  c->add_option("--eps", a.eps);
  c->add_option("--gp-lo", a.gp_lo)->required();
  c->add_option("--gp-hi", a.gp_hi)->required();
  c->add_option("--scan-lo", a.scan_lo)->required();
  c->add_option("--scan-hi", a.scan_hi)->required();
  c->add_option("--step", a.step);

  auto* je = group("jessen", "Jessen functions and Riesz measures");
  c = leaf(je, "compute", "Jessen profile on a grid", &Runner::jessen_compute);
  c->add_option("--expsum", a.expsum)->required();
  c->add_option("--y-lo", a.y_lo)->required();
  c->add_option("--y-hi", a.y_hi)->required();
  c = leaf(je, "riesz", "Riesz measure of a profile", &Runner::jessen_riesz);
  c->add_option("--profile", a.profile);
  c->add_option("--expsum", a.expsum);
  c->add_option("--y-lo", a.y_lo);
  c->add_option("--y-hi", a.y_hi);
  c->add_option("--bin-width", a.bin_width);
  c->add_option("--normalization", a.normalization);
  c->add_flag("--subharmonic", a.subharmonic);
  c = leaf(je, "reconstruct", "convex potential from a measure", &Runner::jessen_reconstruct);
  c->add_option("--measure", a.measure);
  c->add_option("--atoms", a.atoms, "position:mass,...");
  c->add_option("--disk", a.disk, "c0,c1,r,mass");
  c->add_option("--y-lo", a.y_lo)->required();
  c->add_option("--y-hi", a.y_hi)->required();
  c->add_option("--bin-width", a.bin_width);
  c->add_option("--normalization", a.normalization);
  c = leaf(je, "obstruction", "c_jk constants of a mean current", &Runner::jessen_obstruction);
  c->add_option("--potential", a.potential)->required();
  c->add_option("--y-lo", a.y_lo)->required();
  c->add_option("--y-hi", a.y_hi)->required();

  auto* ze = group("zeros", "zero census and densities");
  c = leaf(ze, "count", "zeros in a rectangle", &Runner::zeros_count);
  c->add_option("--expsum", a.expsum)->required();
  c->add_option("--rect", a.rect, "x0,x1,y0,y1")->required();
  c = leaf(ze, "density", "divisor density on G'", &Runner::zeros_density);
  c->add_option("--expsum", a.expsum);
  c->add_option("--divisor", a.divisor, "HyperplaneDivisor JSON");
  c->add_option("--gp-lo", a.gp_lo)->required();
  c->add_option("--gp-hi", a.gp_hi)->required();

  auto* cu = group("current", "currents from potentials");
  c = leaf(cu, "levy", "Levy form at a point", &Runner::current_levy);
  c->add_option("--potential", a.potential)->required();
  c->add_option("--z", a.z)->required();
  c = leaf(cu, "pair", "pairing with a test form", &Runner::current_pair);
  c->add_option("--potential", a.potential)->required();
  c->add_option("--form", a.form, "trace or dz1dzb2");
  c->add_option("--t", a.t, "real translation");
  c->add_option("--radius", a.radius);
  c->add_flag("--squared", a.squared, "use (dd^c u)^2");
  c = leaf(cu, "mean", "x-mean of the current", &Runner::current_mean);
  c->add_option("--potential", a.potential)->required();
  c->add_option("--y-lo", a.y_lo)->required();
  c->add_option("--y-hi", a.y_hi)->required();
  c->add_flag("--squared", a.squared);

  auto* pl = group("pl", "piecewise-linear Jessen functions");
  c = leaf(pl, "decompose", "hinge decomposition", &Runner::pl_decompose);
  c->add_option("--profile", a.profile);
  c->add_option("--expsum", a.expsum);
  c->add_option("--y-lo", a.y_lo);
  c->add_option("--y-hi", a.y_hi);
  c = leaf(pl, "realize", "product of sines realizing A", &Runner::pl_realize);
  c->add_option("--in", a.input)->required();
  c = leaf(pl, "verify", "Jessen function of f against A", &Runner::pl_verify);
  c->add_option("--in", a.input)->required();
  c->add_option("--expsum", a.expsum);
  c->add_option("--y-lo", a.y_lo)->required();
  c->add_option("--y-hi", a.y_hi)->required();

  auto* ex = group("examples", "paper examples");
  c = leaf(ex, "chain-counterexample", "census of the non almost periodic chain", &Runner::chain_counterexample);
  c->add_option("--pmax", a.pmax)->capture_default_str();
  c->add_option("--K", a.K, "truncation order (default max(40, pmax))");
  c = leaf(ex, "trace-counterexample", "almost periodic trace, non almost periodic current",
           &Runner::trace_counterexample);
  c->add_option("--radius", a.radius)->capture_default_str();
  leaf(ex, "sine-suite", "Jessen function, density and Riesz mass of sin(pi z)", &Runner::sine_suite);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    for (const auto& [sub, entry] : handlers)
      if (sub->parsed()) {
        Runner r(g, a, out, entry.first);
        return (r.*entry.second)();
      }
    err << app.help();
    return 2;
  } catch (const UnsupportedDensity& e) {
    err << e.what() << "\n";
    return 4;
  } catch (const NumericError& e) {
    err << "numeric verification failed: " << e.what() << "\n";
    return 3;
  } catch (const InputError& e) {
    err << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace apharm::cli
