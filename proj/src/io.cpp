#include "apharm/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "apharm/error.hpp"

namespace apharm::io {

namespace {

std::vector<double> split_numbers(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stod(cell));
    } catch (const std::exception&) {
      throw InputError("CSV: cannot parse '" + cell + "'");
    }
  }
  return out;
}

std::vector<std::vector<double>> data_rows(const std::string& text, std::string* column_header) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (column_header) *column_header = line;
      continue;
    }
    rows.push_back(split_numbers(line));
  }
  return rows;
}

// Uniform axes recovered from the distinct coordinates of a row-major table.
Grid grid_from_columns(const std::vector<std::vector<double>>& rows, int n) {
  std::vector<Axis> axes;
  for (int j = 0; j < n; ++j) {
    std::vector<double> vals;
    for (const auto& r : rows) vals.push_back(r[j]);
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end(),
                           [](double a, double b) { return std::abs(a - b) <= 1e-12 * (1 + std::abs(a)); }),
               vals.end());
    require(vals.size() >= 2, "CSV: every axis needs at least two nodes");
    const double h = (vals.back() - vals.front()) / static_cast<double>(vals.size() - 1);
    axes.push_back({vals.front(), h, static_cast<long>(vals.size())});
  }
  Grid g(axes);
  require(g.size() == static_cast<long>(rows.size()), "CSV: rows do not form a full grid");
  return g;
}

}  // namespace

std::string version() { return APHARM_VERSION; }

std::string header_line(const Meta& m) {
  return "# apharm " + version() + " command=" + m.command + " seed=" + std::to_string(m.seed) +
         " tol=" + num(m.tol);
}

json meta_json(const Meta& m) {
  return {{"tool", "apharm"}, {"version", version()}, {"command", m.command}, {"seed", m.seed}, {"tol", m.tol}};
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0) v = 0.0;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string num(cplx v) {
  std::string im = num(v.imag());
  if (im[0] != '-') im = "+" + im;
  return num(v.real()) + im + "i";
}

json to_json(const ExpSum& f) {
  json terms = json::array();
  for (const auto& t : f.terms()) terms.push_back({{"re", t.coef.real()}, {"im", t.coef.imag()}, {"freq", t.freq}});
  return {{"n", f.dim()}, {"terms", terms}};
}

ExpSum expsum_from_json(const json& j) {
  try {
    const int n = j.at("n").get<int>();
    std::vector<Term> terms;
    for (const auto& t : j.at("terms"))
      terms.push_back({cplx(t.value("re", 0.0), t.value("im", 0.0)), t.at("freq").get<RealVec>()});
    return ExpSum(n, std::move(terms));
  } catch (const json::exception& e) {
    throw InputError(std::string("ExpSum JSON: ") + e.what());
  }
}

json to_json(const TubeDomain& t) { return {{"n", t.n}, {"base_lo", t.base_lo}, {"base_hi", t.base_hi}}; }

TubeDomain tube_from_json(const json& j) {
  try {
    return TubeDomain(j.at("base_lo").get<RealVec>(), j.at("base_hi").get<RealVec>());
  } catch (const json::exception& e) {
    throw InputError(std::string("TubeDomain JSON: ") + e.what());
  }
}

json to_json(const DivisorSample& s) {
  json pts = json::array();
  for (const auto& p : s.points) {
    json z = json::array();
    for (const auto& c : p.z) z.push_back({c.real(), c.imag()});
    pts.push_back({{"z", z}, {"mult", p.mult}});
  }
  return {{"window", {{"shape", s.window.shape}, {"lo", s.window.lo}, {"hi", s.window.hi}}},
          {"points", pts},
          {"total_mass", s.total_mass},
          {"dilations", s.dilations}};
}

json to_json(const PLConvex& a) {
  json terms = json::array();
  for (const auto& t : a.terms) terms.push_back({{"gamma", t.gamma}, {"lambda", t.lambda}, {"h", t.h}});
  RealVec grad = a.grad.empty() ? RealVec(a.n, 0.0) : a.grad;
  return {{"n", a.n}, {"terms", terms}, {"linear", {{"grad", grad}, {"offset", a.offset}}}};
}

PLConvex plconvex_from_json(const json& j) {
  try {
    PLConvex a;
    for (const auto& t : j.at("terms"))
      a.terms.push_back({t.at("gamma").get<double>(), t.at("lambda").get<RealVec>(), t.value("h", 0.0)});
    if (j.contains("linear")) {
      a.grad = j["linear"].value("grad", RealVec{});
      a.offset = j["linear"].value("offset", 0.0);
    }
    if (j.contains("n"))
      a.n = j["n"].get<int>();
    else if (!a.terms.empty())
      a.n = static_cast<int>(a.terms.front().lambda.size());
    else
      a.n = a.grad.empty() ? 1 : static_cast<int>(a.grad.size());
    if (a.grad.empty()) a.grad.assign(a.n, 0.0);
    return a;
  } catch (const json::exception& e) {
    throw InputError(std::string("PLConvex JSON: ") + e.what());
  }
}

json to_json(const HyperplaneDivisor& d) {
  json fams = json::array();
  for (const auto& f : d.families) {
    json progs = json::array();
    for (const auto& p : f.progressions) {
      json count = p.infinite() ? json("inf") : json(p.count);
      progs.push_back({{"start", p.start}, {"step", p.step}, {"count", count}, {"mult", p.mult}});
    }
    fams.push_back({{"lambda", f.lambda}, {"h", f.h}, {"progressions", progs}});
  }
  return {{"n", d.n}, {"families", fams}};
}

HyperplaneDivisor hyperplane_from_json(const json& j) {
  try {
    HyperplaneDivisor d;
    d.n = j.at("n").get<int>();
    for (const auto& f : j.at("families")) {
      PlaneFamily fam;
      fam.lambda = f.at("lambda").get<RealVec>();
      fam.h = f.value("h", 0.0);
      for (const auto& p : f.at("progressions")) {
        Progression pr;
        pr.start = p.value("start", 0.0);
        pr.step = p.at("step").get<double>();
        pr.mult = p.value("mult", 1);
        const auto& c = p.at("count");
        pr.count = c.is_string() ? -1 : c.get<long>();
        fam.progressions.push_back(pr);
      }
      d.families.push_back(std::move(fam));
    }
    return d;
  } catch (const json::exception& e) {
    throw InputError(std::string("HyperplaneDivisor JSON: ") + e.what());
  }
}

json to_json(const ObstructionMatrix& o) {
  json c = json::array(), r = json::array();
  for (int j = 0; j < o.n; ++j) {
    json row = json::array(), rrow = json::array();
    for (int k = 0; k < o.n; ++k) {
      row.push_back(o.c[j * o.n + k]);
      rrow.push_back(o.residuals[j * o.n + k]);
    }
    c.push_back(row);
    r.push_back(rrow);
  }
  return {{"n", o.n},
          {"c", c},
          {"residuals", r},
          {"scale", o.scale},
          {"tolerance", o.tolerance},
          {"verdict", o.realizable_candidate ? "realizable-candidate" : "obstructed"}};
}

json to_json(const CurrentGrid& g) {
  json axes = json::array();
  for (const auto& a : g.grid.axes) axes.push_back({{"lo", a.lo}, {"h", a.h}, {"count", a.count}});
  json re = json::array(), im = json::array();
  for (const auto& c : g.coef) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  return {{"bidegree", {g.m, g.m}},
          {"n", g.n},
          {"convention", g.convention},
          {"positive", g.positive},
          {"axes", axes},
          {"roles", g.roles},
          {"index_sets", g.index_sets},
          {"shape", {g.grid.size(), g.width(), g.width()}},
          {"re", re},
          {"im", im}};
}

json to_json(const TranslationCertificate& c) {
  json w = json::array();
  for (const auto& x : c.witnesses) w.push_back({{"tau", x.tau}, {"deviation", x.deviation}});
  return {{"epsilon", c.epsilon},
          {"window_half_length", c.relatively_dense ? json(c.window_half_length) : json("inf")},
          {"relatively_dense", c.relatively_dense},
          {"scan_lo", c.scan_lo},
          {"scan_hi", c.scan_hi},
          {"step", c.step},
          {"witness_count", c.witnesses.size()},
          {"witnesses", w}};
}

std::string profile_csv(const JessenProfile& p, const Meta& m) {
  std::ostringstream os;
  os << header_line(m) << "\n";
  for (int j = 0; j < p.grid.dim(); ++j) os << "y_" << (j + 1) << ",";
  os << "A,err\n";
  for (long s = 0; s < p.grid.size(); ++s) {
    for (double y : p.grid.point(s)) os << num(y) << ",";
    os << num(p.values[s]) << "," << num(p.error[s]) << "\n";
  }
  return os.str();
}

JessenProfile profile_from_csv(const std::string& text) {
  std::string cols;
  const auto rows = data_rows(text, &cols);
  require(!rows.empty(), "profile CSV: no data rows");
  const int width = static_cast<int>(rows.front().size());
  require(width >= 3, "profile CSV: expected y columns, A and err");
  const int n = width - 2;
  for (const auto& r : rows) require(static_cast<int>(r.size()) == width, "profile CSV: ragged rows");
  JessenProfile p;
  p.grid = grid_from_columns(rows, n);
  p.values.resize(rows.size());
  p.error.resize(rows.size());
  p.flagged.assign(rows.size(), 0);
  for (const auto& r : rows) {
    std::vector<long> idx(n);
    for (int j = 0; j < n; ++j) idx[j] = std::lround((r[j] - p.grid.axes[j].lo) / p.grid.axes[j].h);
    const long s = p.grid.flat(idx);
    p.values[s] = r[n];
    p.error[s] = r[n + 1];
  }
  return p;
}

std::string measure_csv(const DensityMeasure& mu, const Meta& m) {
  std::ostringstream os;
  os << header_line(m) << " normalization=" << num(mu.normalization) << "\n";
  const std::size_t n = mu.bins.empty() ? 1 : mu.bins.front().lo.size();
  for (std::size_t j = 0; j < n; ++j) os << "bin_lo_" << (j + 1) << ",";
  for (std::size_t j = 0; j < n; ++j) os << "bin_hi_" << (j + 1) << ",";
  os << "mass\n";
  for (std::size_t i = 0; i < mu.bins.size(); ++i) {
    for (double v : mu.bins[i].lo) os << num(v) << ",";
    for (double v : mu.bins[i].hi) os << num(v) << ",";
    os << num(mu.masses[i]) << "\n";
  }
  return os.str();
}

DensityMeasure measure_from_csv(const std::string& text, double normalization) {
  const auto rows = data_rows(text, nullptr);
  DensityMeasure mu;
  mu.normalization = normalization;
  for (const auto& r : rows) {
    require(r.size() % 2 == 1 && r.size() >= 3, "measure CSV: expected bin_lo..., bin_hi..., mass");
    const std::size_t n = (r.size() - 1) / 2;
    mu.bins.push_back({RealVec(r.begin(), r.begin() + n), RealVec(r.begin() + n, r.begin() + 2 * n)});
    mu.masses.push_back(r.back());
  }
  require(!mu.bins.empty(), "measure CSV: no bins");
  return mu;
}

std::string mean_current_csv(const MeanCurrent& mc, const Meta& m) {
  std::ostringstream os;
  os << header_line(m) << "\n";
  const auto& g = mc.mean;
  for (int j = 0; j < g.grid.dim(); ++j) os << "y_" << (j + 1) << ",";
  const auto name = [](const std::vector<int>& s) {
    std::string t;
    for (int v : s) t += std::to_string(v + 1);
    return t;
  };
  for (std::size_t i = 0; i < g.width(); ++i)
    for (std::size_t k = 0; k < g.width(); ++k) {
      const std::string tag = name(g.index_sets[i]) + "_" + name(g.index_sets[k]);
      os << "Re(e_" << tag << "),Im(e_" << tag << ")";
      os << ((i + 1 == g.width() && k + 1 == g.width()) ? "\n" : ",");
    }
  for (long s = 0; s < g.grid.size(); ++s) {
    for (double y : g.grid.point(s)) os << num(y) << ",";
    for (std::size_t i = 0; i < g.width(); ++i)
      for (std::size_t k = 0; k < g.width(); ++k) {
        os << num(g.at(s, i, k).real()) << "," << num(g.at(s, i, k).imag());
        os << ((i + 1 == g.width() && k + 1 == g.width()) ? "\n" : ",");
      }
  }
  return os.str();
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw InputError("cannot open " + p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json read_json(const std::filesystem::path& p) {
  try {
    return json::parse(read_text(p));
  } catch (const json::parse_error& e) {
    throw InputError(p.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("cannot write " + p.string());
  out << text;
}

void write_json(const std::filesystem::path& p, json j, const Meta& m) {
  j["meta"] = meta_json(m);
  write_text(p, j.dump(2) + "\n");
}

void write_plot(const std::filesystem::path& stem, const std::vector<std::vector<double>>& columns,
                const std::vector<std::string>& names, const std::string& title, const Meta& m) {
  require(!columns.empty() && columns.size() == names.size(), "write_plot: column names mismatch");
  std::ostringstream dat;
  dat << header_line(m) << "\n#";
  for (const auto& n : names) dat << " " << n;
  dat << "\n";
  for (std::size_t r = 0; r < columns.front().size(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) dat << (c ? " " : "") << num(columns[c][r]);
    dat << "\n";
  }
  const auto dat_path = std::filesystem::path(stem.string() + ".dat");
  write_text(dat_path, dat.str());
  std::ostringstream plt;
  plt << header_line(m) << "\n";
  plt << "set title \"" << title << "\"\n";
  plt << "set xlabel \"" << names.front() << "\"\n";
  plt << "plot ";
  for (std::size_t c = 1; c < names.size(); ++c)
    plt << (c > 1 ? ", " : "") << "\"" << dat_path.filename().string() << "\" using 1:" << (c + 1)
        << " with lines title \"" << names[c] << "\"";
  plt << "\n";
  write_text(std::filesystem::path(stem.string() + ".plt"), plt.str());
}

}  // namespace apharm::io
