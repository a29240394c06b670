#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "apharm/error.hpp"
#include "apharm/io.hpp"
#include "oracles.hpp"

using namespace apharm;

TEST_CASE("numbers round-trip") {
  for (double v : {0.1, -1.0 / 3.0, 6.02214076e23, 2.2250738585072014e-308, 0.0}) CHECK(std::stod(io::num(v)) == v);
  CHECK(io::num(cplx(0, 0)) == "0+0i");
  CHECK(io::num(cplx(1.5, -2)) == "1.5-2i");
}

TEST_CASE("ExpSum JSON in the documented layout") {
  const auto j = io::json::parse(R"({"n":1,"terms":[{"re":0.0,"im":-0.5,"freq":[3.14159265358979]},
                                                   {"re":0.0,"im":0.5,"freq":[-3.14159265358979]}]})");
  const auto f = io::expsum_from_json(j);
  CHECK(std::abs(f(cplx(0.5, 0)) - 1.0) < 1e-12);
  const auto back = io::expsum_from_json(io::to_json(f));
  REQUIRE(back.terms().size() == 2);
  CHECK(back.terms()[1].coef == f.terms()[1].coef);
  CHECK(back.terms()[1].freq == f.terms()[1].freq);
  CHECK_THROWS_AS(io::expsum_from_json(io::json::parse(R"({"terms":[]})")), InputError);
}

TEST_CASE("TubeDomain JSON") {
  const auto t = io::tube_from_json(io::json::parse(R"({"n":1,"base_lo":[-2.0],"base_hi":[2.0]})"));
  CHECK(t.base_hi[0] == 2.0);
  CHECK(io::to_json(t)["base_lo"][0] == -2.0);
}

TEST_CASE("PLConvex and HyperplaneDivisor JSON") {
  const auto a = io::plconvex_from_json(io::json::parse(
      R"({"terms":[{"gamma":3.14159,"lambda":[1.0],"h":0.0}],"linear":{"grad":[0.0],"offset":-0.693147}})"));
  CHECK(a.n == 1);
  CHECK(a.terms[0].gamma == 3.14159);
  CHECK(a.offset == -0.693147);
  const auto b = io::plconvex_from_json(io::to_json(a));
  CHECK(b.terms[0].lambda == a.terms[0].lambda);

  HyperplaneDivisor d{1, {{{1.0}, 0.25, {{0.0, 0.5, -1, 1}, {1.0, 2.0, 4, 3}}}}};
  const auto j = io::to_json(d);
  CHECK(j["families"][0]["progressions"][0]["count"] == "inf");
  const auto e = io::hyperplane_from_json(j);
  CHECK(e.families[0].progressions[0].infinite());
  CHECK(e.families[0].progressions[1].count == 4);
  CHECK(e.families[0].progressions[1].mult == 3);
}

TEST_CASE("profile and measure CSV round-trip") {
  const Grid g({Grid::axis(-1, 1, 0.5), Grid::axis(0, 1, 0.5)});
  std::vector<double> v;
  for (long s = 0; s < g.size(); ++s) v.push_back(0.1 * s);
  const auto p = jessen::profile_from_values(g, v);
  const io::Meta m{"jessen compute", 42, 1e-3};
  const auto text = io::profile_csv(p, m);
  CHECK(text.rfind("# apharm " + io::version() + " command=jessen compute seed=42 tol=0.001", 0) == 0);
  const auto q = io::profile_from_csv(text);
  CHECK(q.grid.dim() == 2);
  CHECK(q.values == p.values);

  DensityMeasure mu;
  mu.bins = {{{0.0}, {0.5}}, {{0.5}, {0.5}}};
  mu.masses = {0.25, 1.0};
  const auto back = io::measure_from_csv(io::measure_csv(mu, m), kRieszNormalization);
  REQUIRE(back.bins.size() == 2);
  CHECK(back.bins[1].is_atom());
  CHECK(back.masses == mu.masses);
}

TEST_CASE("files carry the meta header") {
  const auto dir = std::filesystem::current_path() / "io_out";
  std::filesystem::create_directories(dir);
  const io::Meta m{"test", 7, 0.01};
  io::write_json(dir / "x.json", {{"a", 1}}, m);
  const auto j = io::read_json(dir / "x.json");
  CHECK(j["meta"]["seed"] == 7);
  CHECK(j["meta"]["command"] == "test");
  io::write_plot(dir / "p", {{0, 1}, {2, 3}}, {"y", "A"}, "t", m);
  CHECK(io::read_text(dir / "p.dat").rfind("# apharm", 0) == 0);
  CHECK(std::filesystem::exists(dir / "p.plt"));
  CHECK_THROWS_AS(io::read_json(dir / "missing.json"), InputError);
}
