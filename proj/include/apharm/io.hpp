#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "apharm/currents.hpp"
#include "apharm/expsum.hpp"
#include "apharm/jessen.hpp"
#include "apharm/pldiv.hpp"
#include "apharm/zeros.hpp"

namespace apharm::io {

using json = nlohmann::json;

/// Provenance recorded in every output file.
struct Meta {
  std::string command;
  unsigned long long seed = 0;
  double tol = 1e-3;
};

std::string version();
/// "# apharm <version> command=<cmd> seed=<seed> tol=<tol>"
std::string header_line(const Meta& m);
json meta_json(const Meta& m);

/// Shortest round-trip decimal form.
std::string num(double v);
std::string num(cplx v);  // "a+bi"

json to_json(const ExpSum& f);
ExpSum expsum_from_json(const json& j);
json to_json(const TubeDomain& t);
TubeDomain tube_from_json(const json& j);
json to_json(const DivisorSample& s);
json to_json(const PLConvex& a);
PLConvex plconvex_from_json(const json& j);
json to_json(const HyperplaneDivisor& d);
HyperplaneDivisor hyperplane_from_json(const json& j);
json to_json(const ObstructionMatrix& o);
json to_json(const CurrentGrid& g);
json to_json(const TranslationCertificate& c);

std::string profile_csv(const JessenProfile& p, const Meta& m);
JessenProfile profile_from_csv(const std::string& text);
std::string measure_csv(const DensityMeasure& mu, const Meta& m);
DensityMeasure measure_from_csv(const std::string& text, double normalization);
std::string mean_current_csv(const MeanCurrent& mc, const Meta& m);

json read_json(const std::filesystem::path& p);
std::string read_text(const std::filesystem::path& p);
void write_text(const std::filesystem::path& p, const std::string& text);
/// Writes j with a "meta" member added.
void write_json(const std::filesystem::path& p, json j, const Meta& m);

/// gnuplot data (whitespace separated, '#' header) and a matching .plt script.
void write_plot(const std::filesystem::path& stem, const std::vector<std::vector<double>>& columns,
                const std::vector<std::string>& names, const std::string& title, const Meta& m);

}  // namespace apharm::io
