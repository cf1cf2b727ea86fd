#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "dframe/lab.hpp"
#include "dframe/maps.hpp"
#include "dframe/measure.hpp"
#include "dframe/model.hpp"
#include "dframe/multiplier.hpp"

namespace dframe {

// "a+bi", "a-bi", "a", "bi", "i", "-i"; 'j' also accepted for the unit.
Complex parse_complex(std::string_view text);
// Round-trippable "a+bi".
std::string format_complex(Complex z);

// Comma-separated complex table, one row per line. Blank lines and lines
// starting with '#' are skipped. `source` names the input in ParseError
// messages, which carry the line and field.
CMatrix read_complex_table(std::istream& in, const std::string& source = "<stream>");
CMatrix load_complex_table(const std::filesystem::path& path);
void write_complex_table(std::ostream& out, const CMatrix& table);

struct SymbolSamples {
  RVector points;
  CVector values;
};

// Rows "point,re,im"; an optional header line ("point,re,im") is skipped.
SymbolSamples read_symbol_csv(std::istream& in, const std::string& source = "<stream>");
SymbolSamples load_symbol_csv(const std::filesystem::path& path);
// Matches the samples to the points of `space` (in order, within `tol`).
Symbol symbol_on_space(const SymbolSamples& samples, const SampledMeasureSpace& space,
                       double tol = 1e-9);

// "step,n,L,norm" followed by one line per schedule step.
std::string sweep_csv(const SweepResult& sweep);

nlohmann::json complex_json(Complex z);
nlohmann::json vector_json(const CVector& v);
nlohmann::json vector_json(const RVector& v);
nlohmann::json matrix_json(const CMatrix& m);  // rows of [re, im] pairs

// {kind, points, weights, extent, layout}
nlohmann::json space_json(const SampledMeasureSpace& space);
SampledMeasureSpace space_from_json(const nlohmann::json& j);
// {N, K, condition, family}
nlohmann::json model_summary_json(const ModelSpace& model);

void to_json(nlohmann::json& j, const Resolution& r);
void to_json(nlohmann::json& j, const FrameDiagnostics& d);
void to_json(nlohmann::json& j, const RieszTransition& t);
void to_json(nlohmann::json& j, const SupportWitness& w);
void to_json(nlohmann::json& j, const OrthogonalityReport& r);
void to_json(nlohmann::json& j, const NormBoundReport& r);
void to_json(nlohmann::json& j, const CompositionReport& r);
void to_json(nlohmann::json& j, const InverseReport& r);
void to_json(nlohmann::json& j, const DensityWitness& w);
void to_json(nlohmann::json& j, const DensityReport& r);
void to_json(nlohmann::json& j, const ClosureProfile& p);
void to_json(nlohmann::json& j, const ClosabilityReport& r);
void to_json(nlohmann::json& j, const IdentityAudit& a);
void to_json(nlohmann::json& j, const DiscreteComparison& c);
void to_json(nlohmann::json& j, const QuartetMember& m);
void to_json(nlohmann::json& j, const QuartetReport& r);
void to_json(nlohmann::json& j, const SweepResult& r);

}  // namespace dframe
