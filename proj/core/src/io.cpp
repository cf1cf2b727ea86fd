#include "dframe/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <vector>

#include "dframe/error.hpp"

namespace dframe {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool parse_real(std::string_view s, double& out) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string where(const std::string& source, std::size_t line, std::size_t field) {
  return source + ": line " + std::to_string(line) + ", field " + std::to_string(field);
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Complex parse_complex(std::string_view text) {
  const std::string_view s = trim(text);
  if (s.empty()) throw ParseError("empty complex number");
  const auto bad = [&] { return ParseError("malformed complex number '" + std::string(s) + "'"); };

  if (s.back() != 'i' && s.back() != 'j') {
    double re = 0.0;
    if (!parse_real(s, re)) throw bad();
    return {re, 0.0};
  }
  const std::string_view body = s.substr(0, s.size() - 1);
  // Split at the last sign that is not leading and not part of an exponent.
  std::size_t split = std::string_view::npos;
  for (std::size_t p = body.size(); p-- > 1;) {
    if ((body[p] == '+' || body[p] == '-') && body[p - 1] != 'e' && body[p - 1] != 'E') {
      split = p;
      break;
    }
  }
  double re = 0.0;
  std::string_view im_text = body;
  if (split != std::string_view::npos) {
    if (!parse_real(trim(body.substr(0, split)), re)) throw bad();
    im_text = trim(body.substr(split));
  }
  double im = 0.0;
  if (im_text.empty() || im_text == "+") {
    im = 1.0;
  } else if (im_text == "-") {
    im = -1.0;
  } else if (!parse_real(im_text, im)) {
    throw bad();
  }
  return {re, im};
}

std::string format_complex(Complex z) {
  std::string im = format_real(z.imag());
  if (im.front() != '-') im = "+" + im;
  return format_real(z.real()) + im + "i";
}

CMatrix read_complex_table(std::istream& in, const std::string& source) {
  std::vector<std::vector<Complex>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split_fields(t);
    std::vector<Complex> row;
    for (std::size_t f = 0; f < fields.size(); ++f) {
      try {
        row.push_back(parse_complex(fields[f]));
      } catch (const ParseError& e) {
        throw ParseError(where(source, lineno, f + 1) + ": " + e.what());
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError(where(source, lineno, row.size()) + ": expected " +
                       std::to_string(rows.front().size()) + " fields");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(source + ": table is empty");
  CMatrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return out;
}

CMatrix load_complex_table(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_complex_table(in, path.string());
}

void write_complex_table(std::ostream& out, const CMatrix& table) {
  for (Eigen::Index r = 0; r < table.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.cols(); ++c) {
      if (c) out << ',';
      out << format_complex(table(r, c));
    }
    out << '\n';
  }
}

SymbolSamples read_symbol_csv(std::istream& in, const std::string& source) {
  std::vector<double> pts, re, im;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split_fields(t);
    if (first && !fields.empty() && fields[0] == "point") {
      first = false;
      continue;
    }
    first = false;
    if (fields.size() != 3)
      throw ParseError(where(source, lineno, fields.size()) + ": expected point,re,im");
    double v[3];
    for (std::size_t f = 0; f < 3; ++f)
      if (!parse_real(fields[f], v[f]))
        throw ParseError(where(source, lineno, f + 1) + ": not a number '" +
                         std::string(fields[f]) + "'");
    pts.push_back(v[0]);
    re.push_back(v[1]);
    im.push_back(v[2]);
  }
  if (pts.empty()) throw ParseError(source + ": symbol file has no rows");
  SymbolSamples s;
  s.points.resize(static_cast<Eigen::Index>(pts.size()));
  s.values.resize(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t j = 0; j < pts.size(); ++j) {
    s.points(static_cast<Eigen::Index>(j)) = pts[j];
    s.values(static_cast<Eigen::Index>(j)) = {re[j], im[j]};
  }
  return s;
}

SymbolSamples load_symbol_csv(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return read_symbol_csv(in, path.string());
}

Symbol symbol_on_space(const SymbolSamples& samples, const SampledMeasureSpace& space, double tol) {
  if (static_cast<std::size_t>(samples.points.size()) != space.size())
    throw ShapeError("symbol file has " + std::to_string(samples.points.size()) +
                     " rows, the space has " + std::to_string(space.size()) + " points");
  for (std::size_t j = 0; j < space.size(); ++j)
    if (std::abs(samples.points(static_cast<Eigen::Index>(j)) - space.point(j)) > tol)
      throw MismatchError("symbol row " + std::to_string(j + 1) + " is at x = " +
                          format_real(samples.points(static_cast<Eigen::Index>(j))) +
                          ", expected " + format_real(space.point(j)));
  return Symbol(samples.values);
}

std::string sweep_csv(const SweepResult& sweep) {
  std::ostringstream out;
  out << "step,n,L,norm\n";
  for (std::size_t s = 0; s < sweep.schedule.size(); ++s)
    out << s << ',' << sweep.schedule[s].n << ',' << format_real(sweep.schedule[s].half_width)
        << ',' << format_real(sweep.norms[s]) << '\n';
  return out.str();
}

nlohmann::json complex_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

nlohmann::json vector_json(const CVector& v) {
  auto j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(complex_json(v(i)));
  return j;
}

nlohmann::json vector_json(const RVector& v) {
  auto j = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
  return j;
}

nlohmann::json matrix_json(const CMatrix& m) {
  auto j = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) j.push_back(vector_json(CVector(m.row(r).transpose())));
  return j;
}

nlohmann::json space_json(const SampledMeasureSpace& space) {
  return {{"kind", to_string(space.kind())},
          {"points", space.points()},
          {"weights", space.weights()},
          {"extent", space.domain_extent()},
          {"layout", to_string(space.layout())}};
}

SampledMeasureSpace space_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("space: expected an object");
  for (const char* key : {"kind", "points", "weights", "extent"})
    if (!j.contains(key)) throw ParseError(std::string("space.") + key + ": missing");
  MeasureKind kind;
  const auto k = j.at("kind").get<std::string>();
  if (k == "atomic")
    kind = MeasureKind::Atomic;
  else if (k == "quadrature")
    kind = MeasureKind::Quadrature;
  else
    throw ParseError("space.kind: unknown kind '" + k + "'");
  GridLayout layout = GridLayout::Irregular;
  if (j.contains("layout")) {
    const auto l = j.at("layout").get<std::string>();
    if (l == "periodic")
      layout = GridLayout::Periodic;
    else if (l == "symmetric")
      layout = GridLayout::Symmetric;
    else if (l != "irregular")
      throw ParseError("space.layout: unknown layout '" + l + "'");
  }
  return SampledMeasureSpace(j.at("points").get<std::vector<double>>(),
                             j.at("weights").get<std::vector<double>>(), kind,
                             j.at("extent").get<double>(), layout);
}

nlohmann::json model_summary_json(const ModelSpace& model) {
  return {{"N", model.ambient_dim()},
          {"K", model.dim()},
          {"condition", model.d_basis_condition()},
          {"family", model.family_name()}};
}

void to_json(nlohmann::json& j, const Resolution& r) {
  j = {{"n", r.n}, {"L", r.half_width}};
}

void to_json(nlohmann::json& j, const FrameDiagnostics& d) {
  j = {{"upper", d.upper},
       {"lower", d.lower},
       {"synthesis_sigma_min", d.synthesis_sigma_min},
       {"synthesis_sigma_max", d.synthesis_sigma_max},
       {"mu_independent", d.mu_independent},
       {"total", d.total},
       {"tight", d.tight},
       {"parseval", d.parseval},
       {"classification", to_string(d.classification)},
       {"tolerance", d.tolerance},
       {"rank_tolerance", d.rank_tolerance},
       {"warnings", d.warnings}};
}

void to_json(nlohmann::json& j, const RieszTransition& t) {
  j = {{"condition", std::isfinite(t.condition) ? nlohmann::json(t.condition) : nlohmann::json("inf")},
       {"invertible", t.invertible},
       {"omega_riesz", t.omega_riesz},
       {"agrees", t.agrees}};
}

void to_json(nlohmann::json& j, const SupportWitness& w) {
  j = {{"index", w.index},
       {"support", w.support},
       {"support_measure", w.support_measure},
       {"support_fraction", w.support_fraction},
       {"sup_on_support", w.sup_on_support},
       {"max_off_support", w.max_off_support},
       {"proper_support", w.proper_support},
       {"within_alpha", w.within_alpha},
       {"alpha_violation_point", w.alpha_violation_point},
       {"alpha_violation_value", w.alpha_violation_value},
       {"passed", w.passed}};
}

void to_json(nlohmann::json& j, const OrthogonalityReport& r) {
  j = {{"passed", r.passed},     {"total", r.total},         {"rank", r.rank},
       {"required_rank", r.required_rank}, {"witnesses", r.witnesses}, {"failures", r.failures}};
}

void to_json(nlohmann::json& j, const NormBoundReport& r) {
  j = {{"norm", r.norm},
       {"bound", r.bound},
       {"upper_omega", r.upper_omega},
       {"upper_theta", r.upper_theta},
       {"symbol_sup", r.symbol_sup},
       {"holds", r.holds}};
}

void to_json(nlohmann::json& j, const CompositionReport& r) {
  j = {{"residual", r.residual},
       {"adjoint_residual", r.adjoint_residual},
       {"precondition", r.precondition},
       {"asserted", r.asserted},
       {"passed", r.passed}};
}

void to_json(nlohmann::json& j, const InverseReport& r) {
  auto finite = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json("inf"); };
  j = {{"sigma_min", r.sigma_min},
       {"sigma_max", r.sigma_max},
       {"injective", r.injective},
       {"inverse_norm", finite(r.inverse_norm)},
       {"symbol_min_point", r.symbol_min_point},
       {"symbol_min_modulus", r.symbol_min_modulus},
       {"injectivity_precondition", r.injectivity_precondition},
       {"injectivity_ok", r.injectivity_ok},
       {"bound_precondition", r.bound_precondition},
       {"bound_lower", r.bound_lower},
       {"bound_ok", r.bound_ok},
       {"reciprocal_precondition", r.reciprocal_precondition},
       {"reciprocal_residual", r.reciprocal_residual},
       {"reciprocal_ok", r.reciprocal_ok},
       {"adjoint_inverse_residual", r.adjoint_inverse_residual},
       {"adjoint_inverse_ok", r.adjoint_inverse_ok},
       {"discretization_inconsistency", r.discretization_inconsistency},
       {"passed", r.passed}};
  if (!r.injective) j["null_witness"] = vector_json(r.null_witness);
}

void to_json(nlohmann::json& j, const DensityWitness& w) {
  j = {{"index", w.index},
       {"image_norm", w.image_norm},
       {"sup_analysis", w.sup_analysis},
       {"symbol_l2", w.symbol_l2},
       {"bound", w.bound},
       {"support_measure", w.support_measure},
       {"holds", w.holds}};
}

void to_json(nlohmann::json& j, const DensityReport& r) {
  j = {{"passed", r.passed},           {"total", r.total},         {"rank", r.rank},
       {"upper_theta", r.upper_theta}, {"witnesses", r.witnesses}, {"failures", r.failures}};
}

void to_json(nlohmann::json& j, const ClosureProfile& p) {
  j = {{"schedule", p.schedule},
       {"integrals", p.integrals},
       {"fitted_exponent", p.fitted_exponent},
       {"threshold", p.threshold},
       {"verdict", to_string(p.verdict)},
       {"note", p.note}};
}

void to_json(nlohmann::json& j, const ClosabilityReport& r) {
  j = {{"passed", r.passed}, {"residual", r.residual}, {"total", r.total},
       {"rank", r.rank},     {"failures", r.failures}};
}

void to_json(nlohmann::json& j, const IdentityAudit& a) {
  j = {{"dense_residual", a.dense_residual},
       {"pairing_residual", a.pairing_residual},
       {"frame_operator_omega", a.frame_operator_omega},
       {"frame_operator_theta", a.frame_operator_theta},
       {"adjoint_residual", a.adjoint_residual},
       {"passed", a.passed}};
}

void to_json(nlohmann::json& j, const DiscreteComparison& c) {
  j = {{"classical_lower", c.classical_lower},
       {"classical_upper", c.classical_upper},
       {"classical_total", c.classical_total},
       {"maps_lower", c.maps_lower},
       {"maps_upper", c.maps_upper},
       {"maps_total", c.maps_total},
       {"lower_difference", c.lower_difference},
       {"upper_difference", c.upper_difference},
       {"agree", c.agree}};
}

void to_json(nlohmann::json& j, const QuartetMember& m) {
  j = {{"name", m.name},
       {"expected", m.expected},
       {"residual", m.residual},
       {"alternate_residual", m.alternate_residual},
       {"passed", m.passed},
       {"passes_under", m.passes_under ? nlohmann::json(to_string(*m.passes_under)) : nlohmann::json()}};
}

void to_json(nlohmann::json& j, const QuartetReport& r) {
  j = {{"n", r.n},
       {"convention", to_string(r.convention)},
       {"members", r.members},
       {"tolerance", r.tolerance},
       {"passed", r.passed},
       {"failures", r.failures}};
}

void to_json(nlohmann::json& j, const SweepResult& r) {
  j = {{"schedule", r.schedule},
       {"norms", r.norms},
       {"fitted_growth", r.fitted_growth},
       {"threshold", r.threshold},
       {"verdict", to_string(r.verdict)},
       {"floor_checked", r.floor_checked},
       {"floor_ok", r.floor_ok},
       {"failures", r.failures},
       {"passed", r.passed}};
}

}  // namespace dframe
