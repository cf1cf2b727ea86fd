#include <gtest/gtest.h>

#include <sstream>

#include "dframe/error.hpp"
#include "dframe/io.hpp"
#include "helpers.hpp"

using namespace dframe;
using namespace dframe::testing;

TEST(Io, ParseComplexForms) {
  EXPECT_EQ(parse_complex("1+2i"), Complex(1, 2));
  EXPECT_EQ(parse_complex(" -1.5-0.25i "), Complex(-1.5, -0.25));
  EXPECT_EQ(parse_complex("3"), Complex(3, 0));
  EXPECT_EQ(parse_complex("-2i"), Complex(0, -2));
  EXPECT_EQ(parse_complex("i"), Complex(0, 1));
  EXPECT_EQ(parse_complex("-i"), Complex(0, -1));
  EXPECT_EQ(parse_complex("1e-3+2E+2i"), Complex(1e-3, 200));
  EXPECT_EQ(parse_complex("2-j"), Complex(2, -1));
  EXPECT_THROW(parse_complex(""), ParseError);
  EXPECT_THROW(parse_complex("1+2"), ParseError);
  EXPECT_THROW(parse_complex("abc"), ParseError);
  EXPECT_THROW(parse_complex("1+xi"), ParseError);
}

TEST(Io, FormatRoundTrips) {
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    const Complex z(random_uniform(rng, -1e3, 1e3), random_uniform(rng, -1e-3, 1e-3));
    EXPECT_EQ(parse_complex(format_complex(z)), z);
  }
}

TEST(Io, ComplexTable) {
  std::istringstream in("# eval\n1+0i, 0+1i\n\n2, -i\n");
  const CMatrix t = read_complex_table(in);
  ASSERT_EQ(t.rows(), 2);
  ASSERT_EQ(t.cols(), 2);
  EXPECT_EQ(t(1, 1), Complex(0, -1));
  std::ostringstream out;
  write_complex_table(out, t);
  std::istringstream back(out.str());
  EXPECT_EQ(read_complex_table(back), t);
}

TEST(Io, ComplexTableErrorsCarryLineAndField) {
  std::istringstream ragged("1,2\n3\n");
  try {
    read_complex_table(ragged, "w.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("w.csv: line 2"), std::string::npos);
  }
  std::istringstream bad("1,2\n3,zz\n");
  try {
    read_complex_table(bad, "w.csv");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2, field 2"), std::string::npos);
  }
  std::istringstream empty("# nothing\n");
  EXPECT_THROW(read_complex_table(empty), ParseError);
}

TEST(Io, SymbolCsv) {
  const auto space = SampledMeasureSpace::periodic_unit(4);
  std::istringstream in("point,re,im\n0,1,0\n0.25,0,1\n0.5,-1,0\n0.75,0,-1\n");
  const auto m = symbol_on_space(read_symbol_csv(in), space);
  EXPECT_EQ(m[1], Complex(0, 1));
  std::istringstream shifted("0.1,1,0\n0.25,0,1\n0.5,-1,0\n0.75,0,-1\n");
  EXPECT_THROW(symbol_on_space(read_symbol_csv(shifted), space), MismatchError);
  std::istringstream shorter("0,1,0\n");
  EXPECT_THROW(symbol_on_space(read_symbol_csv(shorter), space), ShapeError);
  std::istringstream bad("0,1\n");
  EXPECT_THROW(read_symbol_csv(bad), ParseError);
}

TEST(Io, SpaceJsonRoundTrip) {
  const auto s = SampledMeasureSpace::symmetric(5, 2.0);
  const auto j = space_json(s);
  EXPECT_EQ(j.at("kind"), "quadrature");
  EXPECT_EQ(j.at("points").size(), 5u);
  EXPECT_EQ(space_from_json(j), s);
  nlohmann::json missing = j;
  missing.erase("weights");
  EXPECT_THROW(space_from_json(missing), ParseError);
}

TEST(Io, SweepCsvHeader) {
  SweepResult r;
  r.schedule = {{9, 2.0}, {17, 4.0}};
  r.norms = {2.0, 4.0};
  EXPECT_EQ(sweep_csv(r), "step,n,L,norm\n0,9,2,2\n1,17,4,4\n");
}

TEST(Io, DiagnosticsJson) {
  const auto d = diagnose(discrete_sequence_map({cvec({1, 0}), cvec({1, 1}), cvec({0, 1})}));
  const nlohmann::json j = d;
  EXPECT_EQ(j.at("classification"), "Frame");
  EXPECT_NEAR(j.at("upper").get<double>(), 3.0, 1e-14);
}

TEST(Io, ModelSummary) {
  const auto m = make_model(std::make_shared<const SampledMeasureSpace>(SampledMeasureSpace::periodic_unit(16)),
                            Trigonometric{7});
  const auto j = model_summary_json(m);
  EXPECT_EQ(j.at("N"), 16);
  EXPECT_EQ(j.at("K"), 15);
}
