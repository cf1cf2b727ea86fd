#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dframe/error.hpp"
#include "dframe/model.hpp"
#include "helpers.hpp"

using namespace dframe;
using namespace dframe::testing;

namespace {

double orthonormality_error(const ModelSpace& m) {
  const CMatrix g = m.on_basis().adjoint() * m.h_gram() * m.on_basis();
  const auto k = static_cast<Eigen::Index>(m.dim());
  return max_abs(g - CMatrix::Identity(k, k));
}

}  // namespace

TEST(Model, TrigonometricDegreeSevenOnSixteenPoints) {
  const auto m = make_model(periodic(16), Trigonometric{7});
  EXPECT_EQ(m.dim(), 15u);
  EXPECT_EQ(m.ambient_dim(), 16u);
  EXPECT_LT(orthonormality_error(m), 1e-13);
}

TEST(Model, TrigonometricAliasWindowGivesFullBasis) {
  for (std::size_t n : {4u, 8u, 9u, 64u}) {
    const auto m = make_model(periodic(n), Trigonometric{static_cast<int>(n)});
    EXPECT_EQ(m.dim(), n);
    EXPECT_LT(orthonormality_error(m), 1e-12);
  }
}

TEST(Model, RawSamplesOnCountingIsIdentity) {
  const auto m = make_model(counting(3), RawSamples{});
  EXPECT_EQ(m.dim(), 3u);
  EXPECT_EQ(m.on_basis(), CMatrix(CMatrix::Identity(3, 3)));
}

TEST(Model, RepeatedGaussianIsDegenerate) {
  try {
    make_model(symmetric(21, 2.0), GaussianBumps{{0.5, 0.5}, 0.4});
    FAIL() << "expected DegeneracyError";
  } catch (const DegeneracyError& e) {
    EXPECT_EQ(e.column(), 1);
  }
}

TEST(Model, GaussianBumpsAreOrthonormalized) {
  const auto m = make_model(symmetric(41, 4.0), GaussianBumps{{-2.0, -1.0, 0.0, 1.0, 2.0}, 0.7});
  EXPECT_EQ(m.dim(), 5u);
  EXPECT_LT(orthonormality_error(m), 1e-12);
  EXPECT_GT(m.d_basis_condition(), 1.0);
  EXPECT_EQ(m.pivots().size(), 5u);
  EXPECT_EQ(m.labels().size(), 5u);
}

TEST(Model, HInnerExamples) {
  const auto m = make_model(counting(3), RawSamples{});
  const TestFunction e0{cvec({1.0, 0.0, 0.0})};
  EXPECT_EQ(h_inner(m, e0, e0), Complex(1.0));
  const auto m2 = make_model(counting(2), RawSamples{});
  EXPECT_EQ(h_inner(m2, {cvec({1.0, 0.0})}, {cvec({0.0, 1.0})}), Complex(0.0));
  EXPECT_EQ(h_inner(m2, {cvec({1.0, Complex(0, 2)})}, {cvec({1.0, 1.0})}), Complex(1.0, 2.0));
  EXPECT_THROW(h_inner(m2, {cvec({1.0})}, {cvec({1.0, 1.0})}), ShapeError);
}

TEST(Model, DftOfConstantIsDc) {
  const auto s = SampledMeasureSpace::periodic_unit(4);
  const CVector f = dft(s, CVector::Ones(4));
  EXPECT_NEAR(std::abs(f(0) - Complex(2.0)), 0.0, 1e-15);
  for (int k = 1; k < 4; ++k) EXPECT_LT(std::abs(f(k)), 1e-15);
}

TEST(Model, DftMatchesNegativeExponentSum) {
  const auto s = SampledMeasureSpace::periodic_unit(8);
  Rng rng(3);
  const CVector u = random_cvector(rng, 8);
  const CVector f = dft(s, u);
  for (int k = 0; k < 8; ++k) {
    Complex acc = 0.0;
    for (int j = 0; j < 8; ++j) acc += u(j) * std::exp(Complex(0, -2.0 * std::numbers::pi * j * k / 8.0));
    EXPECT_LT(std::abs(f(k) - acc / std::sqrt(8.0)), 1e-13);
  }
}

TEST(Model, DftInversionAndUnitarity) {
  Rng rng(4);
  for (std::size_t n : {4u, 8u, 16u, 64u, 100u}) {
    const auto s = SampledMeasureSpace::periodic_unit(n);
    for (int t = 0; t < 100; ++t) {
      const CVector xi = random_cvector(rng, static_cast<Eigen::Index>(n));
      EXPECT_LT((dft(s, idft(s, xi)) - xi).norm(), 1e-12);
      EXPECT_LT(std::abs(l2_norm(s, dft(s, xi)) - l2_norm(s, xi)), 1e-12);
    }
  }
}

TEST(Model, DftNeedsPeriodicGrid) {
  const auto s = SampledMeasureSpace::symmetric(9, 1.0);
  EXPECT_THROW(dft(s, CVector::Ones(9)), UnsupportedSpaceError);
}

TEST(Model, ProjectionRoundTripsTestFunctions) {
  const auto m = make_model(symmetric(41, 4.0), GaussianBumps{{-1.0, 0.0, 1.0}, 0.8});
  Rng rng(5);
  const auto f = m.random_test_function(rng);
  EXPECT_LT((m.project(m.to_samples(f)).coeffs - f.coeffs).norm(), 1e-12);
}

TEST(ModelProperty, OrthonormalizationIsIdempotent) {
  const auto space = periodic(16);
  const auto first = make_model(space, Trigonometric{8});
  const ModelSpace again(space, first.h_gram(), first.on_basis(), first.labels(), "again");
  EXPECT_LT(max_abs(again.on_basis() - first.on_basis()), 1e-12);
}

TEST(ModelProperty, HInnerIsPositiveDefinite) {
  const auto m = make_model(periodic(12), Trigonometric{3});
  Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    const auto f = m.random_test_function(rng);
    EXPECT_GT(h_inner(m, f, f).real(), 0.0);
    EXPECT_NEAR(h_norm(m, f), std::sqrt(l2_inner(*m.sample_space(), m.to_samples(f), m.to_samples(f)).real()),
                1e-12);
  }
}

TEST(Model, PairActsConjugateLinearly) {
  const DualElement F{cvec({1.0, Complex(0, 1)})};
  const TestFunction g{cvec({Complex(0, 1), 2.0})};
  EXPECT_EQ(pair(F, g), std::conj(Complex(0, 1)) * 1.0 + 2.0 * Complex(0, 1));
}
