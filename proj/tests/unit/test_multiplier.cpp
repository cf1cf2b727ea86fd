#include <gtest/gtest.h>

#include <cmath>

#include "dframe/error.hpp"
#include "dframe/multiplier.hpp"
#include "helpers.hpp"

using namespace dframe;
using namespace dframe::testing;

namespace {

struct Diagonal {
  SpacePtr space = counting(3);
  ModelPtr model = model_of(space);
  DistributionMap basis = delta_frame(model, space);
};

}  // namespace

TEST(Symbol, CachesModulusStatistics) {
  const Symbol m(cvec({Complex(0, 2), -3.0, 0.5}));
  EXPECT_EQ(m.ess_sup(), 3.0);
  EXPECT_EQ(m.min_modulus(), 0.5);
  EXPECT_TRUE(m.nonvanishing());
  EXPECT_FALSE(Symbol(cvec({1.0, 0.0})).nonvanishing());
  EXPECT_THROW(Symbol(cvec({1.0, 0.0})).reciprocal(), SingularityError);
  EXPECT_THROW(Symbol(cvec({NAN})), DomainError);
}

TEST(Symbol, NamedFamilies) {
  const auto s = SampledMeasureSpace::symmetric(9, 4.0);
  EXPECT_DOUBLE_EQ(Symbol::coordinate(s).ess_sup(), 4.0);
  const auto step = Symbol::step(s, 0.0, 1.0, 2.0);
  EXPECT_EQ(step[0], Complex(1.0));
  EXPECT_EQ(step[4], Complex(2.0));
  const auto phase = Symbol::random_phase(s, 9, 1.5);
  EXPECT_NEAR(phase.min_modulus(), 1.5, 1e-14);
  EXPECT_NEAR(phase.ess_sup(), 1.5, 1e-14);
  const auto safe = Symbol::reciprocal_safe(s, 9, 1.0, 2.0);
  EXPECT_GE(safe.min_modulus(), 1.0);
  EXPECT_LE(safe.ess_sup(), 2.0);
  EXPECT_EQ(Symbol::random_phase(s, 4).values(), Symbol::random_phase(s, 4).values());
}

TEST(Multiplier, DiagonalRepresentation) {
  Diagonal d;
  const auto M = build(Symbol(cvec({2, 3, 5})), d.basis, d.basis);
  EXPECT_EQ(M.dense(), CMatrix(cvec({2, 3, 5}).asDiagonal()));
  EXPECT_DOUBLE_EQ(operator_norm(M), 5.0);
  EXPECT_EQ(M.build_residual(), 0.0);
}

TEST(Multiplier, ParsevalUnitSymbolIsIdentity) {
  const auto space = periodic(16);
  const auto omega = delta_frame(model_of(space, Trigonometric{8}), space);
  const auto M = build(Symbol::constant(*space, 1.0), omega, omega);
  EXPECT_LT(max_abs(M.dense() - CMatrix::Identity(16, 16)), 1e-12);
}

TEST(Multiplier, ScaledBasisSaturatesNormBound) {
  Diagonal d;
  const auto M = build(Symbol::constant(*d.space, 1.0), d.basis.scaled(2.0), d.basis);
  EXPECT_LT(max_abs(M.dense() - 2.0 * CMatrix::Identity(3, 3)), 1e-15);
  const auto nb = check_norm_bound(M);
  EXPECT_NEAR(nb.upper_omega, 4.0, 1e-12);
  EXPECT_NEAR(nb.upper_theta, 1.0, 1e-12);
  EXPECT_NEAR(nb.norm, nb.bound, 1e-12);
  EXPECT_TRUE(nb.holds);
}

TEST(Multiplier, ZeroSymbolHasZeroNorm) {
  Diagonal d;
  EXPECT_EQ(operator_norm(build(Symbol::constant(*d.space, 0.0), d.basis, d.basis)), 0.0);
}

TEST(Multiplier, BuildRejectsMismatches) {
  Diagonal d;
  const auto other = counting(4);
  const auto elsewhere = delta_frame(model_of(other), other);
  EXPECT_THROW(build(Symbol::constant(*d.space, 1.0), d.basis, elsewhere), MismatchError);
  EXPECT_THROW(build(Symbol(cvec({1, 2})), d.basis, d.basis), ShapeError);
}

TEST(Multiplier, RandomNormBound) {
  Rng rng(1);
  const auto space = periodic(12);
  const auto model = model_of(space, Trigonometric{3});
  for (int t = 0; t < 100; ++t) {
    const auto omega = random_map(model, space, rng);
    const auto theta = random_map(model, space, rng);
    const Symbol m(random_cvector(rng, 12));
    const auto M = build(m, omega, theta);
    EXPECT_TRUE(check_norm_bound(M).holds);
    EXPECT_LT(M.factorization_residual(), 1e-12);
  }
}

TEST(Multiplier, AdjointExamples) {
  Diagonal d;
  const auto M = build(Symbol(cvec({2, 3, 5})), d.basis, d.basis);
  EXPECT_EQ(adjoint(M).dense(), M.dense());

  const auto s2 = counting(2);
  const auto b2 = delta_frame(model_of(s2), s2);
  const auto A = adjoint(build(Symbol(cvec({Complex(0, 1), Complex(0, -1)})), b2, b2));
  EXPECT_EQ(A.symbol()[0], Complex(0, -1));
  EXPECT_EQ(A.symbol()[1], Complex(0, 1));
}

TEST(Multiplier, AdjointPairingAndInvolution) {
  Rng rng(2);
  const auto space = periodic(10);
  const auto model = model_of(space);
  const auto omega = random_map(model, space, rng);
  const auto theta = random_map(model, space, rng);
  const auto M = build(Symbol(random_cvector(rng, 10)), omega, theta);
  const auto A = adjoint(M);
  EXPECT_LT(max_abs(A.dense() - M.dense().adjoint()), 1e-12);
  EXPECT_LT(max_abs(adjoint(A).dense() - M.dense()), 1e-12);
  for (int t = 0; t < 100; ++t) {
    const auto f = random_unit_test_function(*model, rng);
    const auto g = random_unit_test_function(*model, rng);
    EXPECT_LT(std::abs(g.coeffs.dot(M.apply(f).coeffs) - A.apply(g).coeffs.dot(f.coeffs)), 1e-12);
  }
}

TEST(Multiplier, DiagonalCalculus) {
  const auto s = counting(2);
  const auto b = delta_frame(model_of(s), s);
  const auto r = compose(build(Symbol(cvec({1, 2})), b, b), build(Symbol(cvec({3, 4})), b, b));
  EXPECT_TRUE(r.precondition);
  EXPECT_EQ(r.product, CMatrix(cvec({3, 8}).asDiagonal()));
  EXPECT_LT(r.residual, 1e-15);
  EXPECT_TRUE(r.passed);
}

TEST(Multiplier, CalculusForExponentialDualPair) {
  Rng rng(3);
  const auto space = periodic(16);
  const auto model = model_of(space, Trigonometric{8});
  const auto omega = exponential_frame(model, space).scaled(Complex(1.5, 0.5));
  const auto theta = canonical_dual(omega);
  ASSERT_TRUE(is_riesz_dual_pair(theta, omega));
  for (int t = 0; t < 10; ++t) {
    const Symbol m1(random_cvector(rng, 16));
    const Symbol m2(random_cvector(rng, 16));
    const auto r = compose(build(m1, theta, omega), build(m2, theta, omega));
    EXPECT_TRUE(r.asserted);
    EXPECT_LT(r.residual, 1e-10);
    EXPECT_LT(r.adjoint_residual, 1e-10);
  }
}

TEST(Multiplier, CalculusNeedsDualPair) {
  Rng rng(4);
  const auto space = counting(6);
  const auto model = model_of(counting(3));
  const DistributionMap omega(space, model, random_cmatrix(rng, 6, 3));
  const auto r = compose(build(Symbol(random_cvector(rng, 6)), omega, omega),
                         build(Symbol(random_cvector(rng, 6)), omega, omega));
  EXPECT_FALSE(r.precondition);
  EXPECT_FALSE(r.asserted);
  EXPECT_GT(r.residual, 1e-3);
  EXPECT_TRUE(r.passed);
}

TEST(Multiplier, DiagonalInverse) {
  Diagonal d;
  const auto r = invert(build(Symbol(cvec({2, 3, 5})), d.basis, d.basis));
  ASSERT_TRUE(r.injective);
  EXPECT_NEAR(r.sigma_min, 2.0, 1e-14);
  EXPECT_LT(max_abs(*r.inverse - CMatrix(cvec({0.5, 1.0 / 3, 0.2}).asDiagonal())), 1e-14);
  EXPECT_TRUE(r.reciprocal_precondition);
  EXPECT_TRUE(r.passed);
}

TEST(Multiplier, VanishingSymbolIsNotInjective) {
  Diagonal d;
  const auto r = invert(build(Symbol(cvec({2, 0, 5})), d.basis, d.basis));
  EXPECT_FALSE(r.injective);
  EXPECT_EQ(r.sigma_min, 0.0);
  EXPECT_FALSE(r.injectivity_precondition);
  EXPECT_EQ(r.symbol_min_point, 1);
  EXPECT_NEAR(std::abs(r.null_witness(1)), 1.0, 1e-14);
  EXPECT_TRUE(r.passed);
}

TEST(Multiplier, InverseBoundForRieszPair) {
  Rng rng(5);
  const auto space = periodic(16);
  const auto model = model_of(space, Trigonometric{8});
  const auto omega = exponential_frame(model, space).scaled(2.0);
  const auto theta = canonical_dual(omega);
  for (int t = 0; t < 10; ++t) {
    const auto r = invert(build(Symbol::random_phase(*space, rng()), theta, omega));
    EXPECT_TRUE(r.bound_precondition);
    EXPECT_GE(r.sigma_min, r.bound_lower - 1e-8);
    EXPECT_TRUE(r.reciprocal_precondition);
    EXPECT_LT(r.reciprocal_residual, 1e-10);
    EXPECT_TRUE(r.passed);
  }
}

TEST(Multiplier, ReconstructionWithDeltaPair) {
  const auto space = periodic(16);
  const auto model = model_of(space, Trigonometric{8});
  const auto delta = delta_frame(model, space);
  const Symbol m(sample(*space, [](double x) { return 2.0 + std::cos(2.0 * M_PI * x); }));
  const auto M = build(m, delta, delta);
  for (auto side : {ReconstructionSide::Right, ReconstructionSide::Left}) {
    const auto r = reconstruction_pair(M, side);
    EXPECT_LT(r.residual, 1e-10);
    EXPECT_LT(max_abs(r.map.eval() - delta.eval()), 1e-10);
  }
}

TEST(Multiplier, ReconstructionUnitSymbolReturnsOmega) {
  const auto space = periodic(8);
  const auto omega = exponential_frame(model_of(space, Trigonometric{4}), space);
  const auto M = build(Symbol::constant(*space, 1.0), omega, omega);
  EXPECT_LT(max_abs(reconstruction_pair(M, ReconstructionSide::Right).map.eval() - omega.eval()), 1e-12);
}

TEST(Multiplier, ReconstructionRandomDiagonal) {
  Rng rng(6);
  const auto space = counting(5);
  const auto b = delta_frame(model_of(space), space);
  const auto M = build(Symbol::reciprocal_safe(*space, 6), b, b);
  EXPECT_LT(reconstruction_pair(M, ReconstructionSide::Right).residual, 1e-12);
  EXPECT_LT(reconstruction_pair(M, ReconstructionSide::Left).residual, 1e-12);
}

TEST(Multiplier, ReconstructionRandomPair) {
  Rng rng(7);
  const auto space = periodic(9);
  const auto model = model_of(space);
  const auto M = build(Symbol::reciprocal_safe(*space, 7), random_map(model, space, rng),
                       random_map(model, space, rng));
  EXPECT_LT(reconstruction_pair(M, ReconstructionSide::Right).residual, 1e-10);
  EXPECT_LT(reconstruction_pair(M, ReconstructionSide::Left).residual, 1e-10);
}

TEST(Multiplier, ReconstructionNeedsInvertible) {
  Diagonal d;
  EXPECT_THROW(reconstruction_pair(build(Symbol(cvec({1, 0, 1})), d.basis, d.basis), ReconstructionSide::Left),
               SingularityError);
}

TEST(Multiplier, SplitSymbolExamples) {
  const auto [a1, a2] = split_symbol(Symbol(cvec({0.5, 3.0})));
  EXPECT_EQ(a1.values(), cvec({2.5, 0.0}));
  EXPECT_EQ(a2.values(), cvec({-2.0, 3.0}));
  const auto [b1, b2] = split_symbol(Symbol(cvec({5.0, 5.0})));
  EXPECT_EQ(b1.ess_sup(), 0.0);
  EXPECT_EQ(b2.values(), cvec({5.0, 5.0}));
  const auto [c1, c2] = split_symbol(Symbol(cvec({0.0})));
  EXPECT_EQ(c1[0], Complex(2.0));
  EXPECT_EQ(c2[0], Complex(-2.0));
}

TEST(MultiplierProperty, SplitSymbolPostconditions) {
  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    const Symbol m(1.5 * random_cvector(rng, 20));
    const auto [m1, m2] = split_symbol(m);
    EXPECT_LT(((m1 + m2).values() - m.values()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_GE(m2.min_modulus(), 1.0);
    EXPECT_LE(m1.ess_sup(), 3.0);
  }
}

TEST(Multiplier, DensityCertificateExamples) {
  const auto space = symmetric(41, 4.0);
  const auto model = model_of(space);
  const auto delta = delta_frame(model, space);
  const auto bumps = bump_witnesses(*model, 2);
  const auto r = density_certificate(delta, delta, Symbol::coordinate(*space), bumps);
  EXPECT_TRUE(r.passed);
  for (const auto& w : r.witnesses) EXPECT_TRUE(w.holds);

  const auto zero = density_certificate(delta, delta, Symbol::constant(*space, 0.0), bumps);
  EXPECT_TRUE(zero.passed);
  for (const auto& w : zero.witnesses) {
    EXPECT_EQ(w.bound, 0.0);
    EXPECT_EQ(w.image_norm, 0.0);
  }

  const std::vector<TestFunction> few(bumps.begin(), bumps.begin() + 3);
  const auto partial = density_certificate(delta, delta, Symbol::coordinate(*space), few);
  EXPECT_FALSE(partial.passed);
  EXPECT_EQ(partial.rank, 3u);
}

TEST(Multiplier, GrowthFit) {
  EXPECT_NEAR(fit_growth_exponent({1, 2, 4, 8}, {3, 6, 12, 24}), 1.0, 1e-12);
  EXPECT_NEAR(fit_growth_exponent({1, 2, 4}, {5, 5, 5}), 0.0, 1e-12);
  EXPECT_THROW(fit_growth_exponent({1}, {1}), InsufficientDataError);
}

TEST(Multiplier, ClosureProfile) {
  const RefinementFamily family(RefinementGenerator::Symmetric, {{33, 4.0}, {65, 8.0}, {129, 16.0}, {257, 32.0}});
  const MapSymbolBuilder coord = [](std::size_t, const SpacePtr& s) {
    const auto d = delta_frame(model_of(s), s);
    return std::make_pair(d, Symbol::coordinate(*s));
  };
  const auto samples = [](const DistributionMap& omega, auto fn) {
    return omega.model()->project(sample(*omega.space(), fn));
  };
  const auto gauss = closure_domain_profile(family, coord, [&](std::size_t, const DistributionMap& o) {
    return samples(o, [](double x) { return std::exp(-x * x); });
  });
  EXPECT_EQ(gauss.verdict, DomainVerdict::Convergent);

  const auto tail = closure_domain_profile(family, coord, [&](std::size_t, const DistributionMap& o) {
    return samples(o, [](double x) { return 1.0 / (1.0 + std::abs(x)); });
  });
  EXPECT_EQ(tail.verdict, DomainVerdict::Divergent);
  EXPECT_GT(tail.fitted_exponent, 0.25);

  const MapSymbolBuilder bounded = [](std::size_t, const SpacePtr& s) {
    const auto d = delta_frame(model_of(s), s);
    return std::make_pair(d, Symbol::step(*s, 0.0, 1.0, -1.0));
  };
  const auto flat = closure_domain_profile(family, bounded, [&](std::size_t, const DistributionMap& o) {
    return samples(o, [](double x) { return std::exp(-std::abs(x)); });
  });
  EXPECT_EQ(flat.verdict, DomainVerdict::Convergent);

  const RefinementFamily short_family(RefinementGenerator::Symmetric, {{5, 1.0}, {9, 2.0}});
  EXPECT_THROW(closure_domain_profile(short_family, coord, [&](std::size_t, const DistributionMap& o) {
                 return samples(o, [](double) { return 1.0; });
               }),
               InsufficientDataError);
}

TEST(Multiplier, ClosabilityExamples) {
  Diagonal d;
  const std::vector<TestFunction> basis = to_functions(CMatrix::Identity(3, 3));
  const auto diag = closability_check(d.basis, d.basis, Symbol(cvec({2, 3, Complex(0, 5)})), basis);
  EXPECT_TRUE(diag.passed);
  EXPECT_EQ(diag.residual, 0.0);

  Rng rng(9);
  const auto space = periodic(10);
  const auto model = model_of(space);
  const auto r = closability_check(random_map(model, space, rng), random_map(model, space, rng),
                                   Symbol::random_phase(*space, 9), to_functions(CMatrix::Identity(10, 10)));
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.residual, 1e-12);

  const auto none = closability_check(d.basis, d.basis, Symbol(cvec({1, 1, 1})), {});
  EXPECT_FALSE(none.passed);
}

TEST(MultiplierProperty, FactorizationAndAdjointInverse) {
  Rng rng(10);
  const auto space = periodic(8);
  const auto model = model_of(space);
  for (int t = 0; t < 20; ++t) {
    const auto M = build(Symbol::reciprocal_safe(*space, rng()), random_map(model, space, rng),
                         random_map(model, space, rng));
    EXPECT_LT(M.factorization_residual(), 1e-12);
    const auto r = invert(M);
    if (r.injective) EXPECT_TRUE(r.adjoint_inverse_ok);
  }
}
