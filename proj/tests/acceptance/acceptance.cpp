// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <Eigen/QR>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dframe/lab.hpp"
#include "dframe/maps.hpp"
#include "dframe/multiplier.hpp"
#include "dframe/runner.hpp"

using namespace dframe;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

SpacePtr periodic(std::size_t n) {
  return std::make_shared<const SampledMeasureSpace>(SampledMeasureSpace::periodic_unit(n));
}
SpacePtr counting(std::size_t n) {
  return std::make_shared<const SampledMeasureSpace>(SampledMeasureSpace::counting(n));
}
ModelPtr model_of(const SpacePtr& s, const BasisFamily& f = RawSamples{}) {
  return std::make_shared<const ModelSpace>(make_model(s, f));
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

CMatrix random_unitary(Rng& rng, Eigen::Index k) {
  Eigen::HouseholderQR<CMatrix> qr(random_cmatrix(rng, k, k));
  return qr.householderQ() * CMatrix::Identity(k, k);
}

// Square eval table with singular values of W^{1/2} E in [lo, hi].
DistributionMap random_riesz(const ModelPtr& model, const SpacePtr& space, Rng& rng, double lo = 0.5,
                             double hi = 2.0) {
  const auto k = static_cast<Eigen::Index>(model->dim());
  RVector s(k);
  for (Eigen::Index i = 0; i < k; ++i) s(i) = random_uniform(rng, lo, hi);
  const CMatrix core = random_unitary(rng, k) * s.cast<Complex>().asDiagonal() * random_unitary(rng, k);
  const RVector inv_sqrt_w = space->weight_vector().cwiseSqrt().cwiseInverse();
  return DistributionMap(space, model, inv_sqrt_w.cast<Complex>().asDiagonal() * core, "riesz");
}

Outcome ac1() {
  Outcome o;
  double worst = 0.0;
  for (std::size_t n : {8u, 16u, 64u}) {
    const auto space = periodic(n);
    const auto d = diagnose(delta_frame(model_of(space, Trigonometric{static_cast<int>(n / 2)}), space));
    worst = std::max({worst, std::abs(d.lower - 1.0), std::abs(d.upper - 1.0)});
    if (d.classification != Classification::GelfandBasis) {
      o.passed = false;
      o.detail += "n=" + std::to_string(n) + " classified " + to_string(d.classification) + "; ";
    }
  }
  o.passed = o.passed && worst < 1e-10;
  o.detail += "max |A-1|,|B-1| = " + fmt(worst);
  return o;
}

Outcome ac2() {
  Rng rng(derive_seed(1, "ac2"));
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t j = 4 + static_cast<std::size_t>(t % 12);
    const auto space = periodic(j);
    const auto model = t % 2 ? model_of(space) : model_of(space, Trigonometric{static_cast<int>(j / 3)});
    const auto k = static_cast<Eigen::Index>(model->dim());
    const auto jj = static_cast<Eigen::Index>(j);
    const DistributionMap omega(space, model, random_cmatrix(rng, jj, k));
    const DistributionMap theta(space, model, random_cmatrix(rng, jj, k));
    const Symbol m(random_cvector(rng, jj));
    const auto M = build(m, omega, theta);
    CMatrix ref = CMatrix::Zero(k, k);
    for (Eigen::Index p = 0; p < jj; ++p)
      ref += space->weight(static_cast<std::size_t>(p)) * m.values()(p) * theta.eval().row(p).adjoint() *
             omega.eval().row(p);
    worst = std::max(worst, spectral_norm(M.dense() - ref));
  }
  return {worst < 1e-12, "worst factorization residual " + fmt(worst) + " over 100 triples"};
}

Outcome ac3() {
  Rng rng(derive_seed(1, "ac3"));
  double worst_slack = -1e300;
  for (int t = 0; t < 100; ++t) {
    const std::size_t j = 5 + static_cast<std::size_t>(t % 9);
    const auto space = t % 3 ? periodic(j) : counting(j);
    const auto model = model_of(space);
    const auto k = static_cast<Eigen::Index>(model->dim());
    const DistributionMap omega(space, model, random_cmatrix(rng, static_cast<Eigen::Index>(j), k));
    const DistributionMap theta(space, model, random_cmatrix(rng, static_cast<Eigen::Index>(j), k));
    const auto nb = check_norm_bound(build(Symbol(random_cvector(rng, static_cast<Eigen::Index>(j))), omega, theta));
    worst_slack = std::max(worst_slack, nb.norm - nb.bound);
  }
  const auto space = counting(3);
  const auto basis = delta_frame(model_of(space), space);
  const auto eq = check_norm_bound(build(Symbol::constant(*space, 1.0), basis.scaled(2.0), basis));
  const double gap = std::abs(eq.norm - eq.bound);
  return {worst_slack <= 1e-10 && gap < 1e-12,
          "max(norm - bound) = " + fmt(worst_slack) + ", scaled basis |norm - bound| = " + fmt(gap)};
}

Outcome ac4() {
  Rng rng(derive_seed(1, "ac4"));
  const auto space = counting(12);
  const auto model = model_of(counting(5));
  const DistributionMap omega(space, model, random_cmatrix(rng, 12, 5));
  const auto d = diagnose(omega);
  const auto theta = canonical_dual(omega);
  const auto dd = diagnose(theta);
  const double residual = brute_force_duality(omega, theta, 100, rng());
  const double bounds = std::max(std::abs(dd.lower - 1.0 / d.upper), std::abs(dd.upper - 1.0 / d.lower));

  const std::vector<CVector> phi = {(CVector(2) << 1, 0).finished(), (CVector(2) << 1, 1).finished(),
                                    (CVector(2) << 0, 1).finished()};
  const CMatrix vectors = canonical_dual(discrete_sequence_map(phi)).eval().conjugate();
  CMatrix want(3, 2);
  want << 2.0 / 3, -1.0 / 3, 1.0 / 3, 1.0 / 3, -1.0 / 3, 2.0 / 3;
  const double example = (vectors - want).cwiseAbs().maxCoeff();
  return {residual < 1e-10 && bounds < 1e-8 && example < 1e-12,
          "duality residual " + fmt(residual) + ", dual bound error " + fmt(bounds) +
              ", three-vector example error " + fmt(example)};
}

Outcome ac5() {
  Rng rng(derive_seed(1, "ac5"));
  double worst = 0.0;
  bool preconditions = true;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 4 + static_cast<std::size_t>(t % 8);
    const auto space = periodic(n);
    const auto model = model_of(space);
    const auto omega = random_riesz(model, space, rng);
    const auto theta = canonical_dual(omega);
    const Symbol m1(random_cvector(rng, static_cast<Eigen::Index>(n)));
    const Symbol m2(random_cvector(rng, static_cast<Eigen::Index>(n)));
    const auto r = compose(build(m1, theta, omega), build(m2, theta, omega));
    preconditions = preconditions && r.asserted;
    worst = std::max({worst, r.residual, r.adjoint_residual});
  }
  const auto space = counting(6);
  const DistributionMap frame(space, model_of(counting(3)), random_cmatrix(rng, 6, 3));
  const auto bad = compose(build(Symbol(random_cvector(rng, 6)), frame, frame),
                           build(Symbol(random_cvector(rng, 6)), frame, frame));
  return {preconditions && worst < 1e-10 && bad.residual > 1e-3 && !bad.asserted,
          "worst dual-pair residual " + fmt(worst) + ", non-dual residual " + fmt(bad.residual)};
}

Outcome ac6() {
  Rng rng(derive_seed(1, "ac6"));
  double worst_slack = -1e300;
  double worst_recip = 0.0;
  bool ok = true;
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 4 + static_cast<std::size_t>(t % 8);
    const auto space = periodic(n);
    const auto model = model_of(space);
    const auto omega = random_riesz(model, space, rng);
    const auto theta = t % 2 ? canonical_dual(omega) : random_riesz(model, space, rng);
    const double C = random_uniform(rng, 0.5, 1.5);
    const auto m = Symbol::reciprocal_safe(*space, rng(), C, 2.0 * C);
    const auto r = invert(build(m, theta, omega));
    ok = ok && r.bound_precondition && r.injective;
    const auto dt = diagnose(theta);
    const auto dw = diagnose(omega);
    worst_slack = std::max(worst_slack, std::sqrt(dt.lower * dw.lower) * C - r.sigma_min);
    if (t % 2) {
      ok = ok && r.reciprocal_precondition;
      worst_recip = std::max(worst_recip, r.reciprocal_residual);
    }
  }
  return {ok && worst_slack <= 1e-8 && worst_recip < 1e-10,
          "max(sqrt(A_theta A_omega) C - sigma_min) = " + fmt(worst_slack) + ", reciprocal residual " +
              fmt(worst_recip)};
}

Outcome ac7() {
  Rng rng(derive_seed(1, "ac7"));
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const auto space = periodic(8 + static_cast<std::size_t>(t));
    const auto model = model_of(space);
    const auto M = build(Symbol::reciprocal_safe(*space, rng()), random_riesz(model, space, rng),
                         random_riesz(model, space, rng));
    for (auto side : {ReconstructionSide::Right, ReconstructionSide::Left})
      worst = std::max(worst, reconstruction_pair(M, side, 100, rng()).residual);
  }
  const auto space = periodic(16);
  const auto model = model_of(space, Trigonometric{8});
  const auto delta = delta_frame(model, space);
  const Symbol m(sample(*space, [](double x) { return 1.5 + std::sin(2.0 * M_PI * x); }));
  const auto M = build(m, delta, delta);
  double gap = 0.0;
  for (auto side : {ReconstructionSide::Right, ReconstructionSide::Left}) {
    const auto r = reconstruction_pair(M, side);
    worst = std::max(worst, r.residual);
    gap = std::max(gap, (r.map.eval() - delta.eval()).cwiseAbs().maxCoeff());
  }
  return {worst < 1e-10 && gap < 1e-10,
          "worst reconstruction residual " + fmt(worst) + ", delta case |rho - delta|, |tau - delta| <= " + fmt(gap)};
}

Outcome ac8() {
  Rng rng(derive_seed(1, "ac8"));
  double worst = 0.0;
  bool ok = true;
  for (std::size_t n : {4u, 8u, 16u, 64u})
    for (int s = 0; s < 5; ++s) {
      const auto r = fourier_quartet_check(n, Symbol(random_cvector(rng, static_cast<Eigen::Index>(n))), 4, rng());
      ok = ok && r.passed;
      for (const auto& m : r.members) worst = std::max(worst, m.residual);
    }
  return {ok && worst < 1e-10, "worst quartet residual " + fmt(worst) + " under exp(-2 pi i j k / n)"};
}

Outcome ac9() {
  Rng rng(derive_seed(1, "ac9"));
  double worst = 0.0;
  bool ok = true;
  for (int t = 0; t < 50; ++t) {
    const auto k = static_cast<Eigen::Index>(2 + t % 5);
    const int count = static_cast<int>(k) + t % 4;
    std::vector<CVector> phi;
    for (int i = 0; i < count; ++i) phi.push_back(random_cvector(rng, k));
    const auto c = discrete_reduction_oracle(phi);
    ok = ok && c.agree;
    worst = std::max({worst, c.lower_difference / std::max(1.0, c.classical_upper),
                      c.upper_difference / std::max(1.0, c.classical_upper)});
  }
  return {ok && worst <= 1e-14, "worst relative bound difference " + fmt(worst) + " over 50 families"};
}

Outcome ac10() {
  const RefinementFamily family(RefinementGenerator::Symmetric, {{9, 2.0}, {17, 4.0}, {33, 8.0}, {65, 16.0}});
  SweepOptions opts;
  opts.linear_floor = 0.9;
  const auto up = unboundedness_sweep(family, weighted_delta_builder(), opts);
  const auto flat = unboundedness_sweep(family, bounded_symbol_builder(derive_seed(1, "ac10")));
  std::string norms;
  for (double n : up.norms) norms += (norms.empty() ? "" : ",") + fmt(n);
  return {up.floor_ok && up.verdict == SweepVerdict::Unbounded && flat.verdict == SweepVerdict::Bounded,
          "weighted-delta norms {" + norms + "} growth " + fmt(up.fitted_growth) + " " + to_string(up.verdict) +
              "; control growth " + fmt(flat.fitted_growth) + " " + to_string(flat.verdict)};
}

Outcome ac11() {
  const auto space = std::make_shared<const SampledMeasureSpace>(SampledMeasureSpace::symmetric(41, 4.0));
  const auto model = model_of(space);
  const auto delta = delta_frame(model, space);
  const auto bumps = bump_witnesses(*model, 2);
  const auto pseudo = check_pseudo_orthogonal(delta, bumps);
  RVector alpha(41);
  for (std::size_t j = 0; j < 41; ++j)
    alpha(static_cast<Eigen::Index>(j)) = 1.0 / (1.0 + std::pow(space->point(j), 2));
  const auto hyper = check_hyper_orthogonal(delta, alpha, [&](const RVector& a) {
    return indicator_witnesses(*model, a, 3);
  });
  const auto density = density_certificate(delta, delta, Symbol::coordinate(*space), bumps);
  bool split_ok = true;
  Rng rng(derive_seed(1, "ac11"));
  for (int t = 0; t < 100; ++t) {
    const Symbol m(random_uniform(rng, 0.1, 3.0) * random_cvector(rng, 30));
    const auto [m1, m2] = split_symbol(m);
    const double sum = ((m1 + m2).values() - m.values()).cwiseAbs().maxCoeff();
    split_ok = split_ok && sum <= 1e-15 && m2.min_modulus() >= 1.0 && m1.ess_sup() <= 3.0;
  }
  return {pseudo.passed && hyper.passed && density.passed && split_ok,
          std::string("pseudo ") + (pseudo.passed ? "pass" : "fail") + ", hyper " + (hyper.passed ? "pass" : "fail") +
              ", density " + std::to_string(density.witnesses.size()) + " witnesses " +
              (density.passed ? "pass" : "fail") + ", split " + (split_ok ? "pass" : "fail")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome ac12() {
  const fs::path configs = DFRAME_CONFIG_DIR;
  const fs::path root = fs::temp_directory_path() / "dframe-acceptance";
  std::size_t files = 0;
  Outcome o;
  for (const auto& entry : fs::directory_iterator(configs)) {
    if (entry.path().extension() != ".json") continue;
    const auto stem = entry.path().stem().string();
    runner::Overrides a, b;
    a.out = root / (stem + "-a");
    b.out = root / (stem + "-b");
    fs::remove_all(*a.out);
    fs::remove_all(*b.out);
    const auto ra = runner::run(entry.path(), a);
    const auto rb = runner::run(entry.path(), b);
    if (ra.exit_code != rb.exit_code) o.passed = false;
    for (const auto& f : fs::directory_iterator(*a.out)) {
      ++files;
      if (slurp(f.path()) != slurp(*b.out / f.path().filename())) {
        o.passed = false;
        o.detail += stem + "/" + f.path().filename().string() + " differs; ";
      }
    }
  }
  o.passed = o.passed && files > 0;
  o.detail += std::to_string(files) + " report files compared";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 parseval delta frame", ac1},      {"AC2 factorization", ac2},
      {"AC3 norm bound", ac3},                {"AC4 canonical dual", ac4},
      {"AC5 symbolic calculus", ac5},         {"AC6 inverse bound", ac6},
      {"AC7 reconstruction", ac7},            {"AC8 fourier quartet", ac8},
      {"AC9 discrete reduction", ac9},        {"AC10 unboundedness", ac10},
      {"AC11 orthogonality and density", ac11}, {"AC12 determinism", ac12},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    failed += o.passed ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
