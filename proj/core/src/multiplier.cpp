#include "dframe/multiplier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dframe/error.hpp"

namespace dframe {

// -- Symbol --------------------------------------------------------------------

Symbol::Symbol(CVector values, double tol) : values_(std::move(values)), tol_(tol) {
  if (!values_.allFinite()) throw DomainError("symbol has non-finite values");
  if (values_.size() > 0) {
    const RVector mod = values_.cwiseAbs();
    ess_sup_ = mod.maxCoeff();
    min_modulus_ = mod.minCoeff();
  }
  nonvanishing_ = values_.size() > 0 && min_modulus_ > tol_;
}

Symbol Symbol::constant(const SampledMeasureSpace& space, Complex value) {
  return Symbol(CVector::Constant(static_cast<Eigen::Index>(space.size()), value));
}

Symbol Symbol::coordinate(const SampledMeasureSpace& space) {
  return Symbol(sample(space, [](double x) { return x; }));
}

Symbol Symbol::step(const SampledMeasureSpace& space, double threshold, Complex lo, Complex hi) {
  CVector v(static_cast<Eigen::Index>(space.size()));
  for (std::size_t j = 0; j < space.size(); ++j)
    v(static_cast<Eigen::Index>(j)) = space.point(j) < threshold ? lo : hi;
  return Symbol(std::move(v));
}

Symbol Symbol::random_phase(const SampledMeasureSpace& space, std::uint64_t seed, double modulus) {
  Rng rng(seed);
  CVector v(static_cast<Eigen::Index>(space.size()));
  for (Eigen::Index j = 0; j < v.size(); ++j)
    v(j) = std::polar(modulus, random_uniform(rng, 0.0, 2.0 * std::numbers::pi));
  return Symbol(std::move(v));
}

Symbol Symbol::reciprocal_safe(const SampledMeasureSpace& space, std::uint64_t seed, double lo,
                               double hi) {
  if (!(lo > 0.0) || hi < lo) throw DomainError("reciprocal_safe: need 0 < lo <= hi");
  Rng rng(seed);
  CVector v(static_cast<Eigen::Index>(space.size()));
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double r = random_uniform(rng, lo, hi);
    v(j) = std::polar(r, random_uniform(rng, 0.0, 2.0 * std::numbers::pi));
  }
  return Symbol(std::move(v));
}

Symbol Symbol::conj() const { return Symbol(values_.conjugate(), tol_); }

Symbol Symbol::reciprocal() const {
  for (Eigen::Index j = 0; j < values_.size(); ++j)
    if (values_(j) == Complex(0.0))
      throw SingularityError("symbol vanishes at point " + std::to_string(j));
  return Symbol(values_.cwiseInverse(), tol_);
}

Symbol Symbol::operator*(const Symbol& other) const {
  if (other.size() != size()) throw ShapeError("symbol product: length mismatch");
  return Symbol(values_.cwiseProduct(other.values_), tol_);
}

Symbol Symbol::operator+(const Symbol& other) const {
  if (other.size() != size()) throw ShapeError("symbol sum: length mismatch");
  return Symbol(values_ + other.values_, tol_);
}

// -- MultiplierOperator ----------------------------------------------------------

MultiplierOperator::MultiplierOperator(CMatrix dense, DistributionMap omega, DistributionMap theta,
                                       Symbol symbol)
    : dense_(std::move(dense)),
      omega_(std::move(omega)),
      theta_(std::move(theta)),
      symbol_(std::move(symbol)) {
  if (static_cast<std::size_t>(dense_.rows()) != omega_.dim() || dense_.rows() != dense_.cols())
    throw ShapeError("multiplier: dense array must be K x K");
}

CVector MultiplierOperator::weighted_symbol() const {
  return omega_.space()->weight_vector().cast<Complex>().cwiseProduct(symbol_.values());
}

double MultiplierOperator::factorization_residual() const {
  const CMatrix factored = synthesis() * (weighted_symbol().asDiagonal() * analysis());
  return spectral_norm(dense_ - factored);
}

TestFunction MultiplierOperator::apply(const TestFunction& f) const {
  if (static_cast<std::size_t>(f.coeffs.size()) != dim())
    throw ShapeError("multiplier apply: wrong coefficient length");
  return {dense_ * f.coeffs};
}

TestFunction random_unit_test_function(const ModelSpace& model, Rng& rng) {
  CVector c = random_cvector(rng, static_cast<Eigen::Index>(model.dim()));
  const double n = c.norm();
  if (n > 0.0) c /= n;
  return {std::move(c)};
}

namespace {

// sum_j w_j m_j <f, omega_j> <theta_j, g>, summed point by point.
Complex form_value(const DistributionMap& omega, const DistributionMap& theta, const CVector& m,
                   const CVector& f, const CVector& g) {
  const CVector af = omega.eval() * f;
  const CVector ag = theta.eval() * g;
  Complex acc = 0.0;
  for (Eigen::Index j = 0; j < af.size(); ++j)
    acc += omega.space()->weight(static_cast<std::size_t>(j)) * m(j) * af(j) * std::conj(ag(j));
  return acc;
}

}  // namespace

MultiplierOperator build(const Symbol& m, const DistributionMap& omega,
                         const DistributionMap& theta) {
  if (!omega.compatible_with(theta))
    throw MismatchError("build: omega and theta must share the measure space and the model");
  if (m.size() != omega.points())
    throw ShapeError("build: symbol has " + std::to_string(m.size()) + " values, X has " +
                     std::to_string(omega.points()) + " points");
  const CVector wm = omega.space()->weight_vector().cast<Complex>().cwiseProduct(m.values());
  CMatrix dense = theta.eval().adjoint() * (wm.asDiagonal() * omega.eval());

  MultiplierOperator M(std::move(dense), omega, theta, m);
  // Check the defining form on a couple of random pairs.
  Rng rng(0x5eedULL);
  double worst = 0.0;
  for (int t = 0; t < 2; ++t) {
    const auto f = random_unit_test_function(*omega.model(), rng);
    const auto g = random_unit_test_function(*omega.model(), rng);
    const Complex lhs = g.coeffs.dot(M.dense_ * f.coeffs);
    worst = std::max(worst, std::abs(lhs - form_value(omega, theta, m.values(), f.coeffs, g.coeffs)));
  }
  M.build_residual_ = worst;
  return M;
}

double operator_norm(const MultiplierOperator& M) { return spectral_norm(M.dense()); }

NormBoundReport check_norm_bound(const MultiplierOperator& M, const Tolerances& tol) {
  NormBoundReport r;
  r.norm = operator_norm(M);
  DiagnoseOptions opts{tol.bound, tol.rank};
  r.upper_omega = diagnose(M.omega(), opts).upper;
  r.upper_theta = diagnose(M.theta(), opts).upper;
  r.symbol_sup = M.symbol().ess_sup();
  r.bound = std::sqrt(r.upper_omega * r.upper_theta) * r.symbol_sup;
  r.holds = r.norm <= r.bound + tol.residual;
  return r;
}

MultiplierOperator adjoint(const MultiplierOperator& M) {
  return build(M.symbol().conj(), M.theta(), M.omega());
}

bool is_riesz_dual_pair(const DistributionMap& analysis, const DistributionMap& synthesis,
                        const Tolerances& tol) {
  if (!analysis.compatible_with(synthesis)) return false;
  DiagnoseOptions opts{tol.bound, tol.rank};
  if (!diagnose(analysis, opts).satisfies(Classification::RieszBasis)) return false;
  if (!diagnose(synthesis, opts).satisfies(Classification::RieszBasis)) return false;
  const RVector w = analysis.space()->weight_vector();
  const CMatrix cross = synthesis.eval().adjoint() * (w.cast<Complex>().asDiagonal() * analysis.eval());
  const auto k = static_cast<Eigen::Index>(analysis.dim());
  return spectral_norm(cross - CMatrix::Identity(k, k)) <= tol.bound;
}

namespace {

bool same_map(const DistributionMap& a, const DistributionMap& b) {
  return a.compatible_with(b) && a.eval() == b.eval();
}

}  // namespace

CompositionReport compose(const MultiplierOperator& M1, const MultiplierOperator& M2,
                          const Tolerances& tol) {
  if (!same_map(M1.omega(), M2.omega()) || !same_map(M1.theta(), M2.theta()))
    throw MismatchError("compose: both multipliers must use the same pair of maps");
  CompositionReport r;
  r.product = M1.dense() * M2.dense();
  const auto built = build(M1.symbol() * M2.symbol(), M1.omega(), M1.theta());
  r.reference = built.dense();
  r.residual = spectral_norm(r.product - r.reference);
  // (M1 M2)^dagger against M2^dagger M1^dagger, each adjoint built from its symbol.
  const CMatrix adj_product = adjoint(M2).dense() * adjoint(M1).dense();
  r.adjoint_residual = spectral_norm(adjoint(built).dense() - adj_product);
  r.precondition = is_riesz_dual_pair(M1.omega(), M1.theta(), tol);
  r.asserted = r.precondition;
  r.passed = !r.asserted || (r.residual < tol.residual && r.adjoint_residual < tol.residual);
  return r;
}

InverseReport invert(const MultiplierOperator& M, const Tolerances& tol) {
  InverseReport r;
  const auto k = static_cast<Eigen::Index>(M.dim());
  Eigen::BDCSVD<CMatrix> svd(M.dense(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& s = svd.singularValues();
  r.sigma_max = s(0);
  r.sigma_min = s(s.size() - 1);
  r.null_witness = svd.matrixV().col(k - 1);
  const RVector mod = M.symbol().values().cwiseAbs();
  Eigen::Index argmin = 0;
  r.symbol_min_modulus = mod.minCoeff(&argmin);
  r.symbol_min_point = static_cast<long>(argmin);

  r.injective = r.sigma_max > 0.0 && r.sigma_min > tol.rank * r.sigma_max;
  r.inverse_norm = r.injective ? 1.0 / r.sigma_min : std::numeric_limits<double>::infinity();
  if (r.injective) r.inverse = M.dense().partialPivLu().inverse();

  DiagnoseOptions opts{tol.bound, tol.rank};
  const auto dw = diagnose(M.omega(), opts);
  const auto dt = diagnose(M.theta(), opts);
  const Symbol& m = M.symbol();

  r.injectivity_precondition = dw.mu_independent && dt.total && m.nonvanishing();
  if (r.injectivity_precondition) r.injectivity_ok = r.injective;

  r.bound_precondition = dw.satisfies(Classification::RieszBasis) &&
                         dt.satisfies(Classification::RieszBasis) && m.min_modulus() > 0.0;
  if (r.bound_precondition) {
    r.bound_lower = std::sqrt(dt.lower * dw.lower) * m.min_modulus();
    r.bound_ok = r.sigma_min >= r.bound_lower - tol.bound;
  }

  if (r.injective) {
    r.reciprocal_precondition = m.nonvanishing() && is_riesz_dual_pair(M.omega(), M.theta(), tol);
    if (r.reciprocal_precondition) {
      const auto recip = build(m.reciprocal(), M.omega(), M.theta());
      r.reciprocal_residual = spectral_norm(*r.inverse - recip.dense());
      r.reciprocal_ok = r.reciprocal_residual < tol.residual;
    }
    const CMatrix adj = adjoint(M).dense();
    r.adjoint_inverse_residual =
        spectral_norm(r.inverse->adjoint() - CMatrix(adj.partialPivLu().inverse()));
    r.adjoint_inverse_ok = r.adjoint_inverse_residual < tol.residual * std::max(1.0, r.inverse_norm);
  }

  r.discretization_inconsistency =
      !r.injective && (r.injectivity_precondition || r.bound_precondition);
  r.passed = r.injectivity_ok && r.bound_ok && r.reciprocal_ok && r.adjoint_inverse_ok &&
             !r.discretization_inconsistency;
  return r;
}

Reconstruction reconstruction_pair(const MultiplierOperator& M, ReconstructionSide side,
                                   std::size_t trials, std::uint64_t seed, const Tolerances& tol) {
  Eigen::BDCSVD<CMatrix> svd(M.dense());
  const RVector& s = svd.singularValues();
  if (!(s(0) > 0.0) || s(s.size() - 1) <= tol.rank * s(0))
    throw SingularityError("reconstruction_pair: multiplier is not invertible");
  const CMatrix inverse = M.dense().partialPivLu().inverse();
  const CVector& m = M.symbol().values();
  const DistributionMap& omega = M.omega();
  const DistributionMap& theta = M.theta();

  CMatrix eval;
  std::string family;
  if (side == ReconstructionSide::Right) {
    // <f, rho_j> = <J f, conj(m_j) omega_j> = m_j (E_omega J f)_j
    eval = m.asDiagonal() * (omega.eval() * inverse);
    family = "rho";
  } else {
    // tau_j = K (m_j theta_j) as a vector; eval_tau(j, k) = conj(tau_j[k]).
    const CMatrix tau = inverse * (theta.eval().adjoint() * m.asDiagonal());
    eval = tau.adjoint();
    family = "tau";
  }
  Reconstruction out{DistributionMap(omega.space(), omega.model(), std::move(eval), family), 0.0};

  const CVector ones = CVector::Ones(static_cast<Eigen::Index>(omega.points()));
  const DistributionMap& left = side == ReconstructionSide::Right ? out.map : omega;
  const DistributionMap& right = side == ReconstructionSide::Right ? theta : out.map;
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto f = random_unit_test_function(*omega.model(), rng);
    const auto g = random_unit_test_function(*omega.model(), rng);
    const Complex exact = g.coeffs.dot(f.coeffs);
    out.residual =
        std::max(out.residual, std::abs(exact - form_value(left, right, ones, f.coeffs, g.coeffs)));
  }
  return out;
}

std::pair<Symbol, Symbol> split_symbol(const Symbol& m) {
  CVector m1(static_cast<Eigen::Index>(m.size()));
  CVector m2(static_cast<Eigen::Index>(m.size()));
  for (Eigen::Index j = 0; j < m1.size(); ++j) {
    const Complex v = m.values()(j);
    if (std::abs(v) > 1.0) {
      m1(j) = 0.0;
      m2(j) = v;
    } else {
      m1(j) = v + 2.0;
      m2(j) = -2.0;
    }
  }
  return {Symbol(std::move(m1), m.tolerance()), Symbol(std::move(m2), m.tolerance())};
}

DensityReport density_certificate(const DistributionMap& omega, const DistributionMap& theta,
                                  const Symbol& m, const std::vector<TestFunction>& witnesses,
                                  const Tolerances& tol) {
  DensityReport r;
  const auto M = build(m, omega, theta);
  r.upper_theta = diagnose(theta, {tol.bound, tol.rank}).upper;
  r.rank = witness_rank(witnesses, omega.dim(), tol.rank);
  r.total = r.rank == omega.dim();
  if (witnesses.empty()) r.failures.push_back("witness family is empty");
  if (!r.total)
    r.failures.push_back("witness family is not total: rank " + std::to_string(r.rank) + " < " +
                         std::to_string(omega.dim()));

  const SampledMeasureSpace& space = *omega.space();
  bool all = !witnesses.empty();
  for (std::size_t i = 0; i < witnesses.size(); ++i) {
    DensityWitness w;
    w.index = i;
    const CVector a = omega.analysis(witnesses[i]);
    std::vector<std::size_t> support;
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      if (std::abs(a(j)) > tol.support) {
        support.push_back(static_cast<std::size_t>(j));
        w.sup_analysis = std::max(w.sup_analysis, std::abs(a(j)));
        w.support_measure += space.weight(static_cast<std::size_t>(j));
      }
    }
    w.symbol_l2 = l2_norm_on(space, m.values(), support);
    w.bound = w.sup_analysis * std::sqrt(r.upper_theta) * w.symbol_l2;
    w.image_norm = M.apply(witnesses[i]).coeffs.norm();
    w.holds = w.image_norm <= w.bound + tol.residual;
    if (!w.holds) {
      all = false;
      r.failures.push_back("witness " + std::to_string(i) + ": ||M f|| = " +
                           std::to_string(w.image_norm) + " exceeds " + std::to_string(w.bound));
    }
    r.witnesses.push_back(w);
  }
  r.passed = all && r.total;
  return r;
}

double fit_growth_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InsufficientDataError("fit_growth_exponent: need at least two matching samples");
  constexpr double floor = 1e-300;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw DomainError("fit_growth_exponent: abscissae must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(std::max(y[i], floor)));
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw DomainError("fit_growth_exponent: abscissae are all equal");
  return sxy / sxx;
}

std::string to_string(DomainVerdict v) {
  return v == DomainVerdict::Convergent ? "Convergent" : "Divergent";
}

std::vector<double> growth_abscissae(const std::vector<Resolution>& schedule) {
  bool l_grows = true;
  for (std::size_t s = 1; s < schedule.size(); ++s)
    if (!(schedule[s].half_width > schedule[s - 1].half_width)) l_grows = false;
  std::vector<double> x;
  for (const auto& r : schedule)
    x.push_back(l_grows ? r.half_width : static_cast<double>(r.n));
  return x;
}

ClosureProfile closure_domain_profile(const RefinementFamily& family, const MapSymbolBuilder& builder,
                                      const TestFunctionBuilder& f_builder, double threshold) {
  if (family.steps() < 3)
    throw InsufficientDataError("closure_domain_profile: schedule needs at least 3 steps");
  ClosureProfile p;
  p.schedule = family.schedule();
  p.threshold = threshold;
  for (std::size_t s = 0; s < family.steps(); ++s) {
    auto space = std::make_shared<const SampledMeasureSpace>(family.refine(s));
    const auto [omega, m] = builder(s, space);
    if (m.size() != omega.points())
      throw ShapeError("closure_domain_profile: symbol length differs from the map's points");
    const CVector a = omega.analysis(f_builder(s, omega));
    double acc = 0.0;
    for (Eigen::Index j = 0; j < a.size(); ++j)
      acc += omega.space()->weight(static_cast<std::size_t>(j)) * std::norm(m[static_cast<std::size_t>(j)] * a(j));
    p.integrals.push_back(acc);
  }
  p.fitted_exponent = fit_growth_exponent(growth_abscissae(p.schedule), p.integrals);
  p.verdict = p.fitted_exponent > threshold ? DomainVerdict::Divergent : DomainVerdict::Convergent;
  return p;
}

ClosabilityReport closability_check(const DistributionMap& omega, const DistributionMap& theta,
                                    const Symbol& m, const std::vector<TestFunction>& dual_witnesses,
                                    std::size_t trials, std::uint64_t seed, const Tolerances& tol) {
  ClosabilityReport r;
  if (dual_witnesses.empty()) {
    r.failures.push_back("no dual witnesses supplied");
    return r;
  }
  const auto M = build(m, omega, theta);
  const auto Mp = build(m.conj(), theta, omega);
  Rng rng(seed);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto f = random_unit_test_function(*omega.model(), rng);
    for (const auto& g : dual_witnesses) {
      const Complex lhs = g.coeffs.dot(M.dense() * f.coeffs);
      const Complex rhs = (Mp.dense() * g.coeffs).dot(f.coeffs);
      const double scale = std::max(1.0, g.coeffs.norm());
      r.residual = std::max(r.residual, std::abs(lhs - rhs) / scale);
    }
  }
  r.rank = witness_rank(dual_witnesses, omega.dim(), tol.rank);
  r.total = r.rank == omega.dim();
  if (!r.total)
    r.failures.push_back("dual witness family is not total: rank " + std::to_string(r.rank));
  if (r.residual >= tol.residual)
    r.failures.push_back("adjoint pairing residual " + std::to_string(r.residual));
  r.passed = r.total && r.residual < tol.residual;
  return r;
}

}  // namespace dframe
