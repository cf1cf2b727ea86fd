#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dframe/maps.hpp"
#include "dframe/measure.hpp"
#include "dframe/model.hpp"

namespace dframe {

// Complex symbol m on the sample points of X.
class Symbol {
 public:
  explicit Symbol(CVector values, double tol = 1e-12);

  static Symbol constant(const SampledMeasureSpace& space, Complex value);
  static Symbol coordinate(const SampledMeasureSpace& space);
  // lo for x < threshold, hi otherwise.
  static Symbol step(const SampledMeasureSpace& space, double threshold, Complex lo, Complex hi);
  // modulus * e^{i phi_j} with independent uniform phases.
  static Symbol random_phase(const SampledMeasureSpace& space, std::uint64_t seed,
                             double modulus = 1.0);
  // Modulus uniform in [lo, hi] (lo > 0) with random phases: 1/m stays bounded.
  static Symbol reciprocal_safe(const SampledMeasureSpace& space, std::uint64_t seed,
                                double lo = 1.0, double hi = 2.0);

  const CVector& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  Complex operator[](std::size_t j) const { return values_(static_cast<Eigen::Index>(j)); }
  double ess_sup() const noexcept { return ess_sup_; }
  double min_modulus() const noexcept { return min_modulus_; }
  bool nonvanishing() const noexcept { return nonvanishing_; }
  double tolerance() const noexcept { return tol_; }

  Symbol conj() const;
  // Pointwise 1/m; throws SingularityError when m vanishes somewhere.
  Symbol reciprocal() const;
  Symbol operator*(const Symbol& other) const;
  Symbol operator+(const Symbol& other) const;

 private:
  CVector values_;
  double ess_sup_ = 0.0;
  double min_modulus_ = 0.0;
  bool nonvanishing_ = false;
  double tol_;
};

struct Tolerances {
  double residual = 1e-10;  // absolute, on identities
  double bound = 1e-8;      // on bound comparisons
  double rank = 1e-10;      // relative, on rank decisions
  double support = 1e-12;   // analysis magnitudes at or below this are zero
};

// Dense M_{m,omega,theta} = T_theta D_m T_omega^x on D coordinates:
//   dense = E_theta^H diag(w m) E_omega,
// so that <M f, g> = sum_j w_j m_j <f, omega_j> <theta_j, g>.
class MultiplierOperator {
 public:
  // Takes the parts as given; use build() for the checked constructor.
  MultiplierOperator(CMatrix dense, DistributionMap omega, DistributionMap theta, Symbol symbol);

  const CMatrix& dense() const noexcept { return dense_; }
  const DistributionMap& omega() const noexcept { return omega_; }
  const DistributionMap& theta() const noexcept { return theta_; }
  const Symbol& symbol() const noexcept { return symbol_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(dense_.rows()); }

  // Factored form: analysis E_omega, diagonal w m, synthesis E_theta^H.
  const CMatrix& analysis() const noexcept { return omega_.eval(); }
  CVector weighted_symbol() const;
  CMatrix synthesis() const { return theta_.eval().adjoint(); }
  // || dense - synthesis * diag(w m) * analysis ||_2
  double factorization_residual() const;

  TestFunction apply(const TestFunction& f) const;
  // Worst bilinear-form discrepancy seen on the random pairs checked by build().
  double build_residual() const noexcept { return build_residual_; }

 private:
  friend MultiplierOperator build(const Symbol&, const DistributionMap&, const DistributionMap&);
  CMatrix dense_;
  DistributionMap omega_;
  DistributionMap theta_;
  Symbol symbol_;
  double build_residual_ = 0.0;
};

// Throws MismatchError when the maps do not share space and model, and
// ShapeError when the symbol length differs from the number of points.
MultiplierOperator build(const Symbol& m, const DistributionMap& omega,
                         const DistributionMap& theta);

// Largest singular value of the dense array.
double operator_norm(const MultiplierOperator& M);

struct NormBoundReport {
  double norm = 0.0;
  double bound = 0.0;  // sqrt(B_omega B_theta) ||m||_inf
  double upper_omega = 0.0;
  double upper_theta = 0.0;
  double symbol_sup = 0.0;
  bool holds = false;
};

NormBoundReport check_norm_bound(const MultiplierOperator& M, const Tolerances& tol = {});

// build(conj(m), theta, omega).
MultiplierOperator adjoint(const MultiplierOperator& M);

// True when both maps are Riesz bases and E_synthesis^H W E_analysis = I,
// i.e. each is the canonical dual of the other.
bool is_riesz_dual_pair(const DistributionMap& analysis, const DistributionMap& synthesis,
                        const Tolerances& tol = {});

struct CompositionReport {
  CMatrix product;    // dense(M1) dense(M2)
  CMatrix reference;  // dense(build(m1 m2, ...))
  double residual = 0.0;
  double adjoint_residual = 0.0;  // ||(M1 M2)^dagger - M2^dagger M1^dagger|| via built adjoints
  bool precondition = false;      // Riesz dual-pair arrangement shared by M1 and M2
  bool asserted = false;
  bool passed = true;
};

CompositionReport compose(const MultiplierOperator& M1, const MultiplierOperator& M2,
                          const Tolerances& tol = {});

struct InverseReport {
  double sigma_min = 0.0;
  double sigma_max = 0.0;
  bool injective = false;
  double inverse_norm = 0.0;  // infinity when not injective
  std::optional<CMatrix> inverse;
  CVector null_witness;  // right singular vector of sigma_min
  long symbol_min_point = -1;
  double symbol_min_modulus = 0.0;

  bool injectivity_precondition = false;  // omega mu-independent, theta total, m nonvanishing
  bool injectivity_ok = true;
  bool bound_precondition = false;        // both Riesz and |m| >= C > 0
  double bound_lower = 0.0;               // sqrt(A_theta A_omega) C
  bool bound_ok = true;
  bool reciprocal_precondition = false;   // Riesz dual pair and m nonvanishing
  double reciprocal_residual = 0.0;       // ||dense^{-1} - dense(build(1/m, ...))||
  bool reciprocal_ok = true;
  double adjoint_inverse_residual = 0.0;  // ||(M^{-1})^H - dense(adjoint(M))^{-1}||
  bool adjoint_inverse_ok = true;
  bool discretization_inconsistency = false;
  bool passed = true;
};

InverseReport invert(const MultiplierOperator& M, const Tolerances& tol = {});

enum class ReconstructionSide { Left, Right };

struct Reconstruction {
  DistributionMap map;    // rho (Right) or tau (Left)
  double residual = 0.0;  // worst |<f,g> - reconstruction| over unit f, g
};

// Right: rho_j = J^dagger(conj(m_j) omega_j) with J = dense^{-1}, checked
// against <f,g> = sum_j w_j <f, rho_j> <theta_j, g>.
// Left: tau_j = K(m_j theta_j) with K = dense^{-1}, checked against
// <f,g> = sum_j w_j <f, omega_j> <tau_j, g>.
Reconstruction reconstruction_pair(const MultiplierOperator& M, ReconstructionSide side,
                                   std::size_t trials = 100, std::uint64_t seed = 1,
                                   const Tolerances& tol = {});

// m = m1 + m2 with m1 bounded and |m2| >= 1:
// |m| > 1 -> (0, m); |m| <= 1 -> (m + 2, -2).
std::pair<Symbol, Symbol> split_symbol(const Symbol& m);

struct DensityWitness {
  std::size_t index = 0;
  double image_norm = 0.0;      // ||M f||
  double sup_analysis = 0.0;    // C_f
  double symbol_l2 = 0.0;       // ||m||_{L2(X_f)}
  double bound = 0.0;           // C_f sqrt(B_theta) ||m||_{L2(X_f)}
  double support_measure = 0.0;
  bool holds = false;
};

struct DensityReport {
  bool passed = false;
  bool total = false;
  std::size_t rank = 0;
  double upper_theta = 0.0;
  std::vector<DensityWitness> witnesses;
  std::vector<std::string> failures;
};

DensityReport density_certificate(const DistributionMap& omega, const DistributionMap& theta,
                                  const Symbol& m, const std::vector<TestFunction>& witnesses,
                                  const Tolerances& tol = {});

// Least-squares slope of log(y) against log(x).
double fit_growth_exponent(const std::vector<double>& x, const std::vector<double>& y);

// Abscissae for growth fits along a schedule: L when it strictly increases,
// n otherwise.
std::vector<double> growth_abscissae(const std::vector<Resolution>& schedule);

enum class DomainVerdict { Convergent, Divergent };
std::string to_string(DomainVerdict v);

struct ClosureProfile {
  std::vector<Resolution> schedule;
  std::vector<double> integrals;  // I(n) = sum_j w_j |m_j <f, omega_j>|^2
  double fitted_exponent = 0.0;
  double threshold = 0.25;
  DomainVerdict verdict = DomainVerdict::Convergent;
  std::string note = "finite-resolution proxy for membership in the closure domain";
};

using MapSymbolBuilder =
    std::function<std::pair<DistributionMap, Symbol>(std::size_t step, const SpacePtr& space)>;
using TestFunctionBuilder =
    std::function<TestFunction(std::size_t step, const DistributionMap& omega)>;

// Fits I along the schedule against L (or n when L does not grow) and calls
// the f outside the domain when the exponent exceeds `threshold`.
ClosureProfile closure_domain_profile(const RefinementFamily& family, const MapSymbolBuilder& builder,
                                      const TestFunctionBuilder& f_builder,
                                      double threshold = 0.25);

struct ClosabilityReport {
  bool passed = false;
  double residual = 0.0;  // worst |<M f, g> - <f, M' g>|
  bool total = false;
  std::size_t rank = 0;
  std::vector<std::string> failures;
};

ClosabilityReport closability_check(const DistributionMap& omega, const DistributionMap& theta,
                                    const Symbol& m, const std::vector<TestFunction>& dual_witnesses,
                                    std::size_t trials = 100, std::uint64_t seed = 1,
                                    const Tolerances& tol = {});

// Unit-norm random element of D.
TestFunction random_unit_test_function(const ModelSpace& model, Rng& rng);

}  // namespace dframe
