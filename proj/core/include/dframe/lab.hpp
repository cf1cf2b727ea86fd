#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dframe/maps.hpp"
#include "dframe/multiplier.hpp"

namespace dframe {

// Worst |<M f, g> - sum_j w_j m_j <f, omega_j> <theta_j, g>| over random unit
// f, g. Both sides are plain loops over the stored tables.
double brute_force_pairing(const MultiplierOperator& M, std::size_t trials, std::uint64_t seed);

// sum_j w_j conj(E(j, :))^T E(j, :) by explicit loops.
CMatrix brute_force_frame_operator(const DistributionMap& omega);

// dense(k, l) = sum_j conj(E_theta(j, k)) w_j m_j E_omega(j, l) by explicit loops.
CMatrix brute_force_multiplier(const Symbol& m, const DistributionMap& omega,
                               const DistributionMap& theta);

// Worst |<f, g> - sum_j w_j <f, theta_j> <omega_j, g>| over random unit f, g.
double brute_force_duality(const DistributionMap& omega, const DistributionMap& theta,
                           std::size_t trials, std::uint64_t seed);

struct IdentityAudit {
  double dense_residual = 0.0;     // build() against the loop-built array
  double pairing_residual = 0.0;
  double frame_operator_omega = 0.0;
  double frame_operator_theta = 0.0;
  double adjoint_residual = 0.0;   // adjoint() against the conjugate transpose
  bool passed = false;
};

// Re-verifies build, the defining pairing, frame operators and the adjoint
// through the loop paths above. Fails on any disagreement above `tol`.
IdentityAudit audit_multiplier(const MultiplierOperator& M, std::size_t trials, std::uint64_t seed,
                               double tol = 1e-10);

struct DiscreteComparison {
  double classical_lower = 0.0;
  double classical_upper = 0.0;
  bool classical_total = false;
  double maps_lower = 0.0;
  double maps_upper = 0.0;
  bool maps_total = false;
  double lower_difference = 0.0;
  double upper_difference = 0.0;
  bool agree = false;
};

// Classical frame bounds of Phi from the eigenvalues of sum phi phi^H
// against diagnose(discrete_sequence_map(Phi)), to 1e-14 relative.
DiscreteComparison discrete_reduction_oracle(const std::vector<CVector>& phi);

enum class SignConvention { Negative, Positive };
std::string to_string(SignConvention c);

struct QuartetMember {
  std::string name;              // e.g. "M_{m,theta,omega}"
  std::string expected;          // the oracle formula
  double residual = 0.0;         // against the negative-sign oracle
  double alternate_residual = 0.0;
  bool passed = false;
  std::optional<SignConvention> passes_under;
};

struct QuartetReport {
  std::size_t n = 0;
  SignConvention convention = SignConvention::Negative;
  std::array<QuartetMember, 4> members;
  double tolerance = 1e-10;
  bool passed = false;
  std::vector<std::string> failures;
};

// Builds the four multipliers from the delta and exponential frames on the
// periodic grid of size n (raw-sample model) and compares each with a
// direct-summation oracle: pointwise product, transform-then-multiply and
// circular convolution.
QuartetReport fourier_quartet_check(std::size_t n, const Symbol& m, std::size_t trials = 4,
                                    std::uint64_t seed = 1, double tol = 1e-10);

enum class SweepVerdict { Bounded, Unbounded };
std::string to_string(SweepVerdict v);

struct SweepOptions {
  double threshold = 0.25;
  // When set, asserts norm >= linear_floor * L at every step.
  std::optional<double> linear_floor;
};

struct SweepResult {
  std::vector<Resolution> schedule;
  std::vector<double> norms;
  double fitted_growth = 0.0;
  double threshold = 0.25;
  SweepVerdict verdict = SweepVerdict::Bounded;
  bool floor_checked = false;
  bool floor_ok = true;
  std::vector<std::string> failures;
  bool passed = true;
};

using MultiplierBuilder = std::function<MultiplierOperator(std::size_t step, const SpacePtr& space)>;

SweepResult unboundedness_sweep(const RefinementFamily& family, const MultiplierBuilder& builder,
                                const SweepOptions& options = {});

// omega_x = x delta_x, theta = delta, m = 1 on the raw-sample model.
MultiplierBuilder weighted_delta_builder();
// omega = theta = delta with m(x) = x; the same operator as above.
MultiplierBuilder coordinate_symbol_builder();
// omega = theta = delta with a unimodular random-phase symbol.
MultiplierBuilder bounded_symbol_builder(std::uint64_t seed);

}  // namespace dframe
