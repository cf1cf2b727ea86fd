#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dframe/measure.hpp"
#include "dframe/model.hpp"
#include "dframe/types.hpp"

namespace dframe {

// Weakly measurable map x -> omega_x in D^x, stored as the evaluation table
// eval(j, k) = <e_k, omega_{x_j}> over the orthonormal basis of D.
// The analysis of f in D at x_j is then (eval * f.coeffs)_j.
class DistributionMap {
 public:
  DistributionMap(std::shared_ptr<const SampledMeasureSpace> space,
                  std::shared_ptr<const ModelSpace> model, CMatrix eval,
                  std::string family = "custom", std::vector<std::string> warnings = {});

  const std::shared_ptr<const SampledMeasureSpace>& space() const noexcept { return space_; }
  const std::shared_ptr<const ModelSpace>& model() const noexcept { return model_; }
  const CMatrix& eval() const noexcept { return eval_; }
  const std::string& family() const noexcept { return family_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  std::size_t points() const noexcept { return static_cast<std::size_t>(eval_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(eval_.cols()); }

  // x_j -> <f, omega_{x_j}>
  CVector analysis(const TestFunction& f) const;
  // Same space (by value) and same model, so the two maps can be combined.
  bool compatible_with(const DistributionMap& other) const;

  DistributionMap scaled(Complex factor) const;

 private:
  std::shared_ptr<const SampledMeasureSpace> space_;
  std::shared_ptr<const ModelSpace> model_;
  CMatrix eval_;
  std::string family_;
  std::vector<std::string> warnings_;
};

using SpacePtr = std::shared_ptr<const SampledMeasureSpace>;
using ModelPtr = std::shared_ptr<const ModelSpace>;

// <f, delta_x> = f(x).
DistributionMap delta_frame(const ModelPtr& model, const SpacePtr& space);

// Exponential map with analysis <f, theta_{x_k}> = dft(f)_k, i.e. the
// Fourier transform f^(gamma) = int f(x) e^{-2 pi i gamma x} dx of the
// sampled f. Requires a periodic grid shared with the model.
DistributionMap exponential_frame(const ModelPtr& model, const SpacePtr& space);

// eval(j, k) = weight(x_j) * e_k(x_j); weight(x) = x gives omega_x = x delta_x.
DistributionMap weighted_delta_frame(const ModelPtr& model, const SpacePtr& space,
                                     const std::function<Complex(double)>& weight);

// omega_{x_j}(t_i) = window((i - j) mod N): circular translates of a window
// given by its samples relative to the first grid point. Flags a warning
// when the window occupies more than half the grid.
DistributionMap translated_window_frame(const ModelPtr& model, const SpacePtr& space,
                                        const CVector& window);

// omega_j = h_j for elements of H given by raw samples on the model grid.
DistributionMap map_from_h_elements(const ModelPtr& model, const SpacePtr& space,
                                    const std::vector<CVector>& elements);

// Discrete family {phi_j} in C^K on counting measure with the standard basis
// as D = H.
DistributionMap discrete_sequence_map(const std::vector<CVector>& vectors);

enum class Classification {
  NotBessel,
  Bessel,
  BoundedBessel,
  Frame,
  Tight,
  Parseval,
  RieszBasis,
  GelfandBasis,
};

std::string to_string(Classification c);

struct DiagnoseOptions {
  double bound_tol = 1e-8;  // relative; Parseval/tight tests
  double rank_tol = 1e-10;  // relative; totality and mu-independence
};

struct FrameDiagnostics {
  double upper = 0.0;  // B = lambda_max(E^H W E)
  double lower = 0.0;  // A = lambda_min(E^H W E)
  double synthesis_sigma_min = 0.0;
  double synthesis_sigma_max = 0.0;
  bool mu_independent = false;
  bool total = false;
  bool tight = false;
  bool parseval = false;
  Classification classification = Classification::Bessel;
  double tolerance = 1e-8;
  double rank_tolerance = 1e-10;
  std::vector<std::string> warnings;

  // The label is the most specific class; a Gel'fand basis also satisfies
  // RieszBasis, Parseval, Tight, Frame and the Bessel classes.
  bool satisfies(Classification c) const;
};

FrameDiagnostics diagnose(const DistributionMap& omega, const DiagnoseOptions& options = {});

// Frame operator S = E^H W E in D coordinates.
CMatrix frame_operator(const DistributionMap& omega);

// theta_x = R^x omega_x with R = S^{-1}: eval_theta = eval_omega * S^{-1}.
// Throws SingularityError unless omega is a frame.
DistributionMap canonical_dual(const DistributionMap& omega, const DiagnoseOptions& options = {});

struct RieszTransition {
  CMatrix transition;     // W f = sum_j w_j <f, zeta_j> omega_j
  double condition = 0.0; // sigma_max / sigma_min (infinite when singular)
  bool invertible = false;
  bool omega_riesz = false;
  bool agrees = false;    // invertible == omega_riesz
};

// Throws PreconditionError unless zeta is a Gel'fand basis.
RieszTransition riesz_transition(const DistributionMap& omega, const DistributionMap& zeta,
                                 const DiagnoseOptions& options = {});

// -- pseudo / hyper orthogonality --------------------------------------------

struct OrthogonalityOptions {
  double support_tol = 1e-12;
  // X_f passes when the measure outside it exceeds this fraction of mu(X);
  // the default 0 only asks for a proper subset.
  double min_excluded_fraction = 0.0;
  double rank_tol = 1e-10;
};

struct SupportWitness {
  std::size_t index = 0;
  std::vector<std::size_t> support;  // X_f
  double support_measure = 0.0;      // mu(X_f)
  double support_fraction = 0.0;     // mu(X_f) / mu(X)
  double sup_on_support = 0.0;
  double max_off_support = 0.0;
  bool proper_support = false;
  bool within_alpha = true;          // hyper check only
  long alpha_violation_point = -1;
  double alpha_violation_value = 0.0;
  bool passed = false;
};

struct OrthogonalityReport {
  bool passed = false;
  bool total = false;
  std::size_t rank = 0;
  std::size_t required_rank = 0;
  std::vector<SupportWitness> witnesses;
  std::vector<std::string> failures;
};

// Certifies pseudo-orthogonality with the candidate family V.
OrthogonalityReport check_pseudo_orthogonal(const DistributionMap& omega,
                                            const std::vector<TestFunction>& witnesses,
                                            const OrthogonalityOptions& options = {});

using WitnessBuilder = std::function<std::vector<TestFunction>(const RVector& alpha)>;

// Certifies the hyper-orthogonality condition for one positive alpha with the
// family V_alpha produced by `builder`.
OrthogonalityReport check_hyper_orthogonal(const DistributionMap& omega, const RVector& alpha,
                                           const WitnessBuilder& builder,
                                           const OrthogonalityOptions& options = {});

// Rank of the coefficient array of V (columns = witnesses) against dim(D).
std::size_t witness_rank(const std::vector<TestFunction>& witnesses, std::size_t dim,
                         double rank_tol = 1e-10);

// -- builtin witness families over the model grid ----------------------------
// Each returns one element of D per grid point, built from raw samples and
// projected onto D (exact when D contains the samples, e.g. RawSamples).

// exp(-s^2 / (2 (r/3)^2)) for |s| <= r grid steps around each point, clipped
// at the ends of the grid (no wrap-around).
std::vector<TestFunction> bump_witnesses(const ModelSpace& model, std::size_t half_width);

// bump_witnesses with each bump scaled by min(alpha) over its support, so
// |f| <= alpha pointwise.
std::vector<TestFunction> scaled_bump_witnesses(const ModelSpace& model, const RVector& alpha,
                                                std::size_t half_width);

// (min_I alpha) * indicator(I) for I = {c, ..., c + width - 1} clipped at the
// end of the grid: the step-function family used to show V_alpha is total.
std::vector<TestFunction> indicator_witnesses(const ModelSpace& model, const RVector& alpha,
                                              std::size_t width);

// idft of bump_witnesses samples: f with compactly supported transform.
// When alpha is given the transform is scaled under alpha.
std::vector<TestFunction> band_limited_witnesses(const ModelSpace& model, std::size_t half_width,
                                                 const RVector* alpha = nullptr);

}  // namespace dframe
