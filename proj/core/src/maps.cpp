#include "dframe/maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dframe/error.hpp"

namespace dframe {

DistributionMap::DistributionMap(std::shared_ptr<const SampledMeasureSpace> space,
                                 std::shared_ptr<const ModelSpace> model, CMatrix eval,
                                 std::string family, std::vector<std::string> warnings)
    : space_(std::move(space)),
      model_(std::move(model)),
      eval_(std::move(eval)),
      family_(std::move(family)),
      warnings_(std::move(warnings)) {
  if (!space_ || !model_) throw DomainError("distribution map: null space or model");
  if (static_cast<std::size_t>(eval_.rows()) != space_->size())
    throw ShapeError("distribution map: eval has " + std::to_string(eval_.rows()) +
                     " rows, space has " + std::to_string(space_->size()) + " points");
  if (static_cast<std::size_t>(eval_.cols()) != model_->dim())
    throw ShapeError("distribution map: eval has " + std::to_string(eval_.cols()) +
                     " columns, D has dimension " + std::to_string(model_->dim()));
  if (!eval_.allFinite()) throw DomainError("distribution map: eval has non-finite entries");
}

CVector DistributionMap::analysis(const TestFunction& f) const {
  if (static_cast<std::size_t>(f.coeffs.size()) != dim())
    throw ShapeError("analysis: expected " + std::to_string(dim()) + " coefficients");
  return eval_ * f.coeffs;
}

bool DistributionMap::compatible_with(const DistributionMap& other) const {
  const bool same_space = space_ == other.space_ || *space_ == *other.space_;
  const bool same_model =
      model_ == other.model_ ||
      (model_->dim() == other.model_->dim() &&
       model_->ambient_dim() == other.model_->ambient_dim() &&
       model_->on_basis() == other.model_->on_basis() &&
       model_->h_gram() == other.model_->h_gram());
  return same_space && same_model;
}

DistributionMap DistributionMap::scaled(Complex factor) const {
  return {space_, model_, factor * eval_, family_, warnings_};
}

namespace {

void require_same_grid(const ModelSpace& model, const SampledMeasureSpace& space,
                       const char* what) {
  if (!(*model.sample_space() == space))
    throw MismatchError(std::string(what) + ": model and measure space use different grids");
}

}  // namespace

DistributionMap delta_frame(const ModelPtr& model, const SpacePtr& space) {
  require_same_grid(*model, *space, "delta_frame");
  return {space, model, model->on_basis(), "delta"};
}

DistributionMap exponential_frame(const ModelPtr& model, const SpacePtr& space) {
  if (!space->is_periodic_unit_grid())
    throw UnsupportedSpaceError("exponential_frame requires a uniform periodic grid");
  require_same_grid(*model, *space, "exponential_frame");
  const CMatrix& q = model->on_basis();
  CMatrix eval(q.rows(), q.cols());
  for (Eigen::Index k = 0; k < q.cols(); ++k) eval.col(k) = dft(*space, q.col(k));
  return {space, model, std::move(eval), "exponential"};
}

DistributionMap weighted_delta_frame(const ModelPtr& model, const SpacePtr& space,
                                     const std::function<Complex(double)>& weight) {
  require_same_grid(*model, *space, "weighted_delta_frame");
  CMatrix eval = model->on_basis();
  for (Eigen::Index j = 0; j < eval.rows(); ++j)
    eval.row(j) *= weight(space->point(static_cast<std::size_t>(j)));
  return {space, model, std::move(eval), "weighted_delta"};
}

namespace {

CMatrix eval_from_elements(const ModelSpace& model, const std::vector<CVector>& elements) {
  const CMatrix& q = model.on_basis();
  const CMatrix gq = model.h_gram() * q;
  CMatrix eval(static_cast<Eigen::Index>(elements.size()), q.cols());
  for (std::size_t j = 0; j < elements.size(); ++j) {
    if (static_cast<std::size_t>(elements[j].size()) != model.ambient_dim())
      throw ShapeError("element " + std::to_string(j) + " has " +
                       std::to_string(elements[j].size()) + " samples, H has dimension " +
                       std::to_string(model.ambient_dim()));
    // eval(j, k) = <e_k, h_j> = h_j^H G e_k
    eval.row(static_cast<Eigen::Index>(j)) = elements[j].adjoint() * gq;
  }
  return eval;
}

// Length of the shortest circular arc of the grid that covers every nonzero
// sample.
std::size_t circular_support_width(const CVector& window) {
  const auto n = static_cast<std::size_t>(window.size());
  std::size_t nonzero = 0;
  for (Eigen::Index i = 0; i < window.size(); ++i)
    if (window(i) != Complex(0.0)) ++nonzero;
  if (nonzero == 0) return 0;
  if (nonzero == n) return n;
  std::size_t longest_gap = 0;
  std::size_t run = 0;
  for (std::size_t t = 0; t < 2 * n; ++t) {
    if (window(static_cast<Eigen::Index>(t % n)) == Complex(0.0)) {
      longest_gap = std::max(longest_gap, std::min(++run, n));
    } else {
      run = 0;
    }
  }
  return n - longest_gap;
}

}  // namespace

DistributionMap translated_window_frame(const ModelPtr& model, const SpacePtr& space,
                                        const CVector& window) {
  require_same_grid(*model, *space, "translated_window_frame");
  const auto n = static_cast<Eigen::Index>(space->size());
  if (window.size() != n)
    throw ShapeError("translated_window_frame: window has " + std::to_string(window.size()) +
                     " samples, grid has " + std::to_string(n));
  std::vector<CVector> translates(static_cast<std::size_t>(n), CVector(n));
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      translates[static_cast<std::size_t>(j)](i) = window(((i - j) % n + n) % n);

  std::vector<std::string> warnings;
  const std::size_t width = circular_support_width(window);
  if (2 * width > static_cast<std::size_t>(n))
    warnings.push_back("window support (" + std::to_string(width) + " of " + std::to_string(n) +
                       " points) exceeds half the domain; pseudo-orthogonality may fail");
  return {space, model, eval_from_elements(*model, translates), "translated_window",
          std::move(warnings)};
}

DistributionMap map_from_h_elements(const ModelPtr& model, const SpacePtr& space,
                                    const std::vector<CVector>& elements) {
  if (elements.size() != space->size())
    throw ShapeError("map_from_h_elements: " + std::to_string(elements.size()) +
                     " elements for " + std::to_string(space->size()) + " points");
  return {space, model, eval_from_elements(*model, elements), "h_elements"};
}

DistributionMap discrete_sequence_map(const std::vector<CVector>& vectors) {
  if (vectors.empty()) throw ShapeError("discrete_sequence_map: empty family");
  const auto dim = static_cast<std::size_t>(vectors.front().size());
  if (dim == 0) throw ShapeError("discrete_sequence_map: vectors have length 0");
  for (std::size_t j = 0; j < vectors.size(); ++j)
    if (static_cast<std::size_t>(vectors[j].size()) != dim)
      throw ShapeError("discrete_sequence_map: vector " + std::to_string(j) + " has length " +
                       std::to_string(vectors[j].size()) + ", expected " + std::to_string(dim));
  auto space = std::make_shared<const SampledMeasureSpace>(
      SampledMeasureSpace::counting(vectors.size()));
  auto h_space = std::make_shared<const SampledMeasureSpace>(SampledMeasureSpace::counting(dim));
  auto model = std::make_shared<const ModelSpace>(make_model(h_space, RawSamples{}));
  return {space, model, eval_from_elements(*model, vectors), "discrete"};
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::NotBessel: return "NotBessel";
    case Classification::Bessel: return "Bessel";
    case Classification::BoundedBessel: return "BoundedBessel";
    case Classification::Frame: return "Frame";
    case Classification::Tight: return "Tight";
    case Classification::Parseval: return "Parseval";
    case Classification::RieszBasis: return "RieszBasis";
    case Classification::GelfandBasis: return "GelfandBasis";
  }
  return "unknown";
}

bool FrameDiagnostics::satisfies(Classification c) const {
  const bool finite = classification != Classification::NotBessel;
  switch (c) {
    case Classification::NotBessel: return !finite;
    case Classification::Bessel:
    case Classification::BoundedBessel: return finite;
    case Classification::Frame: return finite && total;
    case Classification::Tight: return finite && tight;
    case Classification::Parseval: return finite && parseval;
    case Classification::RieszBasis: return finite && total && mu_independent;
    case Classification::GelfandBasis: return finite && total && mu_independent && parseval;
  }
  return false;
}

CMatrix frame_operator(const DistributionMap& omega) {
  const RVector w = omega.space()->weight_vector();
  const CMatrix weighted = w.cast<Complex>().asDiagonal() * omega.eval();
  CMatrix s = omega.eval().adjoint() * weighted;
  // Symmetrize away rounding so the eigen solver sees an exact Hermitian.
  return 0.5 * (s + s.adjoint());
}

FrameDiagnostics diagnose(const DistributionMap& omega, const DiagnoseOptions& options) {
  FrameDiagnostics d;
  d.tolerance = options.bound_tol;
  d.rank_tolerance = options.rank_tol;
  d.warnings = omega.warnings();

  const auto j = static_cast<Eigen::Index>(omega.points());
  const auto k = static_cast<Eigen::Index>(omega.dim());
  if (!omega.eval().allFinite()) {
    d.classification = Classification::NotBessel;
    d.upper = std::numeric_limits<double>::infinity();
    return d;
  }
  if (j == 0 || k == 0) return d;

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(frame_operator(omega), Eigen::EigenvaluesOnly);
  const RVector& lambda = eig.eigenvalues();
  d.upper = std::max(0.0, lambda(lambda.size() - 1));
  d.lower = std::clamp(lambda(0), 0.0, d.upper);

  const RVector sqrt_w = omega.space()->weight_vector().cwiseSqrt();
  const CMatrix whitened = sqrt_w.cast<Complex>().asDiagonal() * omega.eval();
  Eigen::BDCSVD<CMatrix> svd(whitened);
  const RVector& sigma = svd.singularValues();
  d.synthesis_sigma_max = sigma(0);
  d.synthesis_sigma_min = sigma(sigma.size() - 1);

  d.total = d.upper > 0.0 && d.lower > options.rank_tol * d.upper;
  d.mu_independent = j <= k && d.synthesis_sigma_max > 0.0 &&
                     d.synthesis_sigma_min > options.rank_tol * d.synthesis_sigma_max;
  d.tight = d.total && std::abs(d.upper - d.lower) <= options.bound_tol * d.upper;
  d.parseval = std::max(std::abs(d.lower - 1.0), std::abs(d.upper - 1.0)) <= options.bound_tol;

  if (d.upper == 0.0) {
    d.classification = Classification::Bessel;
  } else if (!d.total) {
    d.classification = Classification::BoundedBessel;
  } else if (d.mu_independent) {
    d.classification = d.parseval ? Classification::GelfandBasis : Classification::RieszBasis;
  } else if (d.parseval) {
    d.classification = Classification::Parseval;
  } else if (d.tight) {
    d.classification = Classification::Tight;
  } else {
    d.classification = Classification::Frame;
  }
  return d;
}

DistributionMap canonical_dual(const DistributionMap& omega, const DiagnoseOptions& options) {
  const auto diag = diagnose(omega, options);
  if (!diag.total)
    throw SingularityError("canonical_dual: map is not a frame (A = " +
                           std::to_string(diag.lower) + ", B = " + std::to_string(diag.upper) +
                           ")");
  const CMatrix s = frame_operator(omega);
  // eval_theta = E S^{-1} = (S^{-1} E^H)^H since S is Hermitian.
  const CMatrix solved = s.llt().solve(omega.eval().adjoint());
  return {omega.space(), omega.model(), solved.adjoint(), "canonical_dual(" + omega.family() + ")",
          omega.warnings()};
}

RieszTransition riesz_transition(const DistributionMap& omega, const DistributionMap& zeta,
                                 const DiagnoseOptions& options) {
  if (!omega.compatible_with(zeta))
    throw MismatchError("riesz_transition: maps live on different spaces or models");
  const auto zd = diagnose(zeta, options);
  if (!zd.satisfies(Classification::GelfandBasis))
    throw PreconditionError("riesz_transition: reference map is not a Gel'fand basis (" +
                            to_string(zd.classification) + ")");
  const RVector w = omega.space()->weight_vector();
  RieszTransition out;
  out.transition = omega.eval().adjoint() * (w.cast<Complex>().asDiagonal() * zeta.eval());

  Eigen::BDCSVD<CMatrix> svd(out.transition);
  const RVector& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  out.invertible = smax > 0.0 && smin > options.rank_tol * smax;
  out.condition = out.invertible ? smax / smin : std::numeric_limits<double>::infinity();
  out.omega_riesz = diagnose(omega, options).satisfies(Classification::RieszBasis);
  out.agrees = out.invertible == out.omega_riesz;
  return out;
}

std::size_t witness_rank(const std::vector<TestFunction>& witnesses, std::size_t dim,
                         double rank_tol) {
  if (witnesses.empty() || dim == 0) return 0;
  CMatrix v(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(witnesses.size()));
  for (std::size_t i = 0; i < witnesses.size(); ++i) {
    if (static_cast<std::size_t>(witnesses[i].coeffs.size()) != dim)
      throw ShapeError("witness " + std::to_string(i) + " has the wrong number of coefficients");
    v.col(static_cast<Eigen::Index>(i)) = witnesses[i].coeffs;
  }
  Eigen::BDCSVD<CMatrix> svd(v);
  const RVector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rank_tol * s(0)) ++rank;
  return rank;
}

namespace {

SupportWitness inspect_support(const DistributionMap& omega, const TestFunction& f,
                               std::size_t index, const OrthogonalityOptions& options) {
  const SampledMeasureSpace& space = *omega.space();
  const CVector a = omega.analysis(f);
  SupportWitness w;
  w.index = index;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    const double mag = std::abs(a(j));
    if (mag > options.support_tol) {
      w.support.push_back(static_cast<std::size_t>(j));
      w.support_measure += space.weight(static_cast<std::size_t>(j));
      w.sup_on_support = std::max(w.sup_on_support, mag);
    } else {
      w.max_off_support = std::max(w.max_off_support, mag);
    }
  }
  const double total = space.total_measure();
  w.support_fraction = total > 0.0 ? w.support_measure / total : 0.0;
  w.proper_support = (1.0 - w.support_fraction) > options.min_excluded_fraction &&
                     w.support.size() < space.size();
  w.passed = w.proper_support && std::isfinite(w.sup_on_support);
  return w;
}

void finish_report(OrthogonalityReport& report, const std::vector<TestFunction>& witnesses,
                   std::size_t dim, const OrthogonalityOptions& options) {
  report.required_rank = dim;
  report.rank = witness_rank(witnesses, dim, options.rank_tol);
  report.total = report.rank == dim;
  if (!report.total)
    report.failures.push_back("witness family is not total: rank " + std::to_string(report.rank) +
                              " < " + std::to_string(dim));
  bool all = !witnesses.empty();
  for (const auto& w : report.witnesses) {
    if (w.passed) continue;
    all = false;
    if (!w.proper_support)
      report.failures.push_back("witness " + std::to_string(w.index) +
                                ": support is not a proper subset (fraction " +
                                std::to_string(w.support_fraction) + ")");
    if (!w.within_alpha)
      report.failures.push_back("witness " + std::to_string(w.index) + ": |<f, omega_x>| = " +
                                std::to_string(w.alpha_violation_value) + " exceeds alpha at point " +
                                std::to_string(w.alpha_violation_point));
  }
  report.passed = all && report.total;
}

}  // namespace

OrthogonalityReport check_pseudo_orthogonal(const DistributionMap& omega,
                                            const std::vector<TestFunction>& witnesses,
                                            const OrthogonalityOptions& options) {
  OrthogonalityReport report;
  if (witnesses.empty()) report.failures.push_back("witness family is empty");
  for (std::size_t i = 0; i < witnesses.size(); ++i)
    report.witnesses.push_back(inspect_support(omega, witnesses[i], i, options));
  finish_report(report, witnesses, omega.dim(), options);
  return report;
}

OrthogonalityReport check_hyper_orthogonal(const DistributionMap& omega, const RVector& alpha,
                                           const WitnessBuilder& builder,
                                           const OrthogonalityOptions& options) {
  if (static_cast<std::size_t>(alpha.size()) != omega.points())
    throw ShapeError("check_hyper_orthogonal: alpha has the wrong length");
  for (Eigen::Index j = 0; j < alpha.size(); ++j)
    if (!(alpha(j) > 0.0) || !std::isfinite(alpha(j)))
      throw PreconditionError("check_hyper_orthogonal: alpha must be finite and positive (point " +
                              std::to_string(j) + ")");

  const auto witnesses = builder(alpha);
  OrthogonalityReport report;
  if (witnesses.empty()) report.failures.push_back("V_alpha builder returned no witnesses");
  for (std::size_t i = 0; i < witnesses.size(); ++i) {
    auto w = inspect_support(omega, witnesses[i], i, options);
    const CVector a = omega.analysis(witnesses[i]);
    double worst = 0.0;
    for (std::size_t j : w.support) {
      const auto jj = static_cast<Eigen::Index>(j);
      const double excess = std::abs(a(jj)) - alpha(jj) * (1.0 + 1e-12);
      if (excess > worst) {
        worst = excess;
        w.within_alpha = false;
        w.alpha_violation_point = static_cast<long>(j);
        w.alpha_violation_value = std::abs(a(jj));
      }
    }
    w.passed = w.passed && w.within_alpha;
    report.witnesses.push_back(std::move(w));
  }
  finish_report(report, witnesses, omega.dim(), options);
  return report;
}

namespace {

std::vector<std::pair<std::size_t, double>> bump_profile(std::size_t center, std::size_t n,
                                                         std::size_t half_width) {
  std::vector<std::pair<std::size_t, double>> out;
  const double sigma = static_cast<double>(half_width) / 3.0;
  const long lo = static_cast<long>(center) - static_cast<long>(half_width);
  const long hi = static_cast<long>(center) + static_cast<long>(half_width);
  for (long i = std::max(0L, lo); i <= std::min(static_cast<long>(n) - 1, hi); ++i) {
    const double s = static_cast<double>(i - static_cast<long>(center));
    const double v = half_width == 0 ? 1.0 : std::exp(-0.5 * s * s / (sigma * sigma));
    out.emplace_back(static_cast<std::size_t>(i), v);
  }
  return out;
}

std::vector<TestFunction> bumps_impl(const ModelSpace& model, std::size_t half_width,
                                     const RVector* alpha, bool transform) {
  const std::size_t n = model.ambient_dim();
  if (alpha && static_cast<std::size_t>(alpha->size()) != n)
    throw ShapeError("witness builder: alpha has the wrong length");
  std::vector<TestFunction> out;
  out.reserve(n);
  for (std::size_t c = 0; c < n; ++c) {
    const auto profile = bump_profile(c, n, half_width);
    double height = 1.0;
    if (alpha) {
      height = std::numeric_limits<double>::infinity();
      for (const auto& [i, v] : profile) height = std::min(height, (*alpha)(static_cast<Eigen::Index>(i)));
    }
    CVector samples = CVector::Zero(static_cast<Eigen::Index>(n));
    for (const auto& [i, v] : profile) samples(static_cast<Eigen::Index>(i)) = height * v;
    if (transform) samples = idft(model, samples);
    out.push_back(model.project(samples));
  }
  return out;
}

}  // namespace

std::vector<TestFunction> bump_witnesses(const ModelSpace& model, std::size_t half_width) {
  return bumps_impl(model, half_width, nullptr, false);
}

std::vector<TestFunction> scaled_bump_witnesses(const ModelSpace& model, const RVector& alpha,
                                                std::size_t half_width) {
  return bumps_impl(model, half_width, &alpha, false);
}

std::vector<TestFunction> band_limited_witnesses(const ModelSpace& model, std::size_t half_width,
                                                 const RVector* alpha) {
  return bumps_impl(model, half_width, alpha, true);
}

std::vector<TestFunction> indicator_witnesses(const ModelSpace& model, const RVector& alpha,
                                              std::size_t width) {
  const std::size_t n = model.ambient_dim();
  if (static_cast<std::size_t>(alpha.size()) != n)
    throw ShapeError("indicator_witnesses: alpha has the wrong length");
  if (width == 0) throw DomainError("indicator_witnesses: width must be positive");
  std::vector<TestFunction> out;
  out.reserve(n);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t end = std::min(n, c + width);
    double height = std::numeric_limits<double>::infinity();
    for (std::size_t i = c; i < end; ++i) height = std::min(height, alpha(static_cast<Eigen::Index>(i)));
    CVector samples = CVector::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t i = c; i < end; ++i) samples(static_cast<Eigen::Index>(i)) = height;
    out.push_back(model.project(samples));
  }
  return out;
}

}  // namespace dframe
