#include "dframe/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dframe/error.hpp"

namespace dframe {

std::string to_string(MeasureKind kind) {
  return kind == MeasureKind::Atomic ? "atomic" : "quadrature";
}

std::string to_string(GridLayout layout) {
  switch (layout) {
    case GridLayout::Periodic: return "periodic";
    case GridLayout::Symmetric: return "symmetric";
    case GridLayout::Irregular: break;
  }
  return "irregular";
}

SampledMeasureSpace::SampledMeasureSpace(std::vector<double> points,
                                         std::vector<double> weights,
                                         MeasureKind kind, double domain_extent,
                                         GridLayout layout)
    : points_(std::move(points)),
      weights_(std::move(weights)),
      kind_(kind),
      extent_(domain_extent),
      layout_(layout) {
  if (points_.size() != weights_.size())
    throw ShapeError("measure space: " + std::to_string(points_.size()) +
                     " points but " + std::to_string(weights_.size()) + " weights");
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    if (!(weights_[j] > 0.0) || !std::isfinite(weights_[j]))
      throw DomainError("measure space: weight " + std::to_string(j) +
                        " must be finite and strictly positive");
    if (!std::isfinite(points_[j]))
      throw DomainError("measure space: point " + std::to_string(j) + " is not finite");
  }
  std::vector<double> sorted = points_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw DomainError("measure space: points must be pairwise distinct");
  if (!std::isfinite(extent_) || extent_ < 0.0)
    throw DomainError("measure space: domain extent must be finite and >= 0");
}

SampledMeasureSpace SampledMeasureSpace::counting(std::size_t n) {
  std::vector<double> pts(n);
  std::iota(pts.begin(), pts.end(), 0.0);
  return {std::move(pts), std::vector<double>(n, 1.0), MeasureKind::Atomic,
          static_cast<double>(n), GridLayout::Irregular};
}

SampledMeasureSpace SampledMeasureSpace::periodic_unit(std::size_t n) {
  if (n == 0) throw DomainError("periodic grid needs at least one point");
  std::vector<double> pts(n);
  for (std::size_t j = 0; j < n; ++j) pts[j] = static_cast<double>(j) / static_cast<double>(n);
  return {std::move(pts), std::vector<double>(n, 1.0 / static_cast<double>(n)),
          MeasureKind::Quadrature, 0.5, GridLayout::Periodic};
}

SampledMeasureSpace SampledMeasureSpace::symmetric(std::size_t n, double half_width) {
  if (n < 2) throw DomainError("symmetric grid needs at least two points");
  if (!(half_width > 0.0)) throw DomainError("symmetric grid needs L > 0");
  const double h = 2.0 * half_width / static_cast<double>(n - 1);
  std::vector<double> pts(n);
  for (std::size_t j = 0; j < n; ++j) pts[j] = -half_width + h * static_cast<double>(j);
  // Pin the endpoints and the centre so the grid is exactly symmetric.
  pts.front() = -half_width;
  pts.back() = half_width;
  if (n % 2 == 1) pts[n / 2] = 0.0;
  return {std::move(pts), std::vector<double>(n, h), MeasureKind::Quadrature,
          half_width, GridLayout::Symmetric};
}

double SampledMeasureSpace::total_measure() const noexcept {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

RVector SampledMeasureSpace::weight_vector() const {
  RVector w(static_cast<Eigen::Index>(weights_.size()));
  for (std::size_t j = 0; j < weights_.size(); ++j) w(static_cast<Eigen::Index>(j)) = weights_[j];
  return w;
}

bool SampledMeasureSpace::is_periodic_unit_grid() const {
  const std::size_t n = size();
  if (n == 0) return false;
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (std::abs(points_[j] - static_cast<double>(j) * inv) > 1e-12) return false;
    if (std::abs(weights_[j] - inv) > 1e-12 * inv) return false;
  }
  return true;
}

namespace {

void check_length(const SampledMeasureSpace& space, const CVector& v, const char* what) {
  if (static_cast<std::size_t>(v.size()) != space.size())
    throw ShapeError(std::string(what) + ": function has " + std::to_string(v.size()) +
                     " samples, space has " + std::to_string(space.size()) + " points");
}

}  // namespace

Complex l2_inner(const SampledMeasureSpace& space, const CVector& xi, const CVector& eta) {
  check_length(space, xi, "l2_inner");
  check_length(space, eta, "l2_inner");
  Complex acc = 0.0;
  for (std::size_t j = 0; j < space.size(); ++j) {
    const auto i = static_cast<Eigen::Index>(j);
    acc += space.weight(j) * xi(i) * std::conj(eta(i));
  }
  return acc;
}

double l2_norm(const SampledMeasureSpace& space, const CVector& xi) {
  return std::sqrt(std::max(0.0, l2_inner(space, xi, xi).real()));
}

double l2_norm_on(const SampledMeasureSpace& space, const CVector& xi,
                  const std::vector<std::size_t>& subset) {
  check_length(space, xi, "l2_norm_on");
  double acc = 0.0;
  for (std::size_t j : subset) acc += space.weight(j) * std::norm(xi(static_cast<Eigen::Index>(j)));
  return std::sqrt(acc);
}

double ess_sup(const SampledMeasureSpace& space, const CVector& xi) {
  if (space.empty()) throw DomainError("ess_sup of a function on an empty space");
  check_length(space, xi, "ess_sup");
  return xi.cwiseAbs().maxCoeff();
}

std::string to_string(RefinementGenerator generator) {
  switch (generator) {
    case RefinementGenerator::Counting: return "counting";
    case RefinementGenerator::PeriodicUnit: return "periodic";
    case RefinementGenerator::Symmetric: return "symmetric";
  }
  return "unknown";
}

RefinementGenerator refinement_generator_from_string(const std::string& name) {
  if (name == "counting") return RefinementGenerator::Counting;
  if (name == "periodic") return RefinementGenerator::PeriodicUnit;
  if (name == "symmetric") return RefinementGenerator::Symmetric;
  throw DomainError("unknown refinement generator '" + name + "'");
}

RefinementFamily::RefinementFamily(RefinementGenerator generator,
                                   std::vector<Resolution> schedule)
    : generator_(generator), schedule_(std::move(schedule)) {
  for (std::size_t s = 0; s < schedule_.size(); ++s) {
    if (schedule_[s].n == 0) throw DomainError("refinement schedule: n must be positive");
    if (s > 0 && schedule_[s].n <= schedule_[s - 1].n)
      throw DomainError("refinement schedule must be strictly increasing in n");
    if (generator_ == RefinementGenerator::Symmetric && !(schedule_[s].half_width > 0.0))
      throw DomainError("refinement schedule: symmetric grids need L > 0");
  }
}

SampledMeasureSpace RefinementFamily::refine(std::size_t step) const {
  if (step >= schedule_.size())
    throw InsufficientDataError("refine: step " + std::to_string(step) +
                                " outside schedule of length " + std::to_string(schedule_.size()));
  const Resolution& r = schedule_[step];
  switch (generator_) {
    case RefinementGenerator::Counting: return SampledMeasureSpace::counting(r.n);
    case RefinementGenerator::PeriodicUnit: return SampledMeasureSpace::periodic_unit(r.n);
    case RefinementGenerator::Symmetric: return SampledMeasureSpace::symmetric(r.n, r.half_width);
  }
  throw DomainError("refine: unknown generator");
}

RefinementFamily RefinementFamily::doubled() const {
  std::vector<Resolution> finer = schedule_;
  for (auto& r : finer)
    r.n = generator_ == RefinementGenerator::Symmetric ? 2 * r.n - 1 : 2 * r.n;
  return {generator_, std::move(finer)};
}

}  // namespace dframe
