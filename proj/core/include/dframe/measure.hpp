#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dframe/types.hpp"

namespace dframe {

enum class MeasureKind { Atomic, Quadrature };

// Where the sample points came from. Only Periodic grids support the
// discrete Fourier transform.
enum class GridLayout { Irregular, Periodic, Symmetric };

std::string to_string(MeasureKind kind);
std::string to_string(GridLayout layout);

// Finite weighted point set standing in for a measure space (X, mu).
//
// Weights are strictly positive: null sets are excluded at construction so
// every "mu-almost everywhere" statement becomes a pointwise one.
class SampledMeasureSpace {
 public:
  SampledMeasureSpace(std::vector<double> points, std::vector<double> weights,
                      MeasureKind kind, double domain_extent,
                      GridLayout layout = GridLayout::Irregular);

  // n atoms of unit mass at 0, 1, ..., n-1.
  static SampledMeasureSpace counting(std::size_t n);
  // x_j = j/n on [0,1) with weights 1/n. Riemann sums of trigonometric
  // polynomials of degree < n are exact here.
  static SampledMeasureSpace periodic_unit(std::size_t n);
  // n equispaced points on [-L, L] including both endpoints, weight 2L/(n-1).
  static SampledMeasureSpace symmetric(std::size_t n, double half_width);

  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  const std::vector<double>& points() const noexcept { return points_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double point(std::size_t j) const { return points_.at(j); }
  double weight(std::size_t j) const { return weights_.at(j); }
  MeasureKind kind() const noexcept { return kind_; }
  GridLayout layout() const noexcept { return layout_; }
  double domain_extent() const noexcept { return extent_; }
  double total_measure() const noexcept;

  RVector weight_vector() const;
  // True for an n-point grid j/n with weights 1/n (checked numerically, so
  // hand-built spaces qualify too).
  bool is_periodic_unit_grid() const;

  bool operator==(const SampledMeasureSpace& other) const = default;

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
  MeasureKind kind_;
  double extent_;
  GridLayout layout_;
};

// sum_j w_j xi_j conj(eta_j)
Complex l2_inner(const SampledMeasureSpace& space, const CVector& xi,
                 const CVector& eta);
double l2_norm(const SampledMeasureSpace& space, const CVector& xi);
// Weighted L2 norm restricted to the listed point indices.
double l2_norm_on(const SampledMeasureSpace& space, const CVector& xi,
                  const std::vector<std::size_t>& subset);

// max |xi_j| over positive-weight points (all points, by construction).
double ess_sup(const SampledMeasureSpace& space, const CVector& xi);

// Samples a real function at every point of the space.
template <typename F>
CVector sample(const SampledMeasureSpace& space, F&& fn) {
  CVector v(static_cast<Eigen::Index>(space.size()));
  for (std::size_t j = 0; j < space.size(); ++j)
    v(static_cast<Eigen::Index>(j)) = Complex(fn(space.point(j)));
  return v;
}

struct Resolution {
  std::size_t n = 0;
  double half_width = 0.0;

  bool operator==(const Resolution&) const = default;
};

enum class RefinementGenerator { Counting, PeriodicUnit, Symmetric };

std::string to_string(RefinementGenerator generator);
RefinementGenerator refinement_generator_from_string(const std::string& name);

// Deterministic family of spaces indexed by a schedule of resolutions; the
// finite stand-in for letting X grow or the grid get finer.
class RefinementFamily {
 public:
  RefinementFamily(RefinementGenerator generator, std::vector<Resolution> schedule);

  RefinementGenerator generator() const noexcept { return generator_; }
  const std::vector<Resolution>& schedule() const noexcept { return schedule_; }
  std::size_t steps() const noexcept { return schedule_.size(); }

  // Throws InsufficientDataError when step is outside the schedule.
  SampledMeasureSpace refine(std::size_t step) const;

  // Same generator with every resolution doubled (n -> 2n - 1 for
  // symmetric grids so the old points stay on the grid).
  RefinementFamily doubled() const;

 private:
  RefinementGenerator generator_;
  std::vector<Resolution> schedule_;
};

}  // namespace dframe
