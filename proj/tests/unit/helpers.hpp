#pragma once

#include <memory>
#include <vector>

#include "dframe/maps.hpp"
#include "dframe/measure.hpp"
#include "dframe/model.hpp"
#include "dframe/multiplier.hpp"

namespace dframe::testing {

inline SpacePtr periodic(std::size_t n) {
  return std::make_shared<const SampledMeasureSpace>(SampledMeasureSpace::periodic_unit(n));
}

inline SpacePtr counting(std::size_t n) {
  return std::make_shared<const SampledMeasureSpace>(SampledMeasureSpace::counting(n));
}

inline SpacePtr symmetric(std::size_t n, double L) {
  return std::make_shared<const SampledMeasureSpace>(SampledMeasureSpace::symmetric(n, L));
}

inline ModelPtr model_of(const SpacePtr& space, const BasisFamily& family = RawSamples{}) {
  return std::make_shared<const ModelSpace>(make_model(space, family));
}

inline CVector cvec(std::initializer_list<Complex> v) {
  CVector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (const auto& z : v) out(i++) = z;
  return out;
}

inline double max_abs(const CMatrix& a) { return a.cwiseAbs().maxCoeff(); }

// Random J x K eval table on a raw-sample model over a periodic grid of J
// points (so D = H has dimension J and K = J).
inline DistributionMap random_map(const ModelPtr& model, const SpacePtr& space, Rng& rng,
                                  double scale = 1.0) {
  const auto j = static_cast<Eigen::Index>(space->size());
  return DistributionMap(space, model, scale * random_cmatrix(rng, j, static_cast<Eigen::Index>(model->dim())),
                         "random");
}

inline std::vector<TestFunction> to_functions(const CMatrix& columns) {
  std::vector<TestFunction> out;
  for (Eigen::Index c = 0; c < columns.cols(); ++c) out.push_back({columns.col(c)});
  return out;
}

}  // namespace dframe::testing
