#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "dframe/measure.hpp"
#include "dframe/types.hpp"

namespace dframe {

// Trigonometric polynomials e^{2 pi i k x}, |k| <= max_degree. On a periodic
// n-point grid the frequencies are clipped to the alias window (-n/2, n/2],
// so max_degree >= n/2 gives the full K = n basis.
struct Trigonometric {
  int max_degree = 0;
};

// exp(-(x-c)^2 / (2 width^2)) for each centre c.
struct GaussianBumps {
  std::vector<double> centers;
  double width = 1.0;
};

// Indicator of each sample point; D is then all of the sampled H.
struct RawSamples {};

using BasisFamily = std::variant<Trigonometric, GaussianBumps, RawSamples>;

std::string basis_family_name(const BasisFamily& family);

// Result of the pivoted, reorthogonalized modified Gram-Schmidt pass.
struct Orthonormalization {
  CMatrix basis;                // N x K, H-orthonormal
  std::vector<long> pivots;     // pivots[i] = source column of basis column i
};

// Orthonormalizes the columns of `columns` in the inner product
// <u, v> = v^H gram u. Columns whose residual falls below
// rank_tol * (largest column norm) raise DegeneracyError naming the column.
Orthonormalization orthonormalize(const CMatrix& gram, const CMatrix& columns,
                                  double rank_tol = 1e-10);

// Coordinates of an element of D over the orthonormal basis.
struct TestFunction {
  CVector coeffs;
};

// Element of the conjugate dual, known through its action on the basis:
// <F, g> = sum_k conj(g_k) action_k.
struct DualElement {
  CVector action;
};

Complex pair(const DualElement& F, const TestFunction& g);

// Discretized triple D subset H subset D^x.
//
// H is the span of the N raw samples with inner product `h_gram`; D is the
// K-dimensional span of `d_basis`. Everything downstream works in the
// coordinates of `on_basis`, where the H inner product is the plain
// Euclidean one.
class ModelSpace {
 public:
  ModelSpace(std::shared_ptr<const SampledMeasureSpace> sample_space, CMatrix h_gram,
             CMatrix d_basis, std::vector<std::string> labels, std::string family_name);

  std::size_t ambient_dim() const noexcept { return static_cast<std::size_t>(h_gram_.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(on_basis_.cols()); }

  const std::shared_ptr<const SampledMeasureSpace>& sample_space() const noexcept {
    return sample_space_;
  }
  const CMatrix& h_gram() const noexcept { return h_gram_; }
  const CMatrix& d_basis() const noexcept { return d_basis_; }
  const CMatrix& on_basis() const noexcept { return on_basis_; }
  const std::vector<long>& pivots() const noexcept { return pivots_; }
  // Label of each on_basis column ("k=3", "c=0.25", "x_4", ...).
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::string& family_name() const noexcept { return family_name_; }
  // sigma_max / sigma_min of d_basis in the H geometry.
  double d_basis_condition() const noexcept { return condition_; }

  // Raw samples of f (on_basis * coeffs).
  CVector to_samples(const TestFunction& f) const;
  // H-orthogonal projection of raw samples onto D.
  TestFunction project(const CVector& samples) const;
  // Basis-coordinate action of an element of H given by raw samples:
  // action_k = <h, e_k>.
  DualElement dual_of_samples(const CVector& samples) const;
  // Raw-sample H inner product v^H G u.
  Complex sample_inner(const CVector& u, const CVector& v) const;

  TestFunction random_test_function(Rng& rng) const;

 private:
  std::shared_ptr<const SampledMeasureSpace> sample_space_;
  CMatrix h_gram_;
  CMatrix d_basis_;
  CMatrix on_basis_;
  std::vector<long> pivots_;
  std::vector<std::string> labels_;
  std::string family_name_;
  double condition_ = 1.0;
};

ModelSpace make_model(std::shared_ptr<const SampledMeasureSpace> space,
                      const BasisFamily& family);

// sum_k f_k conj(g_k)
Complex h_inner(const ModelSpace& model, const TestFunction& f, const TestFunction& g);
double h_norm(const ModelSpace& model, const TestFunction& f);

// Unitary DFT on the weighted periodic grid:
//   dft(u)_k = n^{-1/2} sum_j u_j e^{-2 pi i j k / n},
// the Riemann sum of f^(k) = int f(x) e^{-2 pi i k x} dx rescaled by sqrt(n)
// so that it preserves the weighted L2 norm. Sample k is frequency k (mod n).
CVector dft(const SampledMeasureSpace& space, const CVector& samples);
CVector idft(const SampledMeasureSpace& space, const CVector& samples);
CVector dft(const ModelSpace& model, const CVector& samples);
CVector idft(const ModelSpace& model, const CVector& samples);

}  // namespace dframe
