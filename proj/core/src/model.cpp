#include "dframe/model.hpp"

#include <cmath>
#include <numbers>

#include "dframe/error.hpp"

namespace dframe {

std::string basis_family_name(const BasisFamily& family) {
  struct Visitor {
    std::string operator()(const Trigonometric&) const { return "trigonometric"; }
    std::string operator()(const GaussianBumps&) const { return "gaussian_bumps"; }
    std::string operator()(const RawSamples&) const { return "raw"; }
  };
  return std::visit(Visitor{}, family);
}

Complex pair(const DualElement& F, const TestFunction& g) {
  if (F.action.size() != g.coeffs.size())
    throw ShapeError("pair: dual element and test function have different lengths");
  return g.coeffs.dot(F.action);  // Eigen's dot conjugates the left operand
}

namespace {

// Cholesky factor U = L^H of the Gram matrix, so that v^H G u = (U v)^H (U u).
Eigen::LLT<CMatrix> factor_gram(const CMatrix& gram) {
  if (gram.rows() != gram.cols()) throw ShapeError("h_gram must be square");
  const double scale = gram.cwiseAbs().maxCoeff();
  if ((gram - gram.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale))
    throw DomainError("h_gram must be Hermitian");
  Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() != Eigen::Success) throw DomainError("h_gram must be positive definite");
  return llt;
}

}  // namespace

Orthonormalization orthonormalize(const CMatrix& gram, const CMatrix& columns,
                                  double rank_tol) {
  if (columns.rows() != gram.rows())
    throw ShapeError("orthonormalize: columns have " + std::to_string(columns.rows()) +
                     " rows, gram is " + std::to_string(gram.rows()));
  const auto llt = factor_gram(gram);
  const CMatrix upper = llt.matrixU();

  // Work in the whitened coordinates where the H inner product is Euclidean.
  CMatrix residual = upper * columns;
  const Eigen::Index n = residual.rows();
  const Eigen::Index k = residual.cols();
  if (k == 0) throw DegeneracyError("orthonormalize: no columns", -1);

  const double largest = residual.colwise().norm().maxCoeff();
  if (!(largest > 0.0)) throw DegeneracyError("orthonormalize: column 0 is zero", 0);

  CMatrix q(n, k);
  std::vector<long> pivots;
  std::vector<bool> used(static_cast<std::size_t>(k), false);

  for (Eigen::Index step = 0; step < k; ++step) {
    double best = -1.0;
    for (Eigen::Index c = 0; c < k; ++c)
      if (!used[static_cast<std::size_t>(c)]) best = std::max(best, residual.col(c).norm());
    // Lowest index among near-ties keeps already-orthonormal input in order.
    Eigen::Index pivot = -1;
    for (Eigen::Index c = 0; c < k && pivot < 0; ++c)
      if (!used[static_cast<std::size_t>(c)] && residual.col(c).norm() >= best * (1.0 - 1e-10))
        pivot = c;

    if (best <= rank_tol * largest)
      throw DegeneracyError("basis column " + std::to_string(pivot) +
                                " is linearly dependent on the previous columns "
                                "(residual " + std::to_string(best / largest) + ")",
                            static_cast<long>(pivot));

    CVector v = residual.col(pivot);
    if (step > 0) {
      const auto prev = q.leftCols(step);
      v -= prev * (prev.adjoint() * v);
    }
    v /= v.norm();
    q.col(step) = v;
    used[static_cast<std::size_t>(pivot)] = true;
    pivots.push_back(static_cast<long>(pivot));

    for (Eigen::Index c = 0; c < k; ++c)
      if (!used[static_cast<std::size_t>(c)]) residual.col(c) -= v * v.dot(residual.col(c));
  }

  Orthonormalization out;
  out.basis = llt.matrixU().solve(q);
  out.pivots = std::move(pivots);
  return out;
}

ModelSpace::ModelSpace(std::shared_ptr<const SampledMeasureSpace> sample_space,
                       CMatrix h_gram, CMatrix d_basis, std::vector<std::string> labels,
                       std::string family_name)
    : sample_space_(std::move(sample_space)),
      h_gram_(std::move(h_gram)),
      d_basis_(std::move(d_basis)),
      family_name_(std::move(family_name)) {
  if (!sample_space_) throw DomainError("model: sample space is null");
  if (static_cast<std::size_t>(h_gram_.rows()) != sample_space_->size())
    throw ShapeError("model: h_gram dimension differs from the sample space size");
  if (d_basis_.cols() > d_basis_.rows())
    throw ShapeError("model: more basis columns than ambient dimension");
  if (!d_basis_.allFinite()) throw DomainError("model: d_basis has non-finite entries");

  auto ortho = orthonormalize(h_gram_, d_basis_);
  on_basis_ = std::move(ortho.basis);
  pivots_ = std::move(ortho.pivots);

  labels_.reserve(pivots_.size());
  for (long p : pivots_)
    labels_.push_back(static_cast<std::size_t>(p) < labels.size()
                          ? labels[static_cast<std::size_t>(p)]
                          : "col" + std::to_string(p));

  const CMatrix whitened = Eigen::LLT<CMatrix>(h_gram_).matrixU() * d_basis_;
  Eigen::BDCSVD<CMatrix> svd(whitened);
  const RVector& s = svd.singularValues();
  condition_ = s(0) / s(s.size() - 1);
}

CVector ModelSpace::to_samples(const TestFunction& f) const {
  if (static_cast<std::size_t>(f.coeffs.size()) != dim())
    throw ShapeError("to_samples: expected " + std::to_string(dim()) + " coefficients");
  return on_basis_ * f.coeffs;
}

TestFunction ModelSpace::project(const CVector& samples) const {
  if (static_cast<std::size_t>(samples.size()) != ambient_dim())
    throw ShapeError("project: expected " + std::to_string(ambient_dim()) + " samples");
  return {on_basis_.adjoint() * (h_gram_ * samples)};
}

DualElement ModelSpace::dual_of_samples(const CVector& samples) const {
  return {project(samples).coeffs};
}

Complex ModelSpace::sample_inner(const CVector& u, const CVector& v) const {
  return v.dot(h_gram_ * u);
}

TestFunction ModelSpace::random_test_function(Rng& rng) const {
  return {random_cvector(rng, static_cast<Eigen::Index>(dim()))};
}

namespace {

std::vector<int> trig_frequencies(const SampledMeasureSpace& space, int max_degree) {
  if (max_degree < 0) throw DomainError("trigonometric basis: max_degree must be >= 0");
  std::vector<int> freqs;
  const bool periodic = space.is_periodic_unit_grid();
  const int n = static_cast<int>(space.size());
  const int lo = periodic ? -((n - 1) / 2) : -max_degree;
  const int hi = periodic ? n / 2 : max_degree;
  for (int k = -max_degree; k <= max_degree; ++k)
    if (k >= lo && k <= hi) freqs.push_back(k);
  return freqs;
}

}  // namespace

ModelSpace make_model(std::shared_ptr<const SampledMeasureSpace> space,
                      const BasisFamily& family) {
  if (!space || space->empty()) throw DomainError("make_model: empty space");
  const auto n = static_cast<Eigen::Index>(space->size());
  const RVector w = space->weight_vector();
  CMatrix gram = CMatrix::Zero(n, n);
  gram.diagonal() = w.cast<Complex>();

  CMatrix basis;
  std::vector<std::string> labels;

  if (std::holds_alternative<Trigonometric>(family)) {
    const auto freqs = trig_frequencies(*space, std::get<Trigonometric>(family).max_degree);
    const bool periodic = space->is_periodic_unit_grid();
    basis.resize(n, static_cast<Eigen::Index>(freqs.size()));
    for (std::size_t c = 0; c < freqs.size(); ++c) {
      const long m = ((freqs[c] % n) + n) % n;
      for (Eigen::Index j = 0; j < n; ++j) {
        // On the periodic grid use the exact root-of-unity index (m j mod n).
        const double phase =
            periodic ? static_cast<double>((m * j) % n) / static_cast<double>(n)
                     : freqs[c] * space->point(static_cast<std::size_t>(j));
        basis(j, static_cast<Eigen::Index>(c)) = std::polar(1.0, 2.0 * std::numbers::pi * phase);
      }
      labels.push_back("k=" + std::to_string(freqs[c]));
    }
  } else if (std::holds_alternative<GaussianBumps>(family)) {
    const auto& g = std::get<GaussianBumps>(family);
    if (!(g.width > 0.0)) throw DomainError("gaussian_bumps: width must be positive");
    if (g.centers.empty()) throw DomainError("gaussian_bumps: no centres");
    basis.resize(n, static_cast<Eigen::Index>(g.centers.size()));
    for (std::size_t c = 0; c < g.centers.size(); ++c) {
      for (Eigen::Index j = 0; j < n; ++j) {
        const double d = space->point(static_cast<std::size_t>(j)) - g.centers[c];
        basis(j, static_cast<Eigen::Index>(c)) = std::exp(-0.5 * d * d / (g.width * g.width));
      }
      labels.push_back("c=" + std::to_string(g.centers[c]));
    }
  } else {
    basis = CMatrix::Identity(n, n);
    for (Eigen::Index j = 0; j < n; ++j) labels.push_back("x_" + std::to_string(j));
  }

  return ModelSpace(std::move(space), std::move(gram), std::move(basis), std::move(labels),
                    basis_family_name(family));
}

Complex h_inner(const ModelSpace& model, const TestFunction& f, const TestFunction& g) {
  if (static_cast<std::size_t>(f.coeffs.size()) != model.dim() ||
      static_cast<std::size_t>(g.coeffs.size()) != model.dim())
    throw ShapeError("h_inner: coefficient vectors must have length " +
                     std::to_string(model.dim()));
  Complex acc = 0.0;
  for (Eigen::Index k = 0; k < f.coeffs.size(); ++k) acc += f.coeffs(k) * std::conj(g.coeffs(k));
  return acc;
}

double h_norm(const ModelSpace& model, const TestFunction& f) {
  return std::sqrt(std::max(0.0, h_inner(model, f, f).real()));
}

namespace {

CVector unitary_dft(const SampledMeasureSpace& space, const CVector& samples, double sign) {
  if (!space.is_periodic_unit_grid())
    throw UnsupportedSpaceError("dft requires a uniform periodic grid on [0,1)");
  const auto n = static_cast<Eigen::Index>(space.size());
  if (samples.size() != n)
    throw ShapeError("dft: expected " + std::to_string(n) + " samples");
  std::vector<Complex> twiddle(static_cast<std::size_t>(n));
  for (Eigen::Index m = 0; m < n; ++m)
    twiddle[static_cast<std::size_t>(m)] =
        std::polar(1.0, sign * 2.0 * std::numbers::pi * static_cast<double>(m) /
                            static_cast<double>(n));
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CVector out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      acc += samples(j) * twiddle[static_cast<std::size_t>((j * k) % n)];
    out(k) = scale * acc;
  }
  return out;
}

}  // namespace

CVector dft(const SampledMeasureSpace& space, const CVector& samples) {
  return unitary_dft(space, samples, -1.0);
}

CVector idft(const SampledMeasureSpace& space, const CVector& samples) {
  return unitary_dft(space, samples, +1.0);
}

CVector dft(const ModelSpace& model, const CVector& samples) {
  return dft(*model.sample_space(), samples);
}

CVector idft(const ModelSpace& model, const CVector& samples) {
  return idft(*model.sample_space(), samples);
}

}  // namespace dframe
