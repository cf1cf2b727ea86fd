#include "dframe/lab.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "dframe/error.hpp"

namespace dframe {

namespace {

using Index = Eigen::Index;

CVector unit_coeffs(Rng& rng, Index k) {
  CVector c = random_cvector(rng, k);
  const double n = c.norm();
  if (n > 0.0) c /= n;
  return c;
}

CVector loop_apply(const CMatrix& A, const CVector& x) {
  CVector y = CVector::Zero(A.rows());
  for (Index r = 0; r < A.rows(); ++r) {
    Complex acc = 0.0;
    for (Index c = 0; c < A.cols(); ++c) acc += A(r, c) * x(c);
    y(r) = acc;
  }
  return y;
}

double max_abs(const CMatrix& A) {
  double worst = 0.0;
  for (Index r = 0; r < A.rows(); ++r)
    for (Index c = 0; c < A.cols(); ++c) worst = std::max(worst, std::abs(A(r, c)));
  return worst;
}

}  // namespace

double brute_force_pairing(const MultiplierOperator& M, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw DomainError("brute_force_pairing: trials must be at least 1");
  const CMatrix& dense = M.dense();
  const CMatrix& eo = M.omega().eval();
  const CMatrix& et = M.theta().eval();
  const CVector& m = M.symbol().values();
  const SampledMeasureSpace& space = *M.omega().space();
  const auto k = static_cast<Index>(M.dim());
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const CVector f = unit_coeffs(rng, k);
    const CVector g = unit_coeffs(rng, k);
    Complex lhs = 0.0;
    for (Index r = 0; r < k; ++r) {
      Complex mf = 0.0;
      for (Index c = 0; c < k; ++c) mf += dense(r, c) * f(c);
      lhs += std::conj(g(r)) * mf;
    }
    Complex rhs = 0.0;
    for (Index j = 0; j < eo.rows(); ++j) {
      Complex a = 0.0;
      Complex b = 0.0;
      for (Index c = 0; c < k; ++c) {
        a += eo(j, c) * f(c);
        b += et(j, c) * g(c);
      }
      rhs += (space.weight(static_cast<std::size_t>(j)) * m(j) * a) * std::conj(b);
    }
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

CMatrix brute_force_frame_operator(const DistributionMap& omega) {
  const CMatrix& e = omega.eval();
  const SampledMeasureSpace& space = *omega.space();
  CMatrix s = CMatrix::Zero(e.cols(), e.cols());
  for (Index k = 0; k < e.cols(); ++k)
    for (Index l = 0; l < e.cols(); ++l) {
      Complex acc = 0.0;
      for (Index j = 0; j < e.rows(); ++j)
        acc += space.weight(static_cast<std::size_t>(j)) * std::conj(e(j, k)) * e(j, l);
      s(k, l) = acc;
    }
  return s;
}

CMatrix brute_force_multiplier(const Symbol& m, const DistributionMap& omega,
                               const DistributionMap& theta) {
  const CMatrix& eo = omega.eval();
  const CMatrix& et = theta.eval();
  const SampledMeasureSpace& space = *omega.space();
  CMatrix d = CMatrix::Zero(eo.cols(), eo.cols());
  for (Index k = 0; k < eo.cols(); ++k)
    for (Index l = 0; l < eo.cols(); ++l) {
      Complex acc = 0.0;
      for (Index j = 0; j < eo.rows(); ++j)
        acc += std::conj(et(j, k)) * space.weight(static_cast<std::size_t>(j)) *
               m.values()(j) * eo(j, l);
      d(k, l) = acc;
    }
  return d;
}

double brute_force_duality(const DistributionMap& omega, const DistributionMap& theta,
                           std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw DomainError("brute_force_duality: trials must be at least 1");
  const CMatrix& eo = omega.eval();
  const CMatrix& et = theta.eval();
  const SampledMeasureSpace& space = *omega.space();
  const Index k = eo.cols();
  Rng rng(seed);
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const CVector f = unit_coeffs(rng, k);
    const CVector g = unit_coeffs(rng, k);
    Complex exact = 0.0;
    for (Index c = 0; c < k; ++c) exact += f(c) * std::conj(g(c));
    Complex sum = 0.0;
    for (Index j = 0; j < eo.rows(); ++j) {
      Complex a = 0.0;
      Complex b = 0.0;
      for (Index c = 0; c < k; ++c) {
        a += et(j, c) * f(c);
        b += eo(j, c) * g(c);
      }
      sum += space.weight(static_cast<std::size_t>(j)) * a * std::conj(b);
    }
    worst = std::max(worst, std::abs(exact - sum));
  }
  return worst;
}

IdentityAudit audit_multiplier(const MultiplierOperator& M, std::size_t trials, std::uint64_t seed,
                               double tol) {
  IdentityAudit a;
  const CMatrix loop = brute_force_multiplier(M.symbol(), M.omega(), M.theta());
  const double scale = std::max(1.0, max_abs(loop));
  a.dense_residual = max_abs(M.dense() - loop) / scale;
  a.pairing_residual = brute_force_pairing(M, trials, seed);
  a.frame_operator_omega =
      max_abs(frame_operator(M.omega()) - brute_force_frame_operator(M.omega())) /
      std::max(1.0, max_abs(brute_force_frame_operator(M.omega())));
  a.frame_operator_theta =
      max_abs(frame_operator(M.theta()) - brute_force_frame_operator(M.theta())) /
      std::max(1.0, max_abs(brute_force_frame_operator(M.theta())));
  const CMatrix adj_loop = brute_force_multiplier(M.symbol().conj(), M.theta(), M.omega());
  CMatrix transpose(loop.cols(), loop.rows());
  for (Index r = 0; r < loop.rows(); ++r)
    for (Index c = 0; c < loop.cols(); ++c) transpose(c, r) = std::conj(loop(r, c));
  a.adjoint_residual = std::max(max_abs(adjoint(M).dense() - transpose),
                                max_abs(adj_loop - transpose)) / scale;
  a.passed = a.dense_residual <= tol && a.pairing_residual <= tol &&
             a.frame_operator_omega <= tol && a.frame_operator_theta <= tol &&
             a.adjoint_residual <= tol;
  return a;
}

DiscreteComparison discrete_reduction_oracle(const std::vector<CVector>& phi) {
  if (phi.empty()) throw ShapeError("discrete_reduction_oracle: empty family");
  const Index k = phi.front().size();
  CMatrix s = CMatrix::Zero(k, k);
  for (const auto& v : phi) {
    if (v.size() != k) throw ShapeError("discrete_reduction_oracle: vectors differ in length");
    for (Index r = 0; r < k; ++r)
      for (Index c = 0; c < k; ++c) s(r, c) += v(r) * std::conj(v(c));
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(s, Eigen::EigenvaluesOnly);
  DiscreteComparison out;
  out.classical_lower = std::max(0.0, eig.eigenvalues()(0));
  out.classical_upper = std::max(0.0, eig.eigenvalues()(k - 1));
  out.classical_total =
      out.classical_upper > 0.0 && out.classical_lower > 1e-10 * out.classical_upper;

  const auto d = diagnose(discrete_sequence_map(phi));
  out.maps_lower = d.lower;
  out.maps_upper = d.upper;
  out.maps_total = d.total;
  out.lower_difference = std::abs(out.maps_lower - out.classical_lower);
  out.upper_difference = std::abs(out.maps_upper - out.classical_upper);
  const double scale = 1e-14 * std::max(1.0, out.classical_upper);
  out.agree = out.lower_difference <= scale && out.upper_difference <= scale &&
              out.classical_total == out.maps_total;
  return out;
}

std::string to_string(SignConvention c) {
  return c == SignConvention::Negative ? "exp(-2 pi i j k / n)" : "exp(+2 pi i j k / n)";
}

namespace {

// Unitary transform with kernel exp(sign 2 pi i j k / n) by direct summation.
CVector direct_transform(const CVector& u, int sign) {
  const Index n = u.size();
  CVector out(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (Index k = 0; k < n; ++k) {
    Complex acc = 0.0;
    for (Index j = 0; j < n; ++j) {
      const double phase = static_cast<double>((j * k) % n) / static_cast<double>(n);
      acc += u(j) * std::polar(1.0, sign * 2.0 * std::numbers::pi * phase);
    }
    out(k) = scale * acc;
  }
  return out;
}

// (a * b)_i = sum_j a_j b_{(i - j) mod n}
CVector circular_convolution(const CVector& a, const CVector& b) {
  const Index n = a.size();
  CVector out(n);
  for (Index i = 0; i < n; ++i) {
    Complex acc = 0.0;
    for (Index j = 0; j < n; ++j) acc += a(j) * b(((i - j) % n + n) % n);
    out(i) = acc;
  }
  return out;
}

// Oracle outputs (raw samples) of the four members for input samples u.
std::array<CVector, 4> quartet_oracle(const CVector& m, const CVector& u, int sign) {
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(u.size()));
  const CVector m_check = direct_transform(m, -sign);
  return {
      CVector(m.cwiseProduct(u)),
      CVector(m.cwiseProduct(direct_transform(u, sign))),
      CVector(inv_sqrt_n * circular_convolution(m_check, direct_transform(u, -sign))),
      CVector(inv_sqrt_n * circular_convolution(m_check, u)),
  };
}

}  // namespace

QuartetReport fourier_quartet_check(std::size_t n, const Symbol& m, std::size_t trials,
                                    std::uint64_t seed, double tol) {
  if (n == 0) throw DomainError("fourier_quartet_check: n must be positive");
  if (m.size() != n)
    throw ShapeError("fourier_quartet_check: symbol must have one value per grid point");
  auto space = std::make_shared<const SampledMeasureSpace>(SampledMeasureSpace::periodic_unit(n));
  auto model = std::make_shared<const ModelSpace>(make_model(space, RawSamples{}));
  const auto delta = delta_frame(model, space);
  const auto expo = exponential_frame(model, space);

  const std::array<MultiplierOperator, 4> ops = {
      build(m, delta, delta), build(m, expo, delta), build(m, delta, expo), build(m, expo, expo)};

  QuartetReport r;
  r.n = n;
  r.tolerance = tol;
  r.members[0].name = "M_{m,omega,omega}";
  r.members[0].expected = "m f";
  r.members[1].name = "M_{m,theta,omega}";
  r.members[1].expected = "m dft(f)";
  r.members[2].name = "M_{m,omega,theta}";
  r.members[2].expected = "n^{-1/2} idft(m) * idft(f)";
  r.members[3].name = "M_{m,theta,theta}";
  r.members[3].expected = "n^{-1/2} idft(m) * f";

  const double h_scale = 1.0 / std::sqrt(static_cast<double>(n));
  Rng rng(seed);
  for (std::size_t t = 0; t < std::max<std::size_t>(trials, 1); ++t) {
    const auto f = random_unit_test_function(*model, rng);
    const CVector u = model->to_samples(f);
    const auto neg = quartet_oracle(m.values(), u, -1);
    const auto pos = quartet_oracle(m.values(), u, +1);
    for (std::size_t q = 0; q < 4; ++q) {
      const CVector out = model->to_samples(ops[q].apply(f));
      r.members[q].residual = std::max(r.members[q].residual, (out - neg[q]).norm() * h_scale);
      r.members[q].alternate_residual =
          std::max(r.members[q].alternate_residual, (out - pos[q]).norm() * h_scale);
    }
  }
  r.passed = true;
  for (auto& mem : r.members) {
    mem.passed = mem.residual < tol;
    if (mem.passed)
      mem.passes_under = SignConvention::Negative;
    else if (mem.alternate_residual < tol)
      mem.passes_under = SignConvention::Positive;
    if (!mem.passed) {
      r.passed = false;
      r.failures.push_back(mem.name + " fails under " + to_string(SignConvention::Negative) +
                           (mem.passes_under ? "; passes under " + to_string(*mem.passes_under)
                                             : "; fails under both sign conventions"));
    }
  }
  return r;
}

std::string to_string(SweepVerdict v) { return v == SweepVerdict::Bounded ? "Bounded" : "Unbounded"; }

SweepResult unboundedness_sweep(const RefinementFamily& family, const MultiplierBuilder& builder,
                                const SweepOptions& options) {
  if (family.steps() < 3)
    throw InsufficientDataError("unboundedness_sweep: schedule needs at least 3 steps, got " +
                                std::to_string(family.steps()));
  SweepResult r;
  r.schedule = family.schedule();
  r.threshold = options.threshold;
  r.floor_checked = options.linear_floor.has_value();
  for (std::size_t s = 0; s < family.steps(); ++s) {
    auto space = std::make_shared<const SampledMeasureSpace>(family.refine(s));
    const double norm = operator_norm(builder(s, space));
    r.norms.push_back(norm);
    if (options.linear_floor) {
      const double floor = *options.linear_floor * r.schedule[s].half_width;
      if (norm < floor) {
        r.floor_ok = false;
        r.failures.push_back("step " + std::to_string(s) + ": norm " + std::to_string(norm) +
                             " below " + std::to_string(floor));
      }
    }
  }
  r.fitted_growth = fit_growth_exponent(growth_abscissae(r.schedule), r.norms);
  r.verdict = r.fitted_growth > options.threshold ? SweepVerdict::Unbounded : SweepVerdict::Bounded;
  r.passed = r.floor_ok;
  return r;
}

namespace {

ModelPtr raw_model(const SpacePtr& space) {
  return std::make_shared<const ModelSpace>(make_model(space, RawSamples{}));
}

}  // namespace

MultiplierBuilder weighted_delta_builder() {
  return [](std::size_t, const SpacePtr& space) {
    const auto model = raw_model(space);
    const auto omega = weighted_delta_frame(model, space, [](double x) { return Complex(x); });
    return build(Symbol::constant(*space, 1.0), omega, delta_frame(model, space));
  };
}

MultiplierBuilder coordinate_symbol_builder() {
  return [](std::size_t, const SpacePtr& space) {
    const auto model = raw_model(space);
    const auto delta = delta_frame(model, space);
    return build(Symbol::coordinate(*space), delta, delta);
  };
}

MultiplierBuilder bounded_symbol_builder(std::uint64_t seed) {
  return [seed](std::size_t step, const SpacePtr& space) {
    const auto model = raw_model(space);
    const auto delta = delta_frame(model, space);
    return build(Symbol::random_phase(*space, seed + step), delta, delta);
  };
}

}  // namespace dframe
