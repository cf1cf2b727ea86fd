#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace dframe {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// All randomized checks take an explicit generator so that runs are
// reproducible from a seed.
using Rng = std::mt19937_64;

// Standard complex Gaussian vector / matrix (independent N(0,1/2) parts).
CVector random_cvector(Rng& rng, Eigen::Index n);
CMatrix random_cmatrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);
double random_uniform(Rng& rng, double lo, double hi);

// Largest singular value.
double spectral_norm(const CMatrix& m);

// Deterministic child seed for a named sub-task (FNV-1a over the name mixed
// with the parent seed and finalized with splitmix64).
std::uint64_t derive_seed(std::uint64_t parent, const char* name);

}  // namespace dframe
