#pragma once

// Test-only reference computations, independent of the library kernels.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

namespace testing_oracles {

using Index = std::ptrdiff_t;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// exp(M) in long double: scale until ||M/2^s||_1 <= 1/2, 30-term Taylor
// series, square back.
inline Mat expm_taylor(const Mat& m) {
  MatL a = m.cast<long double>();
  long double norm = 0.0L;
  for (Index j = 0; j < a.cols(); ++j) norm = std::max(norm, a.col(j).cwiseAbs().sum());
  int s = 0;
  while (norm > 0.5L) {
    norm /= 2.0L;
    ++s;
  }
  a /= std::ldexp(1.0L, s);
  MatL result = MatL::Identity(a.rows(), a.cols());
  MatL term = MatL::Identity(a.rows(), a.cols());
  for (int k = 1; k <= 30; ++k) {
    term = (term * a) / static_cast<long double>(k);
    result += term;
  }
  for (int i = 0; i < s; ++i) result = result * result;
  return result.cast<double>();
}

inline long double phi_scalar_ld(long double z) {
  if (z == 0.0L) return 1.0L;
  return std::expm1(z) / z;
}

// t phi(-t A) b for symmetric A through its eigendecomposition, in long
// double.
inline Vec phi_eig(const Mat& a, double t, const Vec& b) {
  const Eigen::SelfAdjointEigenSolver<MatL> eig(a.cast<long double>());
  const VecL c = eig.eigenvectors().transpose() * b.cast<long double>();
  VecL scaled(c.size());
  for (Index i = 0; i < c.size(); ++i) {
    scaled[i] = static_cast<long double>(t) * phi_scalar_ld(-static_cast<long double>(t) * eig.eigenvalues()[i]) * c[i];
  }
  return (eig.eigenvectors() * scaled).cast<double>();
}

// v + t phi(-tA)(g - Av) for symmetric A.
inline Vec solution_eig(const Mat& a, const Vec& v, const Vec& g, double t) { return v + phi_eig(a, t, g - a * v); }

inline double lambda_min_sym(const Mat& a) {
  const Mat s = 0.5 * (a + a.transpose());
  return Eigen::SelfAdjointEigenSolver<Mat>(s).eigenvalues().minCoeff();
}

// Central difference of f at t with step h.
template <typename F>
Vec central_difference(F&& f, double t, double h) {
  return (f(t + h) - f(t - h)) / (2.0 * h);
}

inline Vec random_vector(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> normal;
  Vec v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

inline Mat random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> normal;
  Mat m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

// Symmetric positive definite with smallest eigenvalue at least shift.
inline Mat random_spd(std::mt19937_64& rng, Index n, double shift) {
  const Mat m = random_matrix(rng, n, n);
  Mat a = m.transpose() * m / static_cast<double>(n);
  a.diagonal().array() += shift;
  return 0.5 * (a + a.transpose());
}

// Symmetric tridiagonal with diagonal in [0, diag_max] and off-diagonal in
// [0, off_max], shaped like a Lanczos matrix.
inline Mat random_sym_tridiagonal(std::mt19937_64& rng, Index k, double diag_max, double off_max) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Mat h = Mat::Zero(k, k);
  for (Index i = 0; i < k; ++i) h(i, i) = diag_max * u(rng);
  for (Index i = 0; i + 1 < k; ++i) h(i, i + 1) = h(i + 1, i) = off_max * u(rng);
  return h;
}

inline double rel_diff(const Vec& a, const Vec& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

}  // namespace testing_oracles
