#pragma once

#include <vector>

#include "operators.hpp"

namespace phicgc::krylov {

// Arnoldi (Lanczos for symmetric operators) decomposition
//   A V_k = V_{k+1} H_{k+1,k},   V(:,0) = gbar / beta.
// Storage is allocated for max_dim steps up front; only the leading k+1
// basis columns and the leading (k+1) x k block of the Hessenberg matrix
// are meaningful.
class ArnoldiDecomposition {
 public:
  ArnoldiDecomposition(const Vector& start, Index max_dim);

  // Restarts from a new start vector, reusing storage.
  void reset(const Vector& start);

  Index k() const { return k_; }
  Index max_dim() const { return max_dim_; }
  Index n() const { return basis_.rows(); }
  double beta() const { return beta_; }
  // Lucky breakdown: the Krylov subspace is invariant and h_{k+1,k} = 0.
  bool invariant() const { return invariant_; }

  // V_{k+1}
  auto basis() const { return basis_.leftCols(k_ + 1); }
  // H_{k+1,k}
  auto hessenberg() const { return hessenberg_.topLeftCorner(k_ + 1, k_); }
  // H_{k,k}
  DenseMatrix projected() const { return hessenberg_.topLeftCorner(k_, k_); }
  double h_next() const { return k_ == 0 ? 0.0 : hessenberg_(k_, k_ - 1); }
  auto next_basis_vector() const { return basis_.col(k_); }

 private:
  friend void arnoldi_extend(const LinearOperator& op, ArnoldiDecomposition& d);

  DenseMatrix basis_;
  DenseMatrix hessenberg_;
  double beta_ = 0.0;
  Index k_ = 0;
  Index max_dim_ = 0;
  bool invariant_ = false;
};

inline constexpr double kBreakdownTolerance = 1e-12;

// One Arnoldi step (three-term Lanczos recurrence for symmetric operators),
// followed by one full reorthogonalization pass. Consumes exactly one matvec.
void arnoldi_extend(const LinearOperator& op, ArnoldiDecomposition& d);

// u(t) = t phi(-t H_{k,k}) beta e_1.
Vector projected_solution(const ArnoldiDecomposition& d, double t);

// y_k(t) = v + V_k u(t). No matvecs.
Vector evaluate_iterate(const ArnoldiDecomposition& d, double t, const Vector& v);

// ||r_k(s)|| = |h_{k+1,k}| |e_k^T u(s)|. No matvecs.
double residual_norm(const ArnoldiDecomposition& d, double s);

// Largest delta in (0, T] with ||r_k(delta)|| <= abs_tol, resolved to
// relative 1e-3 by bisection in log(delta). Throws kNoProgress when the
// residual exceeds abs_tol already at T * 1e-12.
double find_delta(const ArnoldiDecomposition& d, double T, double abs_tol);

// max(0, lambda_min of the symmetric part of H_{k,k}).
double omega_ritz_estimate(const ArnoldiDecomposition& d);

// Geometric sample grid s_i = T 2^{-i}, i = 0..count-1, plus s = 0.
std::vector<double> residual_sample_times(double T, int count = 17);

struct ResidualProfile {
  std::vector<double> sample_times;
  std::vector<double> norms;
};
ResidualProfile residual_profile(const ArnoldiDecomposition& d, const std::vector<double>& sample_times);

struct SolveOptions {
  Index max_dim = 30;
  Index max_restarts = 10000;
  // Residual is checked every check_interval Arnoldi steps (and always at
  // max_dim).
  Index check_interval = 1;
  int sample_points = 17;
};

struct PhiSolveResult {
  Vector y;
  std::uint64_t matvecs = 0;
  Index restarts = 0;
  // Max over all checked sample times of the residual norm.
  double residual_bound = 0.0;
  double omega_ritz = 0.0;
  double beta = 0.0;
  double abs_tol = 0.0;
};

// y = v + T phi(-T A)(g - A v) by Krylov iteration with residual-time (RT)
// restarting. Stops once max_{s in [0,T]} ||r(s)|| <= beta rel_tol on the
// sample grid, beta = ||g - A v||. The g - A v matvec is skipped when v == 0.
PhiSolveResult phi_rt_solve(const LinearOperator& op, const Vector& v, const Vector& g, double T, double rel_tol,
                            const SolveOptions& options = {});

// Same contract, restarting by solving the error equation driven by the
// residual of the previous cycle (residual restarting).
PhiSolveResult residual_restart_solve(const LinearOperator& op, const Vector& v, const Vector& g, double T,
                                      double rel_tol, const SolveOptions& options = {});

}  // namespace phicgc::krylov
