#include "krylov.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "smallmat.hpp"

namespace phicgc::krylov {
namespace {

bool is_zero(const Vector& v) { return (v.array() == 0.0).all(); }

// Largest sample time whose residual exceeds abs_tol, or 0 if none does.
template <typename ResidualFn>
double largest_violation(ResidualFn&& residual, double horizon, int sample_points, double abs_tol, double& max_seen) {
  double worst = 0.0;
  for (double s : residual_sample_times(horizon, sample_points)) {
    if (s == 0.0) continue;
    const double r = residual(s);
    max_seen = std::max(max_seen, r);
    if (r > abs_tol) worst = std::max(worst, s);
  }
  return worst;
}

// Shrinks delta until the sampled residual on [0, delta] stays under
// abs_tol. Returns the accepted delta and the sampled maximum.
template <typename ResidualFn>
double accept_interval(ResidualFn&& residual, double delta, int sample_points, double abs_tol, double& max_seen) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    double seen = 0.0;
    const double worst = largest_violation(residual, delta, sample_points, abs_tol, seen);
    if (worst == 0.0) {
      max_seen = std::max(max_seen, seen);
      return delta;
    }
    delta = 0.5 * worst;
  }
  fail(ErrorCode::kNoProgress, "residual is not controllable on any sampled subinterval");
}

void validate_solve_inputs(const LinearOperator& op, const Vector& v, const Vector& g, double T, double rel_tol,
                           const SolveOptions& options) {
  require(v.size() == op.dim() && g.size() == op.dim(), ErrorCode::kDimensionMismatch,
          "phi solve: vector length does not match operator dimension");
  require(T > 0.0 && std::isfinite(T), ErrorCode::kInvalidArgument, "phi solve: T must be positive");
  require(rel_tol > 0.0 && std::isfinite(rel_tol), ErrorCode::kInvalidArgument, "phi solve: rel_tol must be positive");
  require(options.max_dim >= 1, ErrorCode::kInvalidArgument, "phi solve: max_dim must be at least 1");
  require(options.check_interval >= 1, ErrorCode::kInvalidArgument, "phi solve: check_interval must be >= 1");
}

bool should_check(const ArnoldiDecomposition& d, const SolveOptions& options) {
  return d.k() == d.max_dim() || d.k() % options.check_interval == 0;
}

}  // namespace

ArnoldiDecomposition::ArnoldiDecomposition(const Vector& start, Index max_dim)
    : basis_(start.size(), max_dim + 1), hessenberg_(max_dim + 1, max_dim), max_dim_(max_dim) {
  require(max_dim >= 1, ErrorCode::kInvalidArgument, "arnoldi: max_dim must be at least 1");
  reset(start);
}

void ArnoldiDecomposition::reset(const Vector& start) {
  require(start.size() == basis_.rows(), ErrorCode::kDimensionMismatch, "arnoldi: start vector length changed");
  beta_ = start.norm();
  require(std::isfinite(beta_), ErrorCode::kNumericalRange, "arnoldi: start vector is not finite");
  hessenberg_.setZero();
  k_ = 0;
  invariant_ = beta_ == 0.0;
  if (invariant_)
    basis_.col(0).setZero();
  else
    basis_.col(0) = start / beta_;
}

void arnoldi_extend(const LinearOperator& op, ArnoldiDecomposition& d) {
  require(op.dim() == d.n(), ErrorCode::kDimensionMismatch, "arnoldi_extend: operator dimension mismatch");
  require(d.k_ < d.max_dim_, ErrorCode::kInvalidArgument, "arnoldi_extend: decomposition is full");
  require(!d.invariant_, ErrorCode::kInvalidArgument, "arnoldi_extend: decomposition is already invariant");
  const Index k = d.k_;
  auto& basis = d.basis_;
  auto& h = d.hessenberg_;

  auto w = basis.col(k + 1);
  op.apply(basis.col(k), w);

  if (op.symmetric()) {
    if (k > 0) {
      h(k - 1, k) = h(k, k - 1);
      w -= h(k - 1, k) * basis.col(k - 1);
    }
    h(k, k) = basis.col(k).dot(w);
    w -= h(k, k) * basis.col(k);
  } else {
    for (Index j = 0; j <= k; ++j) {
      h(j, k) = basis.col(j).dot(w);
      w -= h(j, k) * basis.col(j);
    }
  }

  // Reorthogonalization pass against the whole basis.
  const auto previous = basis.leftCols(k + 1);
  const Vector correction = previous.transpose() * w;
  w.noalias() -= previous * correction;
  h.col(k).head(k + 1) += correction;

  const double h_next = w.norm();
  const double h_norm = std::max(h.topLeftCorner(k + 1, k + 1).cwiseAbs().colwise().sum().maxCoeff(),
                                 h.col(k).head(k + 1).cwiseAbs().sum() + h_next);
  d.k_ = k + 1;
  if (h_next <= kBreakdownTolerance * h_norm) {
    h(k + 1, k) = 0.0;
    w.setZero();
    d.invariant_ = true;
    return;
  }
  h(k + 1, k) = h_next;
  w /= h_next;
}

Vector projected_solution(const ArnoldiDecomposition& d, double t) {
  require(d.k() >= 1, ErrorCode::kInvalidArgument, "projected solution needs k >= 1");
  return smallmat::phi_action(d.projected(), t, d.beta(), std::max<Index>(smallmat::kDefaultSizeCap, d.k()));
}

Vector evaluate_iterate(const ArnoldiDecomposition& d, double t, const Vector& v) {
  require(t >= 0.0, ErrorCode::kInvalidArgument, "evaluate_iterate: t must be nonnegative");
  require(v.size() == d.n(), ErrorCode::kDimensionMismatch, "evaluate_iterate: vector length mismatch");
  if (t == 0.0 || d.k() == 0) return v;
  const Vector u = projected_solution(d, t);
  Vector y = v;
  y.noalias() += d.basis().leftCols(d.k()) * u;
  return y;
}

double residual_norm(const ArnoldiDecomposition& d, double s) {
  require(s >= 0.0, ErrorCode::kInvalidArgument, "residual_norm: s must be nonnegative");
  if (s == 0.0 || d.invariant() || d.k() == 0) return 0.0;
  const Vector u = projected_solution(d, s);
  return std::abs(d.h_next()) * std::abs(u[d.k() - 1]);
}

double find_delta(const ArnoldiDecomposition& d, double T, double abs_tol) {
  require(abs_tol > 0.0, ErrorCode::kInvalidArgument, "find_delta: abs_tol must be positive");
  require(d.k() >= 1, ErrorCode::kInvalidArgument, "find_delta: needs k >= 1");
  require(T > 0.0, ErrorCode::kInvalidArgument, "find_delta: T must be positive");
  if (residual_norm(d, T) <= abs_tol) return T;
  double lo = T * 1e-12;
  require(residual_norm(d, lo) <= abs_tol, ErrorCode::kNoProgress,
          "find_delta: residual exceeds tolerance already at T*1e-12; subspace too small for this step");
  double hi = T;
  while (hi > lo * (1.0 + 1e-3)) {
    const double mid = std::sqrt(lo * hi);
    if (residual_norm(d, mid) <= abs_tol)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double omega_ritz_estimate(const ArnoldiDecomposition& d) {
  require(d.k() >= 1, ErrorCode::kInvalidArgument, "omega_ritz_estimate: needs k >= 1");
  const DenseMatrix h = d.projected();
  const DenseMatrix sym = 0.5 * (h + h.transpose());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(sym, Eigen::EigenvaluesOnly);
  return std::max(0.0, eig.eigenvalues().minCoeff());
}

std::vector<double> residual_sample_times(double T, int count) {
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(count) + 1);
  times.push_back(0.0);
  for (int i = count - 1; i >= 0; --i) times.push_back(std::ldexp(T, -i));
  return times;
}

ResidualProfile residual_profile(const ArnoldiDecomposition& d, const std::vector<double>& sample_times) {
  ResidualProfile p{sample_times, {}};
  p.norms.reserve(sample_times.size());
  for (double s : sample_times) p.norms.push_back(residual_norm(d, s));
  return p;
}

PhiSolveResult phi_rt_solve(const LinearOperator& op, const Vector& v, const Vector& g, double T, double rel_tol,
                            const SolveOptions& options) {
  validate_solve_inputs(op, v, g, T, rel_tol, options);
  const std::uint64_t matvecs_before = op.matvec_count();
  PhiSolveResult result;
  result.y = v;

  Vector gbar = is_zero(v) ? g : Vector(g - op.apply(v));
  result.beta = gbar.norm();
  result.abs_tol = result.beta * rel_tol;
  if (result.beta == 0.0) {
    result.matvecs = op.matvec_count() - matvecs_before;
    return result;
  }

  double remaining = T;
  ArnoldiDecomposition d(gbar, std::min<Index>(options.max_dim, op.dim()));
  for (;;) {
    bool converged = d.invariant();
    while (!converged && d.k() < d.max_dim()) {
      arnoldi_extend(op, d);
      if (d.invariant()) {
        converged = true;
      } else if (should_check(d, options) && residual_norm(d, remaining) <= result.abs_tol) {
        double seen = 0.0;
        const auto residual = [&](double s) { return residual_norm(d, s); };
        converged = largest_violation(residual, remaining, options.sample_points, result.abs_tol, seen) == 0.0;
        if (converged) result.residual_bound = std::max(result.residual_bound, seen);
      }
    }
    if (d.k() >= 1) result.omega_ritz = omega_ritz_estimate(d);
    if (converged) {
      result.y = evaluate_iterate(d, remaining, result.y);
      break;
    }

    const auto residual = [&](double s) { return residual_norm(d, s); };
    double delta = find_delta(d, remaining, result.abs_tol);
    delta = accept_interval(residual, delta, options.sample_points, result.abs_tol, result.residual_bound);
    result.y = evaluate_iterate(d, delta, result.y);
    if (delta >= remaining) break;
    remaining -= delta;

    ++result.restarts;
    require(result.restarts <= options.max_restarts, ErrorCode::kBudgetExceeded,
            "phi_rt_solve: restart budget of " + std::to_string(options.max_restarts) + " exceeded");
    gbar = g - op.apply(result.y);
    d.reset(gbar);
  }
  result.matvecs = op.matvec_count() - matvecs_before;
  return result;
}

PhiSolveResult residual_restart_solve(const LinearOperator& op, const Vector& v, const Vector& g, double T,
                                      double rel_tol, const SolveOptions& options) {
  validate_solve_inputs(op, v, g, T, rel_tol, options);
  constexpr Index kMaxCoupledSize = 1200;
  const std::uint64_t matvecs_before = op.matvec_count();
  PhiSolveResult result;
  result.y = v;

  const Vector gbar = is_zero(v) ? g : Vector(g - op.apply(v));
  result.beta = gbar.norm();
  result.abs_tol = result.beta * rel_tol;
  if (result.beta == 0.0) {
    result.matvecs = op.matvec_count() - matvecs_before;
    return result;
  }

  // Coupled projected system z' = -K z + beta e_1 over all completed cycles.
  // Block c is driven by the residual of block c-1 through the entry
  // K(first row of c, last column of c-1) = h_{k+1,k} of cycle c-1.
  DenseMatrix completed(0, 0);
  double coupling = 0.0;
  ArnoldiDecomposition d(gbar, std::min<Index>(options.max_dim, op.dim()));

  const auto assemble = [&]() {
    const Index offset = completed.rows();
    const Index size = offset + d.k();
    require(size <= kMaxCoupledSize, ErrorCode::kBudgetExceeded,
            "residual_restart_solve: coupled projected system exceeds " + std::to_string(kMaxCoupledSize));
    DenseMatrix k_mat = DenseMatrix::Zero(size, size);
    k_mat.topLeftCorner(offset, offset) = completed;
    k_mat.bottomRightCorner(d.k(), d.k()) = d.projected();
    if (offset > 0) k_mat(offset, offset - 1) = coupling;
    return k_mat;
  };
  const auto coupled_solution = [&](const DenseMatrix& k_mat, double s) {
    Vector rhs = Vector::Zero(k_mat.rows());
    rhs[0] = result.beta;
    return smallmat::phi_action(k_mat, s, rhs, k_mat.rows());
  };

  for (;;) {
    bool converged = d.invariant();
    DenseMatrix k_mat;
    const auto residual = [&](double s) {
      if (s == 0.0 || d.invariant()) return 0.0;
      const Vector z = coupled_solution(k_mat, s);
      return std::abs(d.h_next()) * std::abs(z[z.size() - 1]);
    };
    while (!converged && d.k() < d.max_dim()) {
      arnoldi_extend(op, d);
      if (d.invariant()) {
        converged = true;
      } else if (should_check(d, options)) {
        k_mat = assemble();
        if (residual(T) <= result.abs_tol) {
          double seen = 0.0;
          converged = largest_violation(residual, T, options.sample_points, result.abs_tol, seen) == 0.0;
          if (converged) result.residual_bound = std::max(result.residual_bound, seen);
        }
      }
    }
    k_mat = assemble();
    if (d.k() >= 1) result.omega_ritz = omega_ritz_estimate(d);

    const Vector z = coupled_solution(k_mat, T);
    const Index offset = completed.rows();
    result.y.noalias() += d.basis().leftCols(d.k()) * z.segment(offset, d.k());
    if (converged) break;

    ++result.restarts;
    require(result.restarts <= options.max_restarts, ErrorCode::kBudgetExceeded,
            "residual_restart_solve: restart budget exceeded");
    completed = std::move(k_mat);
    coupling = d.h_next();
    d.reset(Vector(d.next_basis_vector()));
  }
  result.matvecs = op.matvec_count() - matvecs_before;
  return result;
}

}  // namespace phicgc::krylov
