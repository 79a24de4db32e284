#include "oracle.hpp"

#include <Eigen/Eigenvalues>

#include "smallmat.hpp"

namespace phicgc::oracle {
namespace {

void check_dense_inputs(const DenseMatrix& a, const Vector& v, const Vector& g, double t) {
  require(a.rows() == a.cols(), ErrorCode::kDimensionMismatch, "dense reference: matrix must be square");
  require(a.rows() <= kDenseCap, ErrorCode::kInvalidArgument,
          "dense reference: dimension " + std::to_string(a.rows()) + " exceeds cap " + std::to_string(kDenseCap));
  require(v.size() == a.rows() && g.size() == a.rows(), ErrorCode::kDimensionMismatch,
          "dense reference: vector length mismatch");
  require(t >= 0.0, ErrorCode::kInvalidArgument, "dense reference: t must be nonnegative");
}

}  // namespace

Vector dense_phi_reference(const DenseMatrix& a, const Vector& v, const Vector& g, double t) {
  check_dense_inputs(a, v, g, t);
  const Vector gbar = g - a * v;
  return v + smallmat::phi_action(a, t, gbar, kDenseCap);
}

Vector dense_phi_reference_eig(const DenseMatrix& a, const Vector& v, const Vector& g, double t) {
  check_dense_inputs(a, v, g, t);
  require((a - a.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()),
          ErrorCode::kInvalidArgument, "eigen reference: matrix is not symmetric");
  const Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(a);
  const Vector c = eig.eigenvectors().transpose() * (g - a * v);
  Vector scaled(c.size());
  for (Index i = 0; i < c.size(); ++i) scaled[i] = t * smallmat::phi_scalar(-t * eig.eigenvalues()[i]) * c[i];
  return v + eig.eigenvectors() * scaled;
}

Vector reference_solution(const problems::HeatProblem& p, double t, const ReferenceOptions& options) {
  require(t >= 0.0, ErrorCode::kInvalidArgument, "reference_solution: t must be nonnegative");
  if (t == 0.0) return p.v;
  krylov::SolveOptions so;
  so.max_dim = options.max_dim;
  so.check_interval = options.check_interval;
  return krylov::phi_rt_solve(*p.op, p.v, p.g, t, options.rel_tol, so).y;
}

double relative_error(const Vector& y, const Vector& y_ref) {
  require(y.size() == y_ref.size(), ErrorCode::kDimensionMismatch, "relative_error: length mismatch");
  const double denom = y_ref.norm();
  require(denom > 0.0, ErrorCode::kInvalidArgument, "relative_error: reference vector is zero");
  return (y - y_ref).norm() / denom;
}

}  // namespace phicgc::oracle
