#pragma once

#include "krylov.hpp"
#include "operators.hpp"
#include "problems.hpp"

namespace phicgc::oracle {

inline constexpr Index kDenseCap = 512;

// y(t) = v + t phi(-tA)(g - Av) via the dense augmented exponential.
Vector dense_phi_reference(const DenseMatrix& a, const Vector& v, const Vector& g, double t);

// Same quantity through A = U diag(lambda) U^T. A must be symmetric.
Vector dense_phi_reference_eig(const DenseMatrix& a, const Vector& v, const Vector& g, double t);

struct ReferenceOptions {
  double rel_tol = 1e-13;
  Index max_dim = 100;
  // Residual checks every few Arnoldi steps; trades a few matvecs for fewer
  // small exponentials.
  Index check_interval = 1;
};

// Krylov solve of the problem on its own grid at a tight tolerance.
Vector reference_solution(const problems::HeatProblem& p, double t, const ReferenceOptions& options = {});

double relative_error(const Vector& y, const Vector& y_ref);

}  // namespace phicgc::oracle
