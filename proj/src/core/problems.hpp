#pragma once

#include <memory>

#include "cgc.hpp"
#include "operators.hpp"
#include "transfer.hpp"

// Heat-equation test problems y' = -A y + g, y(0) = v, with A the negative
// second-order finite-difference Laplacian.
namespace phicgc::problems {

struct HeatProblem {
  std::shared_ptr<const LinearOperator> op;
  Vector v;
  Vector g;
  double T = 0.0;
  double rel_tol = 0.0;
  transfer::GridSpec grid;
  // Smallest eigenvalue of A (0 for the periodic problem).
  double omega = 0.0;
};

// Periodic 1D heat on n nodes x_i = i/(n+1): v = 1,
// g = exp(-500 (x - 0.5)^2), T = 0.01, tol = 1e-8.
HeatProblem heat1d(Index n);

// Dirichlet 3D heat: v = 0, g = exp(-50(x-.5)^2 - 100(y-.5)^2 - 50(z-.5)^2),
// T = 0.1, tol = 1e-5. The operator is a matrix-free stencil unless
// assemble_csr is set.
HeatProblem heat3d(Index nx, Index ny, Index nz, bool assemble_csr = false);

// -Laplacian on the grid: CSR for 1D periodic grids, stencil for 3D
// Dirichlet grids (CSR on request).
std::shared_ptr<const LinearOperator> laplacian_operator(const transfer::GridSpec& grid, bool assemble_csr = false);

// Smallest eigenvalue of the discrete -Laplacian on the grid.
double laplacian_omega(const transfer::GridSpec& grid);

// Level j has extents divided by 2^j, a rediscretized operator and the
// transfer to level j-1.
cgc::GridHierarchy build_hierarchy(const HeatProblem& p, Index num_levels, transfer::InterpolationMethod method,
                                   transfer::Scaling scaling = transfer::Scaling::kBalanced);

}  // namespace phicgc::problems
