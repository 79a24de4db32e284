#include "problems.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "parallel.hpp"

namespace phicgc::problems {
namespace {

using transfer::Boundary;
using transfer::GridSpec;

std::shared_ptr<const LinearOperator> periodic_laplacian_1d(Index n) {
  const double h = 1.0 / static_cast<double>(n + 1);
  const double c = 1.0 / (h * h);
  std::vector<SparseMatrixCsr::Triplet> entries;
  entries.reserve(static_cast<std::size_t>(3 * n));
  for (Index i = 0; i < n; ++i) {
    entries.push_back({i, (i + n - 1) % n, -c});
    entries.push_back({i, i, 2.0 * c});
    entries.push_back({i, (i + 1) % n, -c});
  }
  return std::make_shared<CsrOperator>(SparseMatrixCsr::from_triplets(n, n, entries), true, 0.0);
}

struct Stencil3d {
  std::array<Index, 3> n;
  std::array<double, 3> c;  // 1 / h^2 per axis

  void apply(ConstVectorRef x, VectorRef y) const {
    const Index nx = n[0], ny = n[1], nz = n[2];
    const Index sy = nx, sz = nx * ny;
    const double diag = 2.0 * (c[0] + c[1] + c[2]);
    const double* xp = x.data();
    double* yp = y.data();
#if defined(PHICGC_HAVE_OPENMP)
#pragma omp parallel for num_threads(thread_cap()) if (nx * ny * nz > 20000)
#endif
    for (Index k = 0; k < nz; ++k) {
      for (Index j = 0; j < ny; ++j) {
        const Index row = k * sz + j * sy;
        const double* xr = xp + row;
        double* yr = yp + row;
        for (Index i = 0; i < nx; ++i) {
          double s = diag * xr[i];
          if (i > 0) s -= c[0] * xr[i - 1];
          if (i + 1 < nx) s -= c[0] * xr[i + 1];
          if (j > 0) s -= c[1] * xr[i - sy];
          if (j + 1 < ny) s -= c[1] * xr[i + sy];
          if (k > 0) s -= c[2] * xr[i - sz];
          if (k + 1 < nz) s -= c[2] * xr[i + sz];
          yr[i] = s;
        }
      }
    }
  }

  double one_norm() const {
    double norm = 0.0;
    for (int a = 0; a < 3; ++a) norm += (n[a] >= 3 ? 4.0 : 3.0) * c[a];
    return norm;
  }
};

SparseMatrixCsr assemble_stencil(const Stencil3d& s) {
  const Index nx = s.n[0], ny = s.n[1], nz = s.n[2];
  const Index dim = nx * ny * nz;
  std::vector<SparseMatrixCsr::Triplet> entries;
  entries.reserve(static_cast<std::size_t>(7 * dim));
  const double diag = 2.0 * (s.c[0] + s.c[1] + s.c[2]);
  for (Index k = 0; k < nz; ++k) {
    for (Index j = 0; j < ny; ++j) {
      for (Index i = 0; i < nx; ++i) {
        const Index r = i + nx * (j + ny * k);
        entries.push_back({r, r, diag});
        if (i > 0) entries.push_back({r, r - 1, -s.c[0]});
        if (i + 1 < nx) entries.push_back({r, r + 1, -s.c[0]});
        if (j > 0) entries.push_back({r, r - nx, -s.c[1]});
        if (j + 1 < ny) entries.push_back({r, r + nx, -s.c[1]});
        if (k > 0) entries.push_back({r, r - nx * ny, -s.c[2]});
        if (k + 1 < nz) entries.push_back({r, r + nx * ny, -s.c[2]});
      }
    }
  }
  return SparseMatrixCsr::from_triplets(dim, dim, entries);
}

std::shared_ptr<const LinearOperator> dirichlet_laplacian_3d(const GridSpec& grid, bool assemble_csr) {
  Stencil3d s{};
  for (int a = 0; a < 3; ++a) {
    s.n[a] = grid.extents[a];
    const double h = grid.spacing(a);
    s.c[a] = 1.0 / (h * h);
  }
  const double omega = laplacian_omega(grid);
  if (assemble_csr) return std::make_shared<CsrOperator>(assemble_stencil(s), true, omega);
  return std::make_shared<MatrixFreeOperator>(
      grid.size(), [s](ConstVectorRef x, VectorRef y) { s.apply(x, y); }, true, omega,
      [s] { return s.one_norm(); });
}

}  // namespace

double laplacian_omega(const GridSpec& grid) {
  if (grid.boundary == Boundary::kPeriodic) return 0.0;
  double omega = 0.0;
  for (Index a = 0; a < grid.dimensions(); ++a) {
    const double h = grid.spacing(a);
    const double s = std::sin(std::numbers::pi / (2.0 * static_cast<double>(grid.extents[a] + 1)));
    omega += 4.0 * s * s / (h * h);
  }
  return omega;
}

std::shared_ptr<const LinearOperator> laplacian_operator(const GridSpec& grid, bool assemble_csr) {
  grid.validate();
  if (grid.dimensions() == 1 && grid.boundary == Boundary::kPeriodic) return periodic_laplacian_1d(grid.extents[0]);
  if (grid.dimensions() == 3 && grid.boundary == Boundary::kDirichlet) return dirichlet_laplacian_3d(grid, assemble_csr);
  fail(ErrorCode::kUnsupported, "laplacian: only 1D periodic and 3D Dirichlet grids are supported");
}

HeatProblem heat1d(Index n) {
  require(n >= 4 && n % 2 == 0, ErrorCode::kInvalidArgument, "heat1d: n must be even and at least 4");
  HeatProblem p;
  p.grid = GridSpec{{n}, Boundary::kPeriodic};
  p.op = laplacian_operator(p.grid);
  p.v = Vector::Ones(n);
  p.g.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double x = p.grid.coordinate(0, i) - 0.5;
    p.g[i] = std::exp(-500.0 * x * x);
  }
  p.T = 0.01;
  p.rel_tol = 1e-8;
  p.omega = 0.0;
  return p;
}

HeatProblem heat3d(Index nx, Index ny, Index nz, bool assemble_csr) {
  for (Index e : {nx, ny, nz}) {
    require(e >= 4 && e % 2 == 0, ErrorCode::kInvalidArgument, "heat3d: extents must be even and at least 4");
  }
  HeatProblem p;
  p.grid = GridSpec{{nx, ny, nz}, Boundary::kDirichlet};
  p.op = laplacian_operator(p.grid, assemble_csr);
  p.v = Vector::Zero(p.grid.size());
  p.g.resize(p.grid.size());
  for (Index k = 0; k < nz; ++k) {
    const double z = p.grid.coordinate(2, k) - 0.5;
    for (Index j = 0; j < ny; ++j) {
      const double y = p.grid.coordinate(1, j) - 0.5;
      for (Index i = 0; i < nx; ++i) {
        const double x = p.grid.coordinate(0, i) - 0.5;
        p.g[i + nx * (j + ny * k)] = std::exp(-50.0 * x * x - 100.0 * y * y - 50.0 * z * z);
      }
    }
  }
  p.T = 0.1;
  p.rel_tol = 1e-5;
  p.omega = laplacian_omega(p.grid);
  return p;
}

cgc::GridHierarchy build_hierarchy(const HeatProblem& p, Index num_levels, transfer::InterpolationMethod method,
                                   transfer::Scaling scaling) {
  require(num_levels >= 1, ErrorCode::kInvalidArgument, "build_hierarchy: need at least one level");
  const bool csr = p.op->kind() == LinearOperator::Kind::kCsr;
  std::vector<cgc::Level> levels;
  levels.push_back(cgc::Level{p.op, p.grid, std::nullopt, p.omega});
  for (Index j = 1; j < num_levels; ++j) {
    const GridSpec fine = levels.back().grid;
    const GridSpec coarse = fine.coarsened();
    cgc::Level l;
    l.grid = coarse;
    l.op = laplacian_operator(coarse, csr);
    l.transfer_to_finer = transfer::TransferOperator::build(coarse, fine, method, scaling);
    l.omega = laplacian_omega(coarse);
    levels.push_back(std::move(l));
  }
  return cgc::GridHierarchy(std::move(levels));
}

}  // namespace phicgc::problems
