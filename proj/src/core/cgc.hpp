#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "krylov.hpp"
#include "operators.hpp"
#include "transfer.hpp"

// Coarse grid correction for phi-function actions.
//
// The source gbar = g - A v is split as gbar = Q g~ + g^ with g~ = Q^T gbar.
// The smooth part is propagated on the coarse grid (recursively for more
// than two levels), the remainder on the fine grid with the relative
// tolerance scaled by beta / beta^, so that every solve on every level works
// to the same absolute residual threshold beta_root * tol_root.
namespace phicgc::cgc {

struct Level {
  std::shared_ptr<const LinearOperator> op;
  transfer::GridSpec grid;
  // Q from this level to the next finer one; absent on level 1.
  std::optional<transfer::TransferOperator> transfer_to_finer;
  double omega = 0.0;
};

// Level 0 is the finest grid. Validated on construction.
class GridHierarchy {
 public:
  explicit GridHierarchy(std::vector<Level> levels);

  Index depth() const { return static_cast<Index>(levels_.size()); }
  const Level& level(Index j) const { return levels_.at(j); }
  const LinearOperator& op(Index j) const { return *levels_.at(j).op; }
  // Q_j: prolongation from level j+1 to level j.
  const transfer::TransferOperator& prolongation(Index j) const { return *levels_.at(j + 1).transfer_to_finer; }
  double omega_min(Index num_levels) const;

 private:
  std::vector<Level> levels_;
};

enum class CoarseSolver { kPhiRt, kResidualRestart };
// Which omega enters the coarse error estimate of a level pair.
enum class OmegaSource { kHierarchy, kRitz, kZero };

struct CgcConfig {
  double rel_tol = 1e-8;
  Index num_levels = 2;
  Index krylov_max_dim = 30;
  CoarseSolver coarse_solver = CoarseSolver::kPhiRt;
  bool estimate_enabled = true;
  OmegaSource omega_source = OmegaSource::kHierarchy;
  // Test hook: multiplies every coarse tolerance. Anything other than 1
  // breaks the tolerance identity on purpose.
  double coarse_tolerance_skew = 1.0;
};

struct LevelReport {
  // Solver matvecs charged to this level (the gbar matvec included).
  std::uint64_t matvecs = 0;
  // Norm of the vector the level's own phi solve was applied to: beta^ on
  // levels that split, beta~ on the coarsest one.
  double beta = 0.0;
  double effective_rel_tol = 0.0;
  bool solved = false;
  double residual_bound = 0.0;
  // Estimate of the correction error introduced by coarsening below this
  // level; absent on the coarsest level.
  std::optional<double> coarse_error_estimate;
  double omega_used = 0.0;
};

struct CgcReport {
  std::vector<LevelReport> levels;
  double beta_root = 0.0;
  double rel_tol_root = 0.0;
  double total_estimate = 0.0;
  // Matvecs spent on the estimates, not included in the per-level counts.
  std::uint64_t estimate_matvecs = 0;

  std::uint64_t total_matvecs() const;
  // max over levels of |beta_j tol_j - beta_root tol_root| / (beta_root tol_root)
  double tolerance_identity_defect() const;
};

struct CgcResult {
  Vector y;
  CgcReport report;
};

CgcResult cgc_multigrid(const GridHierarchy& h, const Vector& v, const Vector& g, double t, const CgcConfig& cfg);

CgcResult cgc_two_grid(std::shared_ptr<const LinearOperator> fine, std::shared_ptr<const LinearOperator> coarse,
                       const transfer::TransferOperator& q, const Vector& v, const Vector& g, double t, double rel_tol,
                       const CgcConfig& cfg = {});

// t phi(-t omega) || Q (A~ y~) - A (Q y~) ||. One coarse and one fine matvec.
double coarse_error_estimate(const LinearOperator& fine, const LinearOperator& coarse,
                             const transfer::TransferOperator& q, const Vector& coarse_solution, double t,
                             double omega);

// ||Q A~ - A Q||_2 by power iteration on the normal map. Diagnostics only.
double commutator_norm_estimate(const LinearOperator& fine, const LinearOperator& coarse,
                                const transfer::TransferOperator& q, double rel_tol = 1e-3);

// Galerkin coarse operator x -> Q^T A Q x. Extension for operators that
// come without a grid to rediscretize on.
std::shared_ptr<const LinearOperator> galerkin_operator(std::shared_ptr<const LinearOperator> fine,
                                                        const transfer::TransferOperator& q);

// Failure inside a CGC solve, attributed to a level (0 = finest).
class LevelError : public Error {
 public:
  LevelError(const Error& cause, Index level);
  Index level() const { return level_; }

 private:
  Index level_;
};

}  // namespace phicgc::cgc
