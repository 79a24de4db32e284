#include "cgc.hpp"

#include <algorithm>
#include <cmath>

#include "smallmat.hpp"

namespace phicgc::cgc {
namespace {

bool is_zero(const Vector& v) { return (v.array() == 0.0).all(); }

class ComposedOperator final : public LinearOperator {
 public:
  ComposedOperator(std::shared_ptr<const LinearOperator> fine, const transfer::TransferOperator& q)
      : LinearOperator(q.coarse_size(), Kind::kComposed, fine->symmetric(), std::nullopt),
        fine_(std::move(fine)),
        q_(q) {
    require(fine_->dim() == q_.fine_size(), ErrorCode::kDimensionMismatch,
            "galerkin operator: transfer does not match the fine operator");
  }

 protected:
  void do_apply(ConstVectorRef x, VectorRef y) const override { y = q_.restrict(fine_->apply(q_.prolong(x))); }
  void do_apply_transpose(ConstVectorRef x, VectorRef y) const override {
    Vector qx = q_.prolong(x);
    Vector aqx(qx.size());
    fine_->apply_transpose(qx, aqx);
    y = q_.restrict(aqx);
  }

 private:
  std::shared_ptr<const LinearOperator> fine_;
  transfer::TransferOperator q_;
};

krylov::PhiSolveResult phi_solve(const LinearOperator& op, const Vector& v, const Vector& g, double t, double rel_tol,
                                 const CgcConfig& cfg) {
  krylov::SolveOptions options;
  options.max_dim = cfg.krylov_max_dim;
  if (cfg.coarse_solver == CoarseSolver::kResidualRestart) return krylov::residual_restart_solve(op, v, g, t, rel_tol, options);
  return krylov::phi_rt_solve(op, v, g, t, rel_tol, options);
}

struct Context {
  const GridHierarchy& hierarchy;
  const CgcConfig& cfg;
  CgcReport& report;
  double t;
};

Vector solve_level(const Context& ctx, Index j, const Vector& v, const Vector& g, double rel_tol);

Vector solve_level_attributed(const Context& ctx, Index j, const Vector& v, const Vector& g, double rel_tol) {
  try {
    return solve_level(ctx, j, v, g, rel_tol);
  } catch (const LevelError&) {
    throw;
  } catch (const Error& e) {
    throw LevelError(e, j);
  }
}

void record_solve(LevelReport& lr, const krylov::PhiSolveResult& res, double rel_tol) {
  lr.matvecs += res.matvecs;
  lr.beta = res.beta;
  lr.effective_rel_tol = rel_tol;
  lr.residual_bound = res.residual_bound;
  lr.solved = true;
}

Vector solve_level(const Context& ctx, Index j, const Vector& v, const Vector& g, double rel_tol) {
  const LinearOperator& a = ctx.hierarchy.op(j);
  LevelReport& lr = ctx.report.levels[j];
  const double t = ctx.t;

  if (j == ctx.cfg.num_levels - 1) {
    const auto res = phi_solve(a, v, g, t, rel_tol, ctx.cfg);
    record_solve(lr, res, rel_tol);
    if (j == 0) ctx.report.beta_root = res.beta;
    return res.y;
  }

  const std::uint64_t before = a.matvec_count();
  const Vector gbar = is_zero(v) ? g : Vector(g - a.apply(v));
  lr.matvecs += a.matvec_count() - before;
  const double beta = gbar.norm();
  if (j == 0) ctx.report.beta_root = beta;
  if (beta == 0.0) return v;

  const transfer::TransferOperator& q = ctx.hierarchy.prolongation(j);
  const transfer::VectorSplit split = transfer::split_vector(q, gbar);

  Vector coarse_y = Vector::Zero(q.coarse_size());
  if (split.beta_coarse > 0.0) {
    const double coarse_tol = (beta / split.beta_coarse) * rel_tol * ctx.cfg.coarse_tolerance_skew;
    coarse_y = solve_level_attributed(ctx, j + 1, Vector::Zero(q.coarse_size()), split.coarse, coarse_tol);
  }

  Vector y = v;
  double ritz = 0.0;
  if (split.beta_remainder > 0.0) {
    const double fine_tol = (beta / split.beta_remainder) * rel_tol;
    const auto res = phi_solve(a, Vector::Zero(a.dim()), split.remainder, t, fine_tol, ctx.cfg);
    record_solve(lr, res, fine_tol);
    ritz = res.omega_ritz;
    y += res.y;
  }
  y += q.prolong(coarse_y);

  if (ctx.cfg.estimate_enabled && split.beta_coarse > 0.0) {
    double omega = 0.0;
    switch (ctx.cfg.omega_source) {
      case OmegaSource::kHierarchy: omega = ctx.hierarchy.level(j).omega; break;
      case OmegaSource::kRitz: omega = ritz; break;
      case OmegaSource::kZero: omega = 0.0; break;
    }
    const LinearOperator& coarse = ctx.hierarchy.op(j + 1);
    const std::uint64_t fine_before = a.matvec_count();
    const std::uint64_t coarse_before = coarse.matvec_count();
    lr.coarse_error_estimate = coarse_error_estimate(a, coarse, q, coarse_y, t, omega);
    lr.omega_used = omega;
    ctx.report.estimate_matvecs += (a.matvec_count() - fine_before) + (coarse.matvec_count() - coarse_before);
  }
  return y;
}

}  // namespace

GridHierarchy::GridHierarchy(std::vector<Level> levels) : levels_(std::move(levels)) {
  require(!levels_.empty(), ErrorCode::kInvalidArgument, "hierarchy needs at least one level");
  for (std::size_t j = 0; j < levels_.size(); ++j) {
    const Level& l = levels_[j];
    require(l.op != nullptr, ErrorCode::kInvalidArgument, "hierarchy level without operator");
    require(l.op->dim() == l.grid.size(), ErrorCode::kDimensionMismatch,
            "hierarchy level " + std::to_string(j) + ": operator dimension differs from grid size");
    require(l.omega >= 0.0, ErrorCode::kInvalidArgument, "hierarchy omega must be nonnegative");
    if (j == 0) {
      require(!l.transfer_to_finer, ErrorCode::kInvalidArgument, "finest level must not have a transfer operator");
    } else {
      require(l.transfer_to_finer.has_value(), ErrorCode::kInvalidArgument,
              "level " + std::to_string(j) + " lacks a transfer to the finer level");
      require(l.transfer_to_finer->fine() == levels_[j - 1].grid && l.transfer_to_finer->coarse() == l.grid,
              ErrorCode::kDimensionMismatch, "level " + std::to_string(j) + ": transfer grids do not match");
    }
  }
}

double GridHierarchy::omega_min(Index num_levels) const {
  require(num_levels >= 1 && num_levels <= depth(), ErrorCode::kInvalidArgument, "omega_min: bad level count");
  double w = levels_[0].omega;
  for (Index j = 1; j < num_levels; ++j) w = std::min(w, levels_[j].omega);
  return w;
}

std::uint64_t CgcReport::total_matvecs() const {
  std::uint64_t total = 0;
  for (const LevelReport& l : levels) total += l.matvecs;
  return total;
}

double CgcReport::tolerance_identity_defect() const {
  const double target = beta_root * rel_tol_root;
  double worst = 0.0;
  for (const LevelReport& l : levels) {
    if (!l.solved || l.beta == 0.0) continue;
    worst = std::max(worst, std::abs(l.beta * l.effective_rel_tol - target) / target);
  }
  return worst;
}

LevelError::LevelError(const Error& cause, Index level)
    : Error(cause.code(), "level " + std::to_string(level + 1) + ": " + cause.what()), level_(level) {}

CgcResult cgc_multigrid(const GridHierarchy& h, const Vector& v, const Vector& g, double t, const CgcConfig& cfg) {
  require(cfg.num_levels >= 1 && cfg.num_levels <= h.depth(), ErrorCode::kInvalidArgument,
          "cgc: num_levels " + std::to_string(cfg.num_levels) + " exceeds hierarchy depth " +
              std::to_string(h.depth()));
  require(t > 0.0, ErrorCode::kInvalidArgument, "cgc: t must be positive");
  require(cfg.rel_tol > 0.0, ErrorCode::kInvalidArgument, "cgc: rel_tol must be positive");
  const LinearOperator& a = h.op(0);
  require(v.size() == a.dim() && g.size() == a.dim(), ErrorCode::kDimensionMismatch,
          "cgc: vector length does not match the finest operator");

  CgcResult result;
  result.report.levels.resize(static_cast<std::size_t>(cfg.num_levels));
  result.report.rel_tol_root = cfg.rel_tol;
  const Context ctx{h, cfg, result.report, t};
  result.y = solve_level_attributed(ctx, 0, v, g, cfg.rel_tol);
  for (const LevelReport& l : result.report.levels) {
    if (l.coarse_error_estimate) result.report.total_estimate += *l.coarse_error_estimate;
  }
  return result;
}

CgcResult cgc_two_grid(std::shared_ptr<const LinearOperator> fine, std::shared_ptr<const LinearOperator> coarse,
                       const transfer::TransferOperator& q, const Vector& v, const Vector& g, double t, double rel_tol,
                       const CgcConfig& cfg) {
  require(fine && coarse, ErrorCode::kInvalidArgument, "cgc_two_grid: null operator");
  std::vector<Level> levels(2);
  levels[0].op = fine;
  levels[0].grid = q.fine();
  levels[0].omega = fine->omega_hint().value_or(0.0);
  levels[1].op = coarse;
  levels[1].grid = q.coarse();
  levels[1].transfer_to_finer = q;
  levels[1].omega = coarse->omega_hint().value_or(0.0);
  const GridHierarchy h(std::move(levels));
  CgcConfig c = cfg;
  c.num_levels = 2;
  c.rel_tol = rel_tol;
  return cgc_multigrid(h, v, g, t, c);
}

double coarse_error_estimate(const LinearOperator& fine, const LinearOperator& coarse,
                             const transfer::TransferOperator& q, const Vector& coarse_solution, double t,
                             double omega) {
  require(coarse_solution.size() == coarse.dim() && coarse.dim() == q.coarse_size() && fine.dim() == q.fine_size(),
          ErrorCode::kDimensionMismatch, "coarse_error_estimate: dimension mismatch");
  require(omega >= 0.0, ErrorCode::kInvalidArgument, "coarse_error_estimate: omega must be nonnegative");
  if (is_zero(coarse_solution)) return 0.0;
  const Vector commutator = q.prolong(coarse.apply(coarse_solution)) - fine.apply(q.prolong(coarse_solution));
  return t * smallmat::phi_scalar(-t * omega) * commutator.norm();
}

double commutator_norm_estimate(const LinearOperator& fine, const LinearOperator& coarse,
                                const transfer::TransferOperator& q, double rel_tol) {
  require(coarse.dim() == q.coarse_size() && fine.dim() == q.fine_size(), ErrorCode::kDimensionMismatch,
          "commutator_norm_estimate: dimension mismatch");
  const auto normal = [&](const Vector& x) {
    const Vector cx = q.prolong(coarse.apply(x)) - fine.apply(q.prolong(x));
    Vector qt_cx = q.restrict(cx);
    Vector left(coarse.dim());
    coarse.apply_transpose(qt_cx, left);
    Vector at_cx(fine.dim());
    fine.apply_transpose(cx, at_cx);
    return Vector(left - q.restrict(at_cx));
  };
  return transfer::largest_singular_value(coarse.dim(), normal, rel_tol);
}

std::shared_ptr<const LinearOperator> galerkin_operator(std::shared_ptr<const LinearOperator> fine,
                                                        const transfer::TransferOperator& q) {
  require(fine != nullptr, ErrorCode::kInvalidArgument, "galerkin_operator: null operator");
  return std::make_shared<ComposedOperator>(std::move(fine), q);
}

}  // namespace phicgc::cgc
