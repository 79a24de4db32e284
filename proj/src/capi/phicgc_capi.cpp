#include "phicgc/phicgc.h"

#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "bench.hpp"
#include "cgc.hpp"
#include "krylov.hpp"
#include "oracle.hpp"
#include "problems.hpp"

struct phicgc_operator {
  std::shared_ptr<const phicgc::LinearOperator> op;
};

struct phicgc_problem {
  phicgc::problems::HeatProblem p;
};

struct phicgc_hierarchy {
  phicgc::cgc::GridHierarchy h;
};

namespace {

using phicgc::ErrorCode;
using phicgc::Index;
using phicgc::Vector;

thread_local std::string last_error;

template <typename F>
phicgc_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return PHICGC_OK;
  } catch (const phicgc::Error& e) {
    last_error = e.what();
    return static_cast<phicgc_status>(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return PHICGC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return PHICGC_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown exception";
    return PHICGC_ERR_INTERNAL;
  }
}

void require_ptr(const void* p, const char* what) {
  phicgc::require(p != nullptr, ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

Vector copy_in(const double* x, Index n) { return Eigen::Map<const Vector>(x, n); }

void copy_out(const Vector& x, double* out) { std::memcpy(out, x.data(), sizeof(double) * static_cast<std::size_t>(x.size())); }

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

phicgc::transfer::InterpolationMethod to_method(phicgc_transfer_method m) {
  switch (m) {
    case PHICGC_TRANSFER_LINEAR: return phicgc::transfer::InterpolationMethod::kLinear;
    case PHICGC_TRANSFER_CUBIC_SPLINE: return phicgc::transfer::InterpolationMethod::kCubicSpline;
  }
  phicgc::fail(ErrorCode::kInvalidArgument, "unknown transfer method");
}

}  // namespace

extern "C" {

const char* phicgc_version(void) { return "0.1.0"; }

const char* phicgc_last_error(void) { return last_error.c_str(); }

const char* phicgc_status_string(phicgc_status status) {
  switch (status) {
    case PHICGC_OK: return "ok";
    case PHICGC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case PHICGC_ERR_DIMENSION_MISMATCH: return "dimension mismatch";
    case PHICGC_ERR_NUMERICAL_RANGE: return "numerical range";
    case PHICGC_ERR_NO_PROGRESS: return "no progress";
    case PHICGC_ERR_BUDGET_EXCEEDED: return "iteration budget exceeded";
    case PHICGC_ERR_ESTIMATOR_UNAVAILABLE: return "estimator unavailable";
    case PHICGC_ERR_IO: return "i/o error";
    case PHICGC_ERR_CONFIG: return "configuration error";
    case PHICGC_ERR_UNSUPPORTED: return "unsupported";
    case PHICGC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void phicgc_string_free(char* s) { delete[] s; }

phicgc_status phicgc_operator_create_csr(int64_t n, const int64_t* row_offsets, const int64_t* col_indices,
                                         const double* values, phicgc_operator** out) {
  return guard([&] {
    require_ptr(out, "out");
    require_ptr(row_offsets, "row_offsets");
    phicgc::require(n >= 1, ErrorCode::kInvalidArgument, "operator dimension must be positive");
    const int64_t nnz = row_offsets[n];
    phicgc::require(nnz >= 0, ErrorCode::kInvalidArgument, "negative entry count");
    if (nnz > 0) {
      require_ptr(col_indices, "col_indices");
      require_ptr(values, "values");
    }
    std::vector<Index> offsets(row_offsets, row_offsets + n + 1);
    std::vector<Index> cols(col_indices, col_indices + nnz);
    std::vector<double> vals(values, values + nnz);
    phicgc::SparseMatrixCsr m(n, n, std::move(offsets), std::move(cols), std::move(vals));
    *out = new phicgc_operator{std::make_shared<phicgc::CsrOperator>(std::move(m))};
  });
}

phicgc_status phicgc_operator_read_matrix_market(const char* path, phicgc_operator** out) {
  return guard([&] {
    require_ptr(path, "path");
    require_ptr(out, "out");
    auto m = phicgc::read_matrix_market(path);
    phicgc::require(m.n_rows() == m.n_cols(), ErrorCode::kDimensionMismatch, "matrix is not square");
    *out = new phicgc_operator{std::make_shared<phicgc::CsrOperator>(std::move(m))};
  });
}

phicgc_status phicgc_operator_write_matrix_market(const phicgc_operator* op, const char* path) {
  return guard([&] {
    require_ptr(op, "operator");
    require_ptr(path, "path");
    const auto* csr = dynamic_cast<const phicgc::CsrOperator*>(op->op.get());
    phicgc::require(csr != nullptr, ErrorCode::kUnsupported, "only CSR operators can be written");
    phicgc::write_matrix_market(csr->matrix(), path);
  });
}

void phicgc_operator_destroy(phicgc_operator* op) { delete op; }

phicgc_status phicgc_operator_dim(const phicgc_operator* op, int64_t* out) {
  return guard([&] {
    require_ptr(op, "operator");
    require_ptr(out, "out");
    *out = op->op->dim();
  });
}

phicgc_status phicgc_operator_apply(const phicgc_operator* op, const double* x, double* y) {
  return guard([&] {
    require_ptr(op, "operator");
    require_ptr(x, "x");
    require_ptr(y, "y");
    const Index n = op->op->dim();
    Eigen::Map<const Vector> xm(x, n);
    Eigen::Map<Vector> ym(y, n);
    op->op->apply(xm, ym);
  });
}

phicgc_status phicgc_operator_one_norm(const phicgc_operator* op, double* out) {
  return guard([&] {
    require_ptr(op, "operator");
    require_ptr(out, "out");
    *out = op->op->one_norm();
  });
}

phicgc_status phicgc_operator_matvec_count(const phicgc_operator* op, int reset, uint64_t* out) {
  return guard([&] {
    require_ptr(op, "operator");
    const uint64_t count = reset ? op->op->reset_matvec_count() : op->op->matvec_count();
    if (out) *out = count;
  });
}

phicgc_status phicgc_problem_heat1d(int64_t n, phicgc_problem** out) {
  return guard([&] {
    require_ptr(out, "out");
    *out = new phicgc_problem{phicgc::problems::heat1d(n)};
  });
}

phicgc_status phicgc_problem_heat3d(int64_t nx, int64_t ny, int64_t nz, phicgc_problem** out) {
  return guard([&] {
    require_ptr(out, "out");
    *out = new phicgc_problem{phicgc::problems::heat3d(nx, ny, nz)};
  });
}

void phicgc_problem_destroy(phicgc_problem* p) { delete p; }

phicgc_status phicgc_problem_info_get(const phicgc_problem* p, phicgc_problem_info* out) {
  return guard([&] {
    require_ptr(p, "problem");
    require_ptr(out, "out");
    *out = phicgc_problem_info{};
    out->dim = p->p.grid.size();
    out->rank = static_cast<int32_t>(p->p.grid.dimensions());
    for (Index a = 0; a < p->p.grid.dimensions(); ++a) out->extents[a] = p->p.grid.extents[a];
    out->T = p->p.T;
    out->rel_tol = p->p.rel_tol;
    out->omega = p->p.omega;
  });
}

phicgc_status phicgc_problem_vectors(const phicgc_problem* p, double* v, double* g) {
  return guard([&] {
    require_ptr(p, "problem");
    if (v) copy_out(p->p.v, v);
    if (g) copy_out(p->p.g, g);
  });
}

phicgc_status phicgc_problem_operator(const phicgc_problem* p, phicgc_operator** out) {
  return guard([&] {
    require_ptr(p, "problem");
    require_ptr(out, "out");
    *out = new phicgc_operator{p->p.op};
  });
}

phicgc_status phicgc_hierarchy_build(const phicgc_problem* p, int32_t levels, phicgc_transfer_method method,
                                     phicgc_hierarchy** out) {
  return guard([&] {
    require_ptr(p, "problem");
    require_ptr(out, "out");
    phicgc::require(levels >= 1 && levels <= PHICGC_MAX_LEVELS, ErrorCode::kInvalidArgument,
                    "levels must be in [1, " + std::to_string(PHICGC_MAX_LEVELS) + "]");
    *out = new phicgc_hierarchy{phicgc::problems::build_hierarchy(p->p, levels, to_method(method))};
  });
}

void phicgc_hierarchy_destroy(phicgc_hierarchy* h) { delete h; }

phicgc_status phicgc_hierarchy_depth(const phicgc_hierarchy* h, int32_t* out) {
  return guard([&] {
    require_ptr(h, "hierarchy");
    require_ptr(out, "out");
    *out = static_cast<int32_t>(h->h.depth());
  });
}

phicgc_status phicgc_hierarchy_level_dim(const phicgc_hierarchy* h, int32_t level, int64_t* out) {
  return guard([&] {
    require_ptr(h, "hierarchy");
    require_ptr(out, "out");
    phicgc::require(level >= 0 && level < h->h.depth(), ErrorCode::kInvalidArgument, "level out of range");
    *out = h->h.op(level).dim();
  });
}

phicgc_status phicgc_phi_solve(const phicgc_operator* op, const double* v, const double* g, double T, double rel_tol,
                               int32_t max_dim, double* y, phicgc_phi_result* info) {
  return guard([&] {
    require_ptr(op, "operator");
    require_ptr(v, "v");
    require_ptr(g, "g");
    require_ptr(y, "y");
    const Index n = op->op->dim();
    phicgc::krylov::SolveOptions so;
    so.max_dim = max_dim;
    const auto r = phicgc::krylov::phi_rt_solve(*op->op, copy_in(v, n), copy_in(g, n), T, rel_tol, so);
    copy_out(r.y, y);
    if (info) *info = phicgc_phi_result{r.matvecs, static_cast<uint64_t>(r.restarts), r.residual_bound, r.omega_ritz, r.beta};
  });
}

void phicgc_cgc_options_default(phicgc_cgc_options* options) {
  if (!options) return;
  const phicgc::cgc::CgcConfig d;
  options->rel_tol = d.rel_tol;
  options->num_levels = static_cast<int32_t>(d.num_levels);
  options->krylov_max_dim = static_cast<int32_t>(d.krylov_max_dim);
  options->coarse_solver = PHICGC_SOLVER_PHIRT;
  options->estimate_enabled = 1;
  options->omega_source = PHICGC_OMEGA_HIERARCHY;
}

phicgc_status phicgc_cgc_solve(const phicgc_hierarchy* h, const double* v, const double* g, double t,
                               const phicgc_cgc_options* options, double* y, phicgc_cgc_report* report) {
  return guard([&] {
    require_ptr(h, "hierarchy");
    require_ptr(v, "v");
    require_ptr(g, "g");
    require_ptr(y, "y");
    phicgc_cgc_options o;
    phicgc_cgc_options_default(&o);
    if (options) o = *options;
    phicgc::require(o.num_levels >= 1 && o.num_levels <= PHICGC_MAX_LEVELS, ErrorCode::kInvalidArgument,
                    "num_levels out of range");
    phicgc::require(o.coarse_solver == PHICGC_SOLVER_PHIRT || o.coarse_solver == PHICGC_SOLVER_RESIDUAL_RESTART,
                    ErrorCode::kInvalidArgument, "unknown coarse solver");
    phicgc::require(o.omega_source >= PHICGC_OMEGA_HIERARCHY && o.omega_source <= PHICGC_OMEGA_ZERO,
                    ErrorCode::kInvalidArgument, "unknown omega source");
    phicgc::cgc::CgcConfig cfg;
    cfg.rel_tol = o.rel_tol;
    cfg.num_levels = o.num_levels;
    cfg.krylov_max_dim = o.krylov_max_dim;
    cfg.coarse_solver = o.coarse_solver == PHICGC_SOLVER_RESIDUAL_RESTART ? phicgc::cgc::CoarseSolver::kResidualRestart
                                                                          : phicgc::cgc::CoarseSolver::kPhiRt;
    cfg.estimate_enabled = o.estimate_enabled != 0;
    cfg.omega_source = static_cast<phicgc::cgc::OmegaSource>(o.omega_source);
    const Index n = h->h.op(0).dim();
    const auto r = phicgc::cgc::cgc_multigrid(h->h, copy_in(v, n), copy_in(g, n), t, cfg);
    copy_out(r.y, y);
    if (report) {
      *report = phicgc_cgc_report{};
      report->num_levels = static_cast<int32_t>(r.report.levels.size());
      report->beta_root = r.report.beta_root;
      report->rel_tol_root = r.report.rel_tol_root;
      report->total_estimate = r.report.total_estimate;
      report->estimate_matvecs = r.report.estimate_matvecs;
      report->total_matvecs = r.report.total_matvecs();
      for (std::size_t j = 0; j < r.report.levels.size(); ++j) {
        const auto& l = r.report.levels[j];
        phicgc_level_report& out = report->levels[j];
        out.matvecs = l.matvecs;
        out.beta = l.beta;
        out.effective_rel_tol = l.effective_rel_tol;
        out.residual_bound = l.residual_bound;
        out.coarse_error_estimate = l.coarse_error_estimate.value_or(0.0);
        out.omega_used = l.omega_used;
        out.solved = l.solved ? 1 : 0;
        out.has_estimate = l.coarse_error_estimate ? 1 : 0;
      }
    }
  });
}

phicgc_status phicgc_reference_solution(const phicgc_problem* p, double t, double* y) {
  return guard([&] {
    require_ptr(p, "problem");
    require_ptr(y, "y");
    copy_out(phicgc::oracle::reference_solution(p->p, t), y);
  });
}

phicgc_status phicgc_relative_error(const double* y, const double* y_ref, int64_t n, double* out) {
  return guard([&] {
    require_ptr(y, "y");
    require_ptr(y_ref, "y_ref");
    require_ptr(out, "out");
    phicgc::require(n >= 1, ErrorCode::kInvalidArgument, "length must be positive");
    *out = phicgc::oracle::relative_error(copy_in(y, n), copy_in(y_ref, n));
  });
}

phicgc_status phicgc_run_experiment(const char* config_path, char** markdown_out, char** csv_path_out) {
  return guard([&] {
    require_ptr(config_path, "config_path");
    const auto cfg = phicgc::bench::load_config(config_path);
    const auto result = phicgc::bench::run_experiment(cfg);
    if (markdown_out) *markdown_out = dup_string(phicgc::bench::format_markdown(result.rows, cfg.name));
    if (csv_path_out) *csv_path_out = dup_string(result.csv_path);
  });
}

phicgc_status phicgc_verify(int32_t suite, uint64_t seed, double coarse_tolerance_skew, phicgc_check_callback callback,
                            void* user, int32_t* failures_out) {
  return guard([&] {
    phicgc::require(suite == 0 || suite == 1, ErrorCode::kInvalidArgument, "suite must be 0 (fast) or 1 (full)");
    phicgc::bench::VerifyOptions o;
    o.suite = suite == 1 ? phicgc::bench::Suite::kFull : phicgc::bench::Suite::kFast;
    o.seed = seed;
    o.coarse_tolerance_skew = coarse_tolerance_skew;
    const auto results = phicgc::bench::verify(o, [&](const phicgc::bench::CheckResult& r) {
      if (callback) callback(r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), r.seconds, user);
    });
    int32_t failures = 0;
    for (const auto& r : results) failures += r.passed ? 0 : 1;
    if (failures_out) *failures_out = failures;
  });
}

phicgc_status phicgc_format_table(const char* const* csv_paths, int32_t count, int32_t markdown, char** out) {
  return guard([&] {
    require_ptr(out, "out");
    phicgc::require(count >= 1, ErrorCode::kInvalidArgument, "no input files");
    require_ptr(csv_paths, "csv_paths");
    std::vector<std::string> paths;
    for (int32_t i = 0; i < count; ++i) {
      require_ptr(csv_paths[i], "csv path");
      paths.emplace_back(csv_paths[i]);
    }
    *out = dup_string(phicgc::bench::format_table(paths, markdown != 0));
  });
}

}  // extern "C"
