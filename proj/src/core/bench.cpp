#include "bench.hpp"

#include <Eigen/Eigenvalues>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "krylov.hpp"
#include "oracle.hpp"
#include "problems.hpp"
#include "smallmat.hpp"

namespace phicgc::bench {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

[[noreturn]] void config_error(const std::string& what) { fail(ErrorCode::kConfig, "config: " + what); }

template <typename T>
T get_field(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("field '") + key + "': " + e.what());
  }
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9e", x);
  return buf;
}

std::string format_short(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

std::string level_label(std::size_t j) { return j == 0 ? "h" : std::to_string(1u << j) + "h"; }

std::size_t max_levels(const std::vector<MethodRow>& rows) {
  std::size_t m = 0;
  for (const MethodRow& r : rows) m = std::max({m, r.matvecs.size(), r.tolerances.size()});
  return m;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const std::string& column) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    fail(ErrorCode::kIo, "csv: column '" + column + "' has non-numeric value '" + s + "'");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  require(out.good(), ErrorCode::kIo, "cannot write " + path);
  out << text;
  require(out.good(), ErrorCode::kIo, "write failed for " + path);
}

MethodRow row_from_report(const std::string& method, const cgc::CgcResult& r, const Vector& reference,
                          double seconds) {
  MethodRow row;
  row.method = method;
  row.levels = static_cast<Index>(r.report.levels.size());
  row.error = oracle::relative_error(r.y, reference);
  if (row.levels > 1) row.estimate = r.report.total_estimate / reference.norm();
  row.wall_seconds = seconds;
  for (const cgc::LevelReport& l : r.report.levels) {
    row.matvecs.push_back(l.matvecs);
    row.tolerances.push_back(l.solved ? l.effective_rel_tol : std::nan(""));
  }
  return row;
}

// ---------------------------------------------------------------------------
// verification checks

struct CheckFailure {
  std::string message;
};

void expect(bool cond, const std::string& message) {
  if (!cond) throw CheckFailure{message};
}

using CheckFn = std::function<std::string(std::mt19937_64&)>;

DenseMatrix random_spd(std::mt19937_64& rng, Index n, double shift) {
  std::normal_distribution<double> normal;
  DenseMatrix m(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) m(i, j) = normal(rng);
  DenseMatrix a = m.transpose() * m / static_cast<double>(n);
  a.diagonal().array() += shift;
  return 0.5 * (a + a.transpose());
}

Vector random_vector(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> normal;
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

std::string check_adjointness(std::mt19937_64& rng) {
  using transfer::GridSpec;
  const std::vector<std::pair<GridSpec, GridSpec>> cases = {
      {GridSpec{{16}, transfer::Boundary::kPeriodic}, GridSpec{{32}, transfer::Boundary::kPeriodic}},
      {GridSpec{{4, 6, 8}, transfer::Boundary::kDirichlet}, GridSpec{{8, 12, 16}, transfer::Boundary::kDirichlet}},
  };
  double worst = 0.0;
  for (const auto& [coarse, fine] : cases) {
    for (auto method : {transfer::InterpolationMethod::kLinear, transfer::InterpolationMethod::kCubicSpline}) {
      const auto q = transfer::TransferOperator::build(coarse, fine, method);
      for (int k = 0; k < 100; ++k) {
        const Vector x = random_vector(rng, q.coarse_size());
        const Vector y = random_vector(rng, q.fine_size());
        const Vector qx = q.prolong(x);
        const double lhs = qx.dot(y);
        const double rhs = x.dot(q.restrict(y));
        const double rel = std::abs(lhs - rhs) / (qx.norm() * y.norm());
        worst = std::max(worst, rel);
      }
    }
  }
  expect(worst <= 1e-13, "adjoint defect " + format_short(worst) + " > 1e-13");
  return "max adjoint defect " + format_short(worst);
}

std::string check_reconstruction(std::mt19937_64& rng) {
  const auto p = problems::heat1d(128);
  const auto h = problems::build_hierarchy(p, 4, transfer::InterpolationMethod::kCubicSpline);
  double worst_split = 0.0;
  double worst_telescope = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Vector gbar = random_vector(rng, p.grid.size());
    const auto s = transfer::split_vector(h.prolongation(0), gbar);
    worst_split = std::max(worst_split, (h.prolongation(0).prolong(s.coarse) + s.remainder - gbar).norm() / gbar.norm());
    if (k < 10) {
      // Sum over levels of (Q_1..Q_{j-1}) g^_j plus (Q_1..Q_{m-1}) g~_m.
      std::vector<Vector> remainders;
      Vector current = gbar;
      for (Index j = 0; j + 1 < h.depth(); ++j) {
        auto sj = transfer::split_vector(h.prolongation(j), current);
        remainders.push_back(std::move(sj.remainder));
        current = std::move(sj.coarse);
      }
      Vector sum = current;
      for (Index j = h.depth() - 2; j >= 0; --j) sum = h.prolongation(j).prolong(sum) + remainders[j];
      worst_telescope = std::max(worst_telescope, (sum - gbar).norm() / gbar.norm());
    }
  }
  expect(worst_split <= 1e-13, "split reconstruction defect " + format_short(worst_split));
  expect(worst_telescope <= 1e-12, "multilevel reconstruction defect " + format_short(worst_telescope));
  return "split " + format_short(worst_split) + ", 4-level " + format_short(worst_telescope);
}

std::string check_tolerance_identity(double skew) {
  const auto p = problems::heat1d(256);
  const auto h = problems::build_hierarchy(p, 3, transfer::InterpolationMethod::kCubicSpline);
  cgc::CgcConfig cfg;
  cfg.rel_tol = p.rel_tol;
  cfg.num_levels = 3;
  cfg.coarse_tolerance_skew = skew;
  const auto r = cgc::cgc_multigrid(h, p.v, p.g, p.T, cfg);
  const double defect = r.report.tolerance_identity_defect();
  expect(defect <= 1e-13, "tolerance identity defect " + format_short(defect) + " > 1e-13");
  const double threshold = r.report.beta_root * r.report.rel_tol_root;
  for (std::size_t j = 0; j < r.report.levels.size(); ++j) {
    const auto& l = r.report.levels[j];
    if (!l.solved) continue;
    expect(l.residual_bound <= threshold * (1.0 + 1e-12),
           "level " + std::to_string(j + 1) + " residual " + format_short(l.residual_bound) + " above beta*tol");
  }
  return "defect " + format_short(defect);
}

std::string check_residual_error_bound(std::mt19937_64& rng, int count) {
  std::uniform_int_distribution<Index> dim(10, 40);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst_ratio = 0.0;
  for (int k = 0; k < count; ++k) {
    const Index n = dim(rng);
    const DenseMatrix a = random_spd(rng, n, 0.01 + unit(rng));
    const double omega = Eigen::SelfAdjointEigenSolver<DenseMatrix>(a).eigenvalues().minCoeff();
    const Vector v = random_vector(rng, n);
    const Vector g = random_vector(rng, n);
    const double t = 0.1 + 2.0 * unit(rng);
    const CsrOperator op(SparseMatrixCsr::from_dense(a), true, omega);
    krylov::SolveOptions so;
    so.max_dim = 4 + k % 5;
    const auto res = krylov::phi_rt_solve(op, v, g, t, 1e-6, so);
    const Vector exact = oracle::dense_phi_reference(a, v, g, t);
    const double err = (exact - res.y).norm();
    const double bound = t * smallmat::phi_scalar(-t * omega) * res.residual_bound;
    expect(err <= bound * (1.0 + 1e-6), "instance " + std::to_string(k) + ": error " + format_short(err) +
                                            " exceeds bound " + format_short(bound));
    worst_ratio = std::max(worst_ratio, err / bound);
  }
  return std::to_string(count) + " solves, max error/bound " + format_short(worst_ratio);
}

// Right-hand side of the multilevel error bound with dense solution
// operators; m = 2 is the two-grid bound.
double multilevel_bound(const cgc::GridHierarchy& h, Index m, const Vector& gbar, double t, double tol) {
  double omega_bar = h.omega_min(m);
  double commutator_sum = 0.0;
  double q_product = 1.0;
  double q_sum = 1.0;
  Vector current = gbar;
  for (Index j = 0; j + 1 < m; ++j) {
    const auto& q = h.prolongation(j);
    const Vector coarse = q.restrict(current);
    const DenseMatrix a_fine = materialize(h.op(j));
    const DenseMatrix a_coarse = materialize(h.op(j + 1));
    const Vector zero_f = Vector::Zero(a_fine.rows());
    const Vector zero_c = Vector::Zero(a_coarse.rows());
    const Vector fine_of_prolonged = oracle::dense_phi_reference(a_fine, zero_f, q.prolong(coarse), t);
    const Vector prolonged_coarse = q.prolong(oracle::dense_phi_reference(a_coarse, zero_c, coarse, t));
    commutator_sum += q_product * (fine_of_prolonged - prolonged_coarse).norm();
    q_product *= q.norm_estimate();
    q_sum += q_product;
    current = coarse;
  }
  return commutator_sum + t * smallmat::phi_scalar(-t * omega_bar) * gbar.norm() * tol * q_sum;
}

std::string check_multilevel_bound(const std::vector<Index>& sizes, Index levels, const std::vector<double>& tols,
                                   double skew) {
  double worst_ratio = 0.0;
  int runs = 0;
  for (Index n : sizes) {
    const auto p = problems::heat1d(n);
    const auto h = problems::build_hierarchy(p, levels, transfer::InterpolationMethod::kCubicSpline);
    const DenseMatrix a = materialize(*p.op);
    const Vector exact = oracle::dense_phi_reference(a, p.v, p.g, p.T);
    const Vector gbar = p.g - a * p.v;
    for (double tol : tols) {
      cgc::CgcConfig cfg;
      cfg.rel_tol = tol;
      cfg.num_levels = levels;
      cfg.coarse_tolerance_skew = skew;
      const auto r = cgc::cgc_multigrid(h, p.v, p.g, p.T, cfg);
      const double err = (exact - r.y).norm();
      const double bound = multilevel_bound(h, levels, gbar, p.T, tol);
      expect(err <= bound, "N=" + std::to_string(n) + " tol=" + format_short(tol) + ": error " + format_short(err) +
                               " exceeds bound " + format_short(bound));
      worst_ratio = std::max(worst_ratio, err / bound);
      ++runs;
    }
  }
  return std::to_string(runs) + " runs, max error/bound " + format_short(worst_ratio);
}

std::string check_estimate_dominance() {
  const auto p = problems::heat1d(256);
  const auto h = problems::build_hierarchy(p, 2, transfer::InterpolationMethod::kCubicSpline);
  const DenseMatrix a = materialize(*p.op);
  const Vector exact = oracle::dense_phi_reference(a, p.v, p.g, p.T);
  cgc::CgcConfig cfg;
  cfg.rel_tol = 1e-12;
  const auto r = cgc::cgc_multigrid(h, p.v, p.g, p.T, cfg);
  const double err = (exact - r.y).norm();
  expect(r.report.total_estimate >= err,
         "estimate " + format_short(r.report.total_estimate) + " below error " + format_short(err));
  return "estimate " + format_short(r.report.total_estimate) + " vs error " + format_short(err);
}

}  // namespace

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::kInvalidArgument, "slope fit needs two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

namespace {

std::string check_second_order() {
  const auto p = problems::heat1d(256);
  const auto h = problems::build_hierarchy(p, 2, transfer::InterpolationMethod::kCubicSpline);
  const DenseMatrix a = materialize(*p.op);
  std::vector<double> dts = {1e-4, 2e-4, 4e-4, 8e-4};
  std::vector<double> errors;
  for (double dt : dts) {
    cgc::CgcConfig cfg;
    cfg.rel_tol = 1e-12;
    const auto r = cgc::cgc_multigrid(h, p.v, p.g, dt, cfg);
    errors.push_back((oracle::dense_phi_reference(a, p.v, p.g, dt) - r.y).norm());
  }
  const double slope = loglog_slope(dts, errors);
  expect(slope >= 1.7 && slope <= 2.3, "slope " + format_short(slope) + " outside [1.7, 2.3]");
  return "slope " + format_short(slope);
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    config_error(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("top level must be an object");
  static const std::set<std::string> known = {"name", "problem", "extents", "T", "rel_tol", "levels",
                                              "transfer_method", "krylov_max_dim", "seed", "output_dir",
                                              "omega_source", "reference"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) config_error("unknown field '" + key + "'");
  }
  ExperimentConfig cfg;
  if (j.contains("name")) cfg.name = get_field<std::string>(j, "name");
  const std::string problem = get_field<std::string>(j, "problem");
  if (problem == "heat1d") {
    cfg.problem = ProblemKind::kHeat1d;
  } else if (problem == "heat3d") {
    cfg.problem = ProblemKind::kHeat3d;
  } else {
    config_error("field 'problem': expected heat1d or heat3d, got '" + problem + "'");
  }
  cfg.extents = get_field<std::vector<Index>>(j, "extents");
  if (j.contains("T")) cfg.T = get_field<double>(j, "T");
  if (j.contains("rel_tol")) cfg.rel_tol = get_field<double>(j, "rel_tol");
  if (j.contains("levels")) cfg.levels = get_field<Index>(j, "levels");
  if (j.contains("transfer_method")) {
    const std::string m = get_field<std::string>(j, "transfer_method");
    if (m == "linear") {
      cfg.transfer_method = transfer::InterpolationMethod::kLinear;
    } else if (m == "cubic-spline") {
      cfg.transfer_method = transfer::InterpolationMethod::kCubicSpline;
    } else {
      config_error("field 'transfer_method': expected linear or cubic-spline, got '" + m + "'");
    }
  }
  if (j.contains("krylov_max_dim")) cfg.krylov_max_dim = get_field<Index>(j, "krylov_max_dim");
  if (j.contains("seed")) cfg.seed = get_field<std::uint64_t>(j, "seed");
  if (j.contains("output_dir")) cfg.output_dir = get_field<std::string>(j, "output_dir");
  if (j.contains("omega_source")) {
    const std::string s = get_field<std::string>(j, "omega_source");
    if (s == "hierarchy") {
      cfg.omega_source = cgc::OmegaSource::kHierarchy;
    } else if (s == "ritz") {
      cfg.omega_source = cgc::OmegaSource::kRitz;
    } else if (s == "zero") {
      cfg.omega_source = cgc::OmegaSource::kZero;
    } else {
      config_error("field 'omega_source': expected hierarchy, ritz or zero, got '" + s + "'");
    }
  }
  if (j.contains("reference")) {
    const json& r = j.at("reference");
    if (!r.is_object()) config_error("field 'reference' must be an object");
    for (const auto& [key, value] : r.items()) {
      if (key != "rel_tol" && key != "max_dim") config_error("unknown field 'reference." + key + "'");
    }
    if (r.contains("rel_tol")) cfg.reference_rel_tol = get_field<double>(r, "rel_tol");
    if (r.contains("max_dim")) cfg.reference_max_dim = get_field<Index>(r, "max_dim");
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) config_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void validate_config(const ExperimentConfig& cfg) {
  const std::size_t rank = cfg.problem == ProblemKind::kHeat1d ? 1 : 3;
  if (cfg.extents.size() != rank) {
    config_error("field 'extents': expected " + std::to_string(rank) + " value(s), got " +
                 std::to_string(cfg.extents.size()));
  }
  if (cfg.levels < 1) config_error("field 'levels' must be at least 1");
  const Index divisor = Index{1} << (cfg.levels - 1);
  for (Index e : cfg.extents) {
    if (e < 4 || e % 2 != 0) config_error("field 'extents': " + std::to_string(e) + " is not even and >= 4");
    if (e % divisor != 0 || e / divisor < 2) {
      config_error("field 'extents': " + std::to_string(e) + " cannot be coarsened " +
                   std::to_string(cfg.levels - 1) + " times");
    }
  }
  if (cfg.T && !(*cfg.T > 0.0)) config_error("field 'T' must be positive");
  if (cfg.rel_tol && !(*cfg.rel_tol > 0.0)) config_error("field 'rel_tol' must be positive");
  if (cfg.krylov_max_dim < 1) config_error("field 'krylov_max_dim' must be at least 1");
  if (!(cfg.reference_rel_tol > 0.0)) config_error("field 'reference.rel_tol' must be positive");
  if (cfg.reference_max_dim < 1) config_error("field 'reference.max_dim' must be at least 1");
  if (cfg.name.empty() || cfg.name.find('/') != std::string::npos) config_error("field 'name' must be a plain file stem");
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  problems::HeatProblem p = cfg.problem == ProblemKind::kHeat1d
                                ? problems::heat1d(cfg.extents[0])
                                : problems::heat3d(cfg.extents[0], cfg.extents[1], cfg.extents[2]);
  if (cfg.T) p.T = *cfg.T;
  if (cfg.rel_tol) p.rel_tol = *cfg.rel_tol;

  oracle::ReferenceOptions ro;
  ro.rel_tol = cfg.reference_rel_tol;
  ro.max_dim = cfg.reference_max_dim;
  ro.check_interval = 5;
  const Vector reference = oracle::reference_solution(p, p.T, ro);

  const auto h = problems::build_hierarchy(p, cfg.levels, cfg.transfer_method);
  ExperimentResult result;
  std::vector<Index> runs = {1};
  if (cfg.levels > 1) runs.push_back(cfg.levels);
  for (Index levels : runs) {
    for (Index j = 0; j < h.depth(); ++j) h.op(j).reset_matvec_count();
    cgc::CgcConfig cc;
    cc.rel_tol = p.rel_tol;
    cc.num_levels = levels;
    cc.krylov_max_dim = cfg.krylov_max_dim;
    cc.omega_source = cfg.omega_source;
    const auto start = Clock::now();
    const auto r = cgc::cgc_multigrid(h, p.v, p.g, p.T, cc);
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    result.rows.push_back(row_from_report(levels == 1 ? "phirt" : "cgc", r, reference, seconds));
  }

  std::filesystem::create_directories(cfg.output_dir);
  result.csv_path = (std::filesystem::path(cfg.output_dir) / (cfg.name + ".csv")).string();
  result.markdown_path = (std::filesystem::path(cfg.output_dir) / (cfg.name + ".md")).string();
  write_file(result.csv_path, format_csv(result.rows));
  write_file(result.markdown_path, format_markdown(result.rows, cfg.name));
  return result;
}

std::string format_csv(const std::vector<MethodRow>& rows) {
  const std::size_t m = max_levels(rows);
  std::ostringstream out;
  out << "method,levels,error,error_estimate,wall_seconds";
  for (std::size_t j = 1; j <= m; ++j) out << ",matvecs_l" << j << ",tol_l" << j;
  out << '\n';
  for (const MethodRow& r : rows) {
    out << r.method << ',' << r.levels << ',' << format_double(r.error) << ','
        << (r.estimate ? format_double(*r.estimate) : "") << ',' << format_double(r.wall_seconds);
    for (std::size_t j = 0; j < m; ++j) {
      out << ',';
      if (j < r.matvecs.size()) out << r.matvecs[j];
      out << ',';
      if (j < r.tolerances.size() && !std::isnan(r.tolerances[j])) out << format_double(r.tolerances[j]);
    }
    out << '\n';
  }
  return out.str();
}

std::string format_markdown(const std::vector<MethodRow>& rows, const std::string& title) {
  const std::size_t m = max_levels(rows);
  std::ostringstream out;
  out << "### " << title << "\n\n";
  out << "| method | grids | error | estimate | wall s |";
  for (std::size_t j = 0; j < m; ++j) out << " grid " << level_label(j) << " |";
  out << "\n|---|---|---|---|---|";
  for (std::size_t j = 0; j < m; ++j) out << "---|";
  out << '\n';
  for (const MethodRow& r : rows) {
    out << "| " << r.method << " | " << r.levels << " | " << format_short(r.error) << " | "
        << (r.estimate ? "(" + format_short(*r.estimate) + ")" : std::string("-")) << " | "
        << format_short(r.wall_seconds) << " |";
    for (std::size_t j = 0; j < m; ++j) {
      out << ' ';
      if (j < r.matvecs.size()) {
        out << r.matvecs[j];
        if (j < r.tolerances.size() && !std::isnan(r.tolerances[j])) out << " (" << format_short(r.tolerances[j]) << ")";
      }
      out << " |";
    }
    out << '\n';
  }
  return out.str();
}

std::vector<MethodRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::kIo, "csv: empty input");
  const std::vector<std::string> header = split_line(line);
  require(header.size() >= 5 && header[0] == "method" && header[1] == "levels" && header[2] == "error" &&
              header[3] == "error_estimate" && header[4] == "wall_seconds" && (header.size() - 5) % 2 == 0,
          ErrorCode::kIo, "csv: unexpected header '" + line + "'");
  std::vector<MethodRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells = split_line(line);
    require(cells.size() == header.size(), ErrorCode::kIo, "csv: row has " + std::to_string(cells.size()) +
                                                               " cells, header has " + std::to_string(header.size()));
    MethodRow r;
    r.method = cells[0];
    r.levels = static_cast<Index>(parse_number(cells[1], "levels"));
    r.error = parse_number(cells[2], "error");
    if (!cells[3].empty()) r.estimate = parse_number(cells[3], "error_estimate");
    r.wall_seconds = parse_number(cells[4], "wall_seconds");
    for (std::size_t c = 5; c + 1 < cells.size(); c += 2) {
      if (cells[c].empty()) break;
      r.matvecs.push_back(static_cast<std::uint64_t>(parse_number(cells[c], header[c])));
      r.tolerances.push_back(cells[c + 1].empty() ? std::nan("") : parse_number(cells[c + 1], header[c + 1]));
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_table(const std::vector<std::string>& csv_paths, bool markdown) {
  require(!csv_paths.empty(), ErrorCode::kInvalidArgument, "table: no input files");
  std::vector<MethodRow> rows;
  for (const std::string& path : csv_paths) {
    auto part = parse_csv(read_file(path));
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return markdown ? format_markdown(rows, "results") : format_csv(rows);
}

std::vector<CheckResult> verify(const VerifyOptions& options, const std::function<void(const CheckResult&)>& on_result) {
  std::mt19937_64 rng(options.seed);
  const bool full = options.suite == Suite::kFull;
  const double skew = options.coarse_tolerance_skew;
  std::vector<std::pair<std::string, CheckFn>> checks = {
      {"adjointness", [](std::mt19937_64& r) { return check_adjointness(r); }},
      {"reconstruction", [](std::mt19937_64& r) { return check_reconstruction(r); }},
      {"tolerance-identity", [skew](std::mt19937_64&) { return check_tolerance_identity(skew); }},
      {"residual-error-bound", [full](std::mt19937_64& r) { return check_residual_error_bound(r, full ? 50 : 10); }},
      {"two-grid-bound",
       [full, skew](std::mt19937_64&) {
         return check_multilevel_bound(full ? std::vector<Index>{64, 128} : std::vector<Index>{64}, 2, {1e-4, 1e-8},
                                       skew);
       }},
      {"multigrid-bound",
       [full, skew](std::mt19937_64&) {
         return check_multilevel_bound(full ? std::vector<Index>{64, 128} : std::vector<Index>{128}, 3, {1e-8}, skew);
       }},
      {"estimate-dominance", [](std::mt19937_64&) { return check_estimate_dominance(); }},
  };
  if (full) checks.emplace_back("second-order", [](std::mt19937_64&) { return check_second_order(); });

  std::vector<CheckResult> results;
  for (auto& [name, fn] : checks) {
    CheckResult cr;
    cr.name = name;
    const auto start = Clock::now();
    try {
      cr.detail = fn(rng);
      cr.passed = true;
    } catch (const CheckFailure& f) {
      cr.detail = f.message;
    } catch (const std::exception& e) {
      cr.detail = std::string("exception: ") + e.what();
    }
    cr.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (on_result) on_result(cr);
    results.push_back(std::move(cr));
  }
  return results;
}

}  // namespace phicgc::bench
