#include <doctest.h>

#include <phicgc/phicgc.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace {

struct Problem {
  phicgc_problem* p = nullptr;
  phicgc_problem_info info{};
  std::vector<double> v, g;
  explicit Problem(int64_t n) {
    REQUIRE(phicgc_problem_heat1d(n, &p) == PHICGC_OK);
    REQUIRE(phicgc_problem_info_get(p, &info) == PHICGC_OK);
    v.resize(static_cast<std::size_t>(info.dim));
    g.resize(v.size());
    REQUIRE(phicgc_problem_vectors(p, v.data(), g.data()) == PHICGC_OK);
  }
  ~Problem() { phicgc_problem_destroy(p); }
};

}  // namespace

TEST_CASE("version and status strings") {
  CHECK(std::string(phicgc_version()) == "0.1.0");
  CHECK(std::string(phicgc_status_string(PHICGC_OK)) == "ok");
  CHECK(std::string(phicgc_status_string(PHICGC_ERR_CONFIG)) == "configuration error");
}

TEST_CASE("csr operator through the C interface") {
  const int64_t rows[] = {0, 2, 5, 7};
  const int64_t cols[] = {0, 1, 0, 1, 2, 1, 2};
  const double vals[] = {2, -1, -1, 2, -1, -1, 2};
  phicgc_operator* op = nullptr;
  REQUIRE(phicgc_operator_create_csr(3, rows, cols, vals, &op) == PHICGC_OK);
  int64_t n = 0;
  CHECK(phicgc_operator_dim(op, &n) == PHICGC_OK);
  CHECK(n == 3);
  const double x[] = {1, 2, 3};
  double y[3];
  CHECK(phicgc_operator_apply(op, x, y) == PHICGC_OK);
  CHECK(y[0] == 0.0);
  CHECK(y[1] == 0.0);
  CHECK(y[2] == 4.0);
  double norm = 0;
  CHECK(phicgc_operator_one_norm(op, &norm) == PHICGC_OK);
  CHECK(norm == 4.0);
  uint64_t count = 0;
  CHECK(phicgc_operator_matvec_count(op, 1, &count) == PHICGC_OK);
  CHECK(count == 1);
  CHECK(phicgc_operator_matvec_count(op, 0, &count) == PHICGC_OK);
  CHECK(count == 0);

  const auto dir = std::filesystem::temp_directory_path() / "phicgc_capi_test";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "op.mtx").string();
  CHECK(phicgc_operator_write_matrix_market(op, path.c_str()) == PHICGC_OK);
  phicgc_operator* back = nullptr;
  REQUIRE(phicgc_operator_read_matrix_market(path.c_str(), &back) == PHICGC_OK);
  double y2[3];
  CHECK(phicgc_operator_apply(back, x, y2) == PHICGC_OK);
  CHECK(std::memcmp(y, y2, sizeof y) == 0);
  phicgc_operator_destroy(back);
  phicgc_operator_destroy(op);
  std::filesystem::remove_all(dir);
}

TEST_CASE("errors map to status codes with a message") {
  const int64_t rows[] = {0, 1, 1};
  const int64_t cols[] = {5};
  const double vals[] = {1};
  phicgc_operator* op = nullptr;
  CHECK(phicgc_operator_create_csr(2, rows, cols, vals, &op) == PHICGC_ERR_INVALID_ARGUMENT);
  CHECK(op == nullptr);
  CHECK(std::strlen(phicgc_last_error()) > 0);
  CHECK(phicgc_operator_create_csr(2, nullptr, cols, vals, &op) == PHICGC_ERR_INVALID_ARGUMENT);
  CHECK(phicgc_operator_read_matrix_market("/nonexistent.mtx", &op) == PHICGC_ERR_IO);
  phicgc_problem* p = nullptr;
  CHECK(phicgc_problem_heat1d(7, &p) == PHICGC_ERR_INVALID_ARGUMENT);
  CHECK(phicgc_problem_heat1d(8, &p) == PHICGC_OK);
  CHECK(std::strlen(phicgc_last_error()) == 0);
  phicgc_problem_destroy(p);
  phicgc_operator_destroy(nullptr);
  phicgc_problem_destroy(nullptr);
  phicgc_hierarchy_destroy(nullptr);
}

TEST_CASE("3D operators are matrix free with an exact norm") {
  phicgc_problem* p = nullptr;
  REQUIRE(phicgc_problem_heat3d(4, 6, 8, &p) == PHICGC_OK);
  phicgc_problem_info info{};
  CHECK(phicgc_problem_info_get(p, &info) == PHICGC_OK);
  CHECK(info.rank == 3);
  CHECK(info.dim == 192);
  CHECK(info.omega == doctest::Approx(29.0239966594983962));
  phicgc_operator* op = nullptr;
  REQUIRE(phicgc_problem_operator(p, &op) == PHICGC_OK);
  phicgc_problem_destroy(p);
  double norm = 0;
  CHECK(phicgc_operator_one_norm(op, &norm) == PHICGC_OK);
  CHECK(norm == doctest::Approx(4 * 25 + 4 * 49 + 4 * 81.0));
  CHECK(phicgc_operator_write_matrix_market(op, "/tmp/never.mtx") == PHICGC_ERR_UNSUPPORTED);
  phicgc_operator_destroy(op);
}

TEST_CASE("phi solve and coarse grid correction") {
  Problem prob(256);
  CHECK(prob.info.T == 0.01);
  CHECK(prob.info.rel_tol == 1e-8);
  phicgc_operator* op = nullptr;
  REQUIRE(phicgc_problem_operator(prob.p, &op) == PHICGC_OK);
  const std::size_t n = prob.v.size();
  std::vector<double> ref(n), y1(n), y2(n);
  REQUIRE(phicgc_reference_solution(prob.p, prob.info.T, ref.data()) == PHICGC_OK);

  phicgc_phi_result info{};
  REQUIRE(phicgc_phi_solve(op, prob.v.data(), prob.g.data(), prob.info.T, 1e-8, 30, y1.data(), &info) == PHICGC_OK);
  double err = 0;
  CHECK(phicgc_relative_error(y1.data(), ref.data(), static_cast<int64_t>(n), &err) == PHICGC_OK);
  CHECK(err <= 1e-9);
  CHECK(info.matvecs > 0);
  CHECK(info.beta > 0);

  phicgc_hierarchy* h = nullptr;
  REQUIRE(phicgc_hierarchy_build(prob.p, 3, PHICGC_TRANSFER_CUBIC_SPLINE, &h) == PHICGC_OK);
  int32_t depth = 0;
  CHECK(phicgc_hierarchy_depth(h, &depth) == PHICGC_OK);
  CHECK(depth == 3);
  int64_t dim2 = 0;
  CHECK(phicgc_hierarchy_level_dim(h, 2, &dim2) == PHICGC_OK);
  CHECK(dim2 == 64);
  CHECK(phicgc_hierarchy_level_dim(h, 3, &dim2) != PHICGC_OK);

  phicgc_cgc_options opt;
  phicgc_cgc_options_default(&opt);
  CHECK(opt.num_levels == 2);
  opt.rel_tol = 1e-8;
  phicgc_cgc_report rep{};
  REQUIRE(phicgc_cgc_solve(h, prob.v.data(), prob.g.data(), prob.info.T, &opt, y2.data(), &rep) == PHICGC_OK);
  CHECK(rep.num_levels == 2);
  CHECK(rep.levels[0].has_estimate == 1);
  CHECK(rep.levels[1].has_estimate == 0);
  CHECK(rep.total_estimate == rep.levels[0].coarse_error_estimate);
  CHECK(rep.total_matvecs == rep.levels[0].matvecs + rep.levels[1].matvecs);
  CHECK(rep.levels[0].beta * rep.levels[0].effective_rel_tol ==
        doctest::Approx(rep.beta_root * rep.rel_tol_root).epsilon(1e-13));
  CHECK(phicgc_relative_error(y2.data(), ref.data(), static_cast<int64_t>(n), &err) == PHICGC_OK);
  CHECK(err <= 1e-5);

  opt.num_levels = 4;
  CHECK(phicgc_cgc_solve(h, prob.v.data(), prob.g.data(), prob.info.T, &opt, y2.data(), nullptr) ==
        PHICGC_ERR_INVALID_ARGUMENT);
  opt.num_levels = 2;
  opt.omega_source = 7;
  CHECK(phicgc_cgc_solve(h, prob.v.data(), prob.g.data(), prob.info.T, &opt, y2.data(), nullptr) ==
        PHICGC_ERR_INVALID_ARGUMENT);
  phicgc_hierarchy_destroy(h);
  phicgc_operator_destroy(op);
}

TEST_CASE("experiment and table through the C interface") {
  const auto dir = std::filesystem::temp_directory_path() / "phicgc_capi_run";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string cfg = (dir / "cfg.json").string();
  {
    std::ofstream out(cfg);
    out << R"({"name": "capi", "problem": "heat1d", "extents": [64], "output_dir": ")" << dir.string() << "\"}";
  }
  char* md = nullptr;
  char* csv = nullptr;
  REQUIRE(phicgc_run_experiment(cfg.c_str(), &md, &csv) == PHICGC_OK);
  CHECK(std::string(md).find("cgc") != std::string::npos);
  CHECK(std::filesystem::exists(csv));
  const char* paths[] = {csv};
  char* table = nullptr;
  CHECK(phicgc_format_table(paths, 1, 0, &table) == PHICGC_OK);
  CHECK(std::string(table).rfind("method,levels", 0) == 0);
  phicgc_string_free(table);
  phicgc_string_free(md);
  phicgc_string_free(csv);
  {
    std::ofstream out(cfg);
    out << R"({"problem": "heat1d", "extents": [63]})";
  }
  CHECK(phicgc_run_experiment(cfg.c_str(), nullptr, nullptr) == PHICGC_ERR_CONFIG);
  CHECK(std::string(phicgc_last_error()).find("extents") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("verify reports every check through the callback") {
  struct Tally {
    int seen = 0;
    int failed = 0;
  } tally;
  int32_t failures = -1;
  const auto cb = [](const char*, int passed, const char*, double, void* user) {
    auto* t = static_cast<Tally*>(user);
    ++t->seen;
    if (!passed) ++t->failed;
  };
  REQUIRE(phicgc_verify(0, 1, 1.0, cb, &tally, &failures) == PHICGC_OK);
  CHECK(tally.seen >= 7);
  CHECK(failures == 0);
  CHECK(phicgc_verify(5, 1, 1.0, nullptr, nullptr, &failures) == PHICGC_ERR_INVALID_ARGUMENT);
}
