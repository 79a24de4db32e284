#include <CLI11.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "phicgc/phicgc.h"

namespace {

constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

int report_failure(phicgc_status status, const char* context) {
  std::fprintf(stderr, "phicgc %s: %s: %s\n", context, phicgc_status_string(status), phicgc_last_error());
  const bool config = status == PHICGC_ERR_CONFIG || status == PHICGC_ERR_INVALID_ARGUMENT;
  return config ? kExitConfig : kExitSolver;
}

int cmd_run(const std::string& config_path) {
  char* markdown = nullptr;
  char* csv_path = nullptr;
  const phicgc_status s = phicgc_run_experiment(config_path.c_str(), &markdown, &csv_path);
  if (s != PHICGC_OK) return report_failure(s, "run");
  std::printf("%s\nwrote %s\n", markdown, csv_path);
  phicgc_string_free(markdown);
  phicgc_string_free(csv_path);
  return 0;
}

void print_check(const char* name, int passed, const char* detail, double seconds, void*) {
  std::printf("%s %-20s %7.2fs  %s\n", passed ? "PASS" : "FAIL", name, seconds, detail);
  std::fflush(stdout);
}

int cmd_verify(const std::string& suite, std::uint64_t seed, double skew) {
  int32_t failures = 0;
  const phicgc_status s = phicgc_verify(suite == "full" ? 1 : 0, seed, skew, print_check, nullptr, &failures);
  if (s != PHICGC_OK) return report_failure(s, "verify");
  std::printf("%s: %d check(s) failed\n", failures == 0 ? "ok" : "FAILED", failures);
  return failures == 0 ? 0 : kExitVerifyFailed;
}

int cmd_table(const std::vector<std::string>& inputs, const std::string& format) {
  std::vector<const char*> paths;
  for (const auto& p : inputs) paths.push_back(p.c_str());
  char* out = nullptr;
  const phicgc_status s =
      phicgc_format_table(paths.data(), static_cast<int32_t>(paths.size()), format == "md" ? 1 : 0, &out);
  if (s != PHICGC_OK) {
    std::fprintf(stderr, "phicgc table: %s: %s\n", phicgc_status_string(s), phicgc_last_error());
    return kExitConfig;
  }
  std::fputs(out, stdout);
  phicgc_string_free(out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coarse grid corrected Krylov evaluation of phi-function actions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(phicgc_version()));

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a JSON-configured heat-equation experiment");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();

  std::string suite = "fast";
  std::uint64_t seed = 1;
  double skew = 1.0;
  auto* verify = app.add_subcommand("verify", "Run the invariant verification suite");
  verify->add_option("--suite", suite, "fast or full")->check(CLI::IsMember({"fast", "full"}));
  verify->add_option("--seed", seed, "Seed for randomized checks");
  verify->add_option("--inject-tolerance-skew", skew, "Fault injection: scale coarse tolerances");

  std::vector<std::string> inputs;
  std::string format = "md";
  auto* table = app.add_subcommand("table", "Merge experiment CSV files into one table");
  table->add_option("--inputs", inputs, "CSV files")->required()->expected(1, -1);
  table->add_option("--format", format, "md or csv")->check(CLI::IsMember({"md", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*run) return cmd_run(config_path);
  if (*verify) return cmd_verify(suite, seed, skew);
  return cmd_table(inputs, format);
}
