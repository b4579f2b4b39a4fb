// efd: run, verify, extract and validate scenarios.
//
//   efd run <scenario> [--seed S | --seeds A..B] [--horizon H] [--out DIR]
//   efd verify <trace> --check task,k_concurrent:2 [--liveness Q]
//   efd extract <scenario> [--seed S | --seeds A..B] [--out DIR]
//   efd validate <scenario>
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 only inconclusive
// results, 64 bad usage or an invalid scenario/trace. EFD_OUT_DIR sets the
// default output directory.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "efd/harness.hpp"

using namespace efd;

namespace {

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, delim))
    if (!item.empty()) out.push_back(item);
  return out;
}

struct SeedArgs {
  std::optional<std::uint64_t> seed;
  std::string range;
};

void apply_seeds(const SeedArgs& a, RunOptions& o) {
  if (a.seed) {
    o.seed_from = o.seed_to = *a.seed;
    return;
  }
  if (a.range.empty()) return;
  auto dots = a.range.find("..");
  if (dots == std::string::npos) throw ScenarioError("--seeds expects A..B");
  try {
    o.seed_from = std::stoull(a.range.substr(0, dots));
    o.seed_to = std::stoull(a.range.substr(dots + 2));
  } catch (const std::exception&) {
    throw ScenarioError("--seeds expects A..B with integers");
  }
  if (*o.seed_to < *o.seed_from) throw ScenarioError("--seeds range is empty");
}

std::string default_out() {
  const char* env = std::getenv("EFD_OUT_DIR");
  return env && *env ? env : "efd-out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Failure-detector task simulator"};
  app.require_subcommand(1);

  std::string scenario_path, trace_path, out_dir = default_out(), checks = "task";
  SeedArgs seeds;
  std::optional<Time> horizon;
  std::optional<std::int64_t> liveness;

  auto* run = app.add_subcommand("run", "execute a scenario for its seeds");
  run->add_option("scenario", scenario_path)->required();
  auto* seed_opt = run->add_option("--seed", seeds.seed);
  run->add_option("--seeds", seeds.range)->excludes(seed_opt);
  run->add_option("--horizon", horizon);
  run->add_option("--out", out_dir);

  auto* verify = app.add_subcommand("verify", "re-check a recorded trace");
  verify->add_option("trace", trace_path)->required();
  verify->add_option("--check", checks);
  verify->add_option("--liveness", liveness);

  auto* extract = app.add_subcommand("extract", "emulate anti-Omega from a detector-based algorithm");
  extract->add_option("scenario", scenario_path)->required();
  auto* xseed = extract->add_option("--seed", seeds.seed);
  extract->add_option("--seeds", seeds.range)->excludes(xseed);
  extract->add_option("--out", out_dir);

  auto* validate = app.add_subcommand("validate", "parse and validate a scenario");
  validate->add_option("scenario", scenario_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*validate) {
      Scenario s = load_scenario(scenario_path);
      std::cout << s.name << ": ok (" << s.seed_to - s.seed_from + 1 << " seeds)\n";
      return kExitPass;
    }
    if (*run) {
      Scenario s = load_scenario(scenario_path);
      RunOptions o;
      apply_seeds(seeds, o);
      o.horizon = horizon;
      o.out_dir = out_dir;
      RunSummary sum = run_scenario(s, o);
      std::cout << sum.json;
      std::cerr << s.name << ": " << sum.overall.str() << "\n";
      return sum.exit;
    }
    if (*extract) {
      Scenario s = load_scenario(scenario_path);
      RunOptions o;
      apply_seeds(seeds, o);
      o.out_dir = out_dir;
      ExtractSummary sum = run_extract(s, o);
      std::uint64_t seed = o.seed_from.value_or(s.seed_from);
      for (const auto& r : sum.reports) {
        std::cout << "seed " << seed++ << ": " << r.verdict.str() << " (nodes " << r.nodes << ", dag "
                  << r.dag_vertices << ")\n";
      }
      return sum.exit;
    }
    if (*verify) {
      std::ifstream in(trace_path, std::ios::binary);
      if (!in) throw ScenarioError("cannot open " + trace_path);
      RunTrace t = read_trace(in);
      Quotas q;
      if (liveness) q.liveness = *liveness;
      Verdict v = verify_trace(t, split(checks, ','), q);
      std::cout << trace_path << ": " << v.str() << "\n";
      return exit_code(v.status);
    }
  } catch (const ScenarioError& e) {
    std::cerr << "efd: " << e.what() << "\n";
    return kExitUsage;
  } catch (const TraceFormatError& e) {
    std::cerr << "efd: malformed trace: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
