#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "efd/executor.hpp"
#include "efd/extraction.hpp"
#include "efd/tasks.hpp"

namespace efd {

inline constexpr const char* kScenarioSchema = "efd-scenario/1";

// Exit-code contract of the CLI.
enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitInconclusive = 2, kExitUsage = 64 };
int exit_code(Status s);

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Quotas {
  std::int64_t liveness = 200;   // steps a participant may take without deciding
  std::int64_t fairness = 1;     // steps every correct S-process must take
  std::int64_t max_gap = 100000; // longest wait of an eligible process
  std::int64_t w_stab = 200;
};

// Blocks stay as JSON and are interpreted by the builders below.
struct Scenario {
  std::string name;
  int n = 0;
  nlohmann::json task;
  nlohmann::json algorithm;
  nlohmann::json environment;
  nlohmann::json oracle;
  nlohmann::json policy;
  nlohmann::json participants;  // null: random count; number; or list of indices
  nlohmann::json extraction;
  std::uint64_t seed_from = 0;
  std::uint64_t seed_to = 0;  // inclusive
  Time horizon = 100000;
  std::vector<std::string> checks;
  Quotas quotas;
};

// Parses and validates; throws ScenarioError with a diagnostic.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);

TaskSpec build_task(const nlohmann::json& task, int n);
Algorithm build_algorithm(const nlohmann::json& alg, const TaskSpec& spec, int n);

struct SeedRun {
  std::uint64_t seed = 0;
  RunTrace trace;
  Verdict verdict;
};

// One seed: pattern, oracle, inputs and arrival order all derive from it.
SeedRun run_seed(const Scenario& s, std::uint64_t seed);

struct RunOptions {
  std::optional<std::uint64_t> seed_from, seed_to;
  std::optional<Time> horizon;
  std::string out_dir;  // empty: nothing written
};

struct RunSummary {
  std::vector<SeedRun> runs;  // traces dropped once written
  Verdict overall;
  int exit = kExitPass;
  std::string json;  // the summary file contents
};

// Writes <out>/<name>/seed-<S>.trace per seed and <out>/<name>/summary.json.
RunSummary run_scenario(const Scenario& s, const RunOptions& o);

// Re-checks a recorded trace. Checks: task (needs the task recorded in the
// trace meta), k_concurrent:K, fairness, personified.
Verdict verify_trace(const RunTrace& t, const std::vector<std::string>& checks, const Quotas& q);

struct ExtractSummary {
  std::vector<ExtractionReport> reports;  // per seed
  Verdict overall;
  int exit = kExitPass;
};

// Drives the extraction for every seed: writes <out>/<name>/extract-<S>.txt
// with one "emulator index set" line per emission plus the verdict.
ExtractSummary run_extract(const Scenario& s, const RunOptions& o);

}  // namespace efd
