#include "efd/harness.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "efd/bg.hpp"
#include "efd/checks.hpp"

namespace efd {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code(Status s) {
  switch (s) {
    case Status::Pass:
      return kExitPass;
    case Status::Fail:
      return kExitFail;
    case Status::Inconclusive:
      return kExitInconclusive;
  }
  return kExitFail;
}

namespace {

[[noreturn]] void bad(const std::string& what) { throw ScenarioError(what); }

int get_int(const json& j, const char* key, std::optional<int> dflt = std::nullopt) {
  if (!j.contains(key)) {
    if (dflt) return *dflt;
    bad(std::string("missing field '") + key + "'");
  }
  if (!j[key].is_number_integer()) bad(std::string("field '") + key + "' must be an integer");
  return j[key].get<int>();
}

std::string get_str(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) bad(std::string("missing string field '") + key + "'");
  return j[key].get<std::string>();
}

Value to_value(const json& j) {
  if (j.is_null()) return Value();
  if (j.is_number_integer()) return Value(j.get<std::int64_t>());
  if (j.is_string()) return Value::parse(j.get<std::string>());
  bad("values must be null, integers or value strings, got " + j.dump());
}

Vec to_vec(const json& j) {
  if (!j.is_array()) bad("expected an array of values, got " + j.dump());
  Vec v;
  for (const auto& x : j) v.push_back(to_value(x));
  return v;
}

std::set<int> to_index_set(const json& j, int m) {
  if (!j.is_array()) bad("expected a list of process indices");
  std::set<int> s;
  for (const auto& x : j) {
    if (!x.is_number_integer() || x.get<int>() < 1 || x.get<int>() > m) bad("process index out of range in " + j.dump());
    s.insert(x.get<int>());
  }
  return s;
}

FailurePattern build_pattern(const json& env, int n, Rng& rng) {
  if (env.contains("crashes")) {
    std::map<int, Time> c;
    for (const auto& [k, v] : env["crashes"].items()) c[std::stoi(k)] = v.get<Time>();
    return FailurePattern::make(n, c);
  }
  int t = get_int(env, "t", 0);
  if (t < 0 || t >= n) bad("environment t must be in 0..n-1");
  return sample_pattern(n, t, env.value("max_crash", Time{300}), rng);
}

std::unique_ptr<SchedulePolicy> build_policy(const json& p, int m, int n, const std::vector<int>& arrival,
                                             std::uint64_t seed) {
  std::string kind = p.value("kind", "fair_random");
  std::int64_t window = p.value("window", std::int64_t{8} * (m + n));
  if (kind == "fair_random") return std::make_unique<FairRandomPolicy>(seed, window);
  if (kind == "round_robin") return std::make_unique<RoundRobinPolicy>();
  if (kind == "personified") return std::make_unique<PersonifiedPolicy>(seed, window);
  if (kind == "k_concurrent") return std::make_unique<KConcurrentPolicy>(get_int(p, "k"), arrival, seed, window);
  bad("unknown policy kind '" + kind + "'");
}

void check_list(const std::vector<std::string>& checks) {
  for (const auto& c : checks) {
    if (c == "task" || c == "fairness" || c == "personified") continue;
    if (c.rfind("k_concurrent:", 0) == 0) {
      try {
        if (std::stoi(c.substr(13)) >= 1) continue;
      } catch (const std::exception&) {
      }
    }
    bad("unknown check '" + c + "'");
  }
}

std::uint64_t scenario_key(const Scenario& s) {
  Hasher h;
  h.add_str(s.name);
  h.add_str(s.task.dump());
  h.add_str(s.algorithm.dump());
  return h.value();
}

std::string hex(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << x;
  return os.str();
}

}  // namespace

TaskSpec build_task(const json& task, int n) {
  std::string kind = get_str(task, "kind");
  int m = get_int(task, "m", n);
  try {
    if (kind == "renaming") return renaming(get_int(task, "j"), get_int(task, "ell"), m);
    if (kind == "uk_agreement") {
      std::set<int> u;
      if (task.contains("u")) {
        u = to_index_set(task["u"], m);
      } else {
        for (int i = 1; i <= m; ++i) u.insert(i);
      }
      return uk_agreement(u, get_int(task, "k"), m);
    }
    if (kind == "consensus") {
      std::set<int> u;
      for (int i = 1; i <= m; ++i) u.insert(i);
      return uk_agreement(u, 1, m);
    }
    if (kind == "table") {
      std::vector<TableRow> rows;
      if (!task.contains("rows") || !task["rows"].is_array()) bad("table task needs 'rows'");
      for (const auto& r : task["rows"]) rows.push_back({to_vec(r.at("inputs")), to_vec(r.at("outputs"))});
      return table_task(m, rows);
    }
  } catch (const SpecError& e) {
    bad(std::string("task: ") + e.what());
  } catch (const json::exception& e) {
    bad(std::string("task: ") + e.what());
  }
  bad("unknown task kind '" + kind + "'");
}

namespace {

Protocol build_protocol(const json& alg, const TaskSpec& spec, int n) {
  std::string kind = get_str(alg, "kind");
  int m = spec.m;
  if (kind == "k_concurrent_renaming")
    return k_concurrent_renaming(get_int(alg, "j"), get_int(alg, "k"), m, alg.value("broken", false));
  if (kind == "universal") return one_concurrent_universal(spec);
  if (kind == "ksa") return ksa_protocol(m);
  if (kind == "s_help") return s_help_set_agreement(n);
  if (kind == "leader_consensus") {
    std::set<int> props;
    if (alg.contains("proposers")) {
      props = to_index_set(alg["proposers"], m);
    } else {
      for (int i = 1; i <= m; ++i) props.insert(i);
    }
    return leader_consensus(m, n, props);
  }
  bad("unknown algorithm kind '" + kind + "'");
}

}  // namespace

Algorithm build_algorithm(const json& alg, const TaskSpec& spec, int n) {
  try {
    if (get_str(alg, "kind") == "double_simulation") {
      if (!alg.contains("inner")) bad("double_simulation needs an 'inner' algorithm");
      Protocol inner = build_protocol(alg["inner"], spec, n);
      int k = get_int(alg, "k");
      if (k < 1 || k >= n) bad("double_simulation needs 1 <= k < n");
      return solve_k_concurrent_with_anti_omega(spec, inner, k, n);
    }
    Protocol p = build_protocol(alg, spec, n);
    if (p.m != spec.m) bad(p.name + " is for " + std::to_string(p.m) + " processes, the task for " + std::to_string(spec.m));
    return p.algorithm();
  } catch (const SpecError& e) {
    bad(std::string("algorithm: ") + e.what());
  } catch (const std::invalid_argument& e) {
    bad(std::string("algorithm: ") + e.what());
  }
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) bad("scenario must be a JSON object");
  if (j.value("schema", "") != kScenarioSchema) bad(std::string("schema must be \"") + kScenarioSchema + "\"");
  Scenario s;
  try {
    s.name = j.value("name", "scenario");
    if (s.name.empty() || s.name.find('/') != std::string::npos) bad("name must be a plain non-empty word");
    s.n = get_int(j, "n");
    if (s.n < 1) bad("n must be positive");
    for (const char* k : {"task", "algorithm"})
      if (!j.contains(k) || !j[k].is_object()) bad(std::string("missing object '") + k + "'");
    s.task = j["task"];
    s.algorithm = j["algorithm"];
    s.environment = j.value("environment", json::object());
    s.oracle = j.value("oracle", json{{"kind", "trivial"}});
    s.policy = j.value("policy", json{{"kind", "fair_random"}});
    s.participants = j.value("participants", json());
    s.extraction = j.value("extraction", json());
    if (j.contains("seed")) {
      s.seed_from = s.seed_to = j["seed"].get<std::uint64_t>();
    } else if (j.contains("seeds")) {
      s.seed_from = j["seeds"].at("from").get<std::uint64_t>();
      s.seed_to = j["seeds"].at("to").get<std::uint64_t>();
      if (s.seed_to < s.seed_from) bad("seeds.to must not be below seeds.from");
    }
    s.horizon = j.value("horizon", Time{100000});
    if (s.horizon < 1) bad("horizon must be positive");
    s.checks = j.value("checks", std::vector<std::string>{"task"});
    check_list(s.checks);
    if (j.contains("quotas")) {
      const auto& q = j["quotas"];
      s.quotas.liveness = q.value("liveness", s.quotas.liveness);
      s.quotas.fairness = q.value("fairness", s.quotas.fairness);
      s.quotas.max_gap = q.value("max_gap", s.quotas.max_gap);
      s.quotas.w_stab = q.value("w_stab", s.quotas.w_stab);
    }
  } catch (const json::exception& e) {
    bad(std::string("scenario: ") + e.what());
  }
  // Build once so that bad parameters surface before anything runs.
  TaskSpec spec = build_task(s.task, s.n);
  build_algorithm(s.algorithm, spec, s.n);
  try {
    parse_fd_kind(s.oracle.value("kind", "trivial"));
    Rng rng(0);
    FailurePattern f = build_pattern(s.environment, s.n, rng);
    make_oracle(parse_fd_kind(s.oracle.value("kind", "trivial")), f, s.oracle.value("k", 1), 0);
    std::vector<int> arrival;
    build_policy(s.policy, spec.m, s.n, arrival, 0);
  } catch (const FailureError& e) {
    bad(e.what());
  } catch (const json::exception& e) {
    bad(std::string("scenario: ") + e.what());
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

SeedRun run_seed(const Scenario& s, std::uint64_t seed) {
  TaskSpec spec = build_task(s.task, s.n);
  Algorithm alg = build_algorithm(s.algorithm, spec, s.n);
  int m = spec.m;
  Rng rng(mix64(seed, scenario_key(s)));
  FailurePattern f = build_pattern(s.environment, s.n, rng);
  OracleOptions oo;
  oo.mean_stabilization = s.oracle.value("mean_stabilization", oo.mean_stabilization);
  FdHistory h = make_oracle(parse_fd_kind(s.oracle.value("kind", "trivial")), f, s.oracle.value("k", 1), seed, oo);

  // Participants and arrival order.
  std::vector<int> ids(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) ids[i] = i + 1;
  rng.shuffle(ids);
  std::vector<int> chosen;
  const auto& p = s.participants;
  if (p.is_array()) {
    for (int i : to_index_set(p, m)) chosen.push_back(i);
    std::vector<int> order;
    for (int i : ids)
      if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) order.push_back(i);
    chosen = order;
  } else {
    int most = m;
    if (get_str(s.task, "kind") == "renaming") most = get_int(s.task, "j");
    int count = p.is_number_integer() ? p.get<int>() : 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(most)));
    if (count < 1 || count > m) bad("participant count out of range");
    chosen.assign(ids.begin(), ids.begin() + count);
  }
  Vec in(static_cast<std::size_t>(m));
  for (int tries = 0;; ++tries) {
    for (int i : chosen) {
      const auto& dom = spec.input_domain[i - 1];
      if (dom.empty()) bad("p" + std::to_string(i) + " has an empty input domain");
      in[i - 1] = dom[rng.below(dom.size())];
    }
    if (spec.in_inputs(in)) break;
    if (tries == 100) bad("could not draw an input vector in I for the chosen participants");
  }

  auto pol = build_policy(s.policy, m, s.n, chosen, seed);
  ExecOptions o;
  o.horizon = s.horizon;
  o.digest = hex(mix64(scenario_key(s), seed));
  SeedRun r;
  r.seed = seed;
  r.trace = execute(alg, m, s.n, f, h, *pol, in, o);
  r.trace.meta["scenario"] = s.name;
  r.trace.meta["seed"] = std::to_string(seed);
  r.trace.meta["task"] = s.task.dump();
  r.trace.meta["algorithm"] = alg.name;
  r.trace.meta["oracle"] = std::string(fd_kind_name(h.kind())) + " tau=" + std::to_string(h.stabilization().tau) +
                           " q=" + std::to_string(h.stabilization().q_star);
  r.verdict = verify_trace(r.trace, s.checks, s.quotas);
  return r;
}

Verdict verify_trace(const RunTrace& t, const std::vector<std::string>& checks, const Quotas& q) {
  check_list(checks);
  Verdict v = Verdict::pass();
  for (const auto& c : checks) {
    Verdict one;
    if (c == "task") {
      auto it = t.meta.find("task");
      if (it == t.meta.end()) throw ScenarioError("trace records no task; cannot check task satisfaction");
      json task;
      try {
        task = json::parse(it->second);
      } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("trace task meta is not JSON: ") + e.what());
      }
      TaskSpec spec = build_task(task, t.n);
      if (spec.m != t.m) throw ScenarioError("trace has " + std::to_string(t.m) + " C-processes, its task " + std::to_string(spec.m));
      one = check_satisfies(spec, t, q.liveness);
    } else if (c == "fairness") {
      one = check_fairness_counts(t, t.pattern, q.fairness, q.max_gap);
      // A run cut at the horizon has not shown its whole schedule.
      if (!t.complete && one.status == Status::Fail) one = Verdict::inconclusive(one.detail);
    } else if (c == "personified") {
      one = check_personified(t, t.pattern, q.max_gap);
    } else {
      one = check_k_concurrent(t, std::stoi(c.substr(13)));
    }
    if (!one.ok()) one.detail = c + ": " + one.detail;
    v = worst(v, one);
  }
  return v;
}

RunSummary run_scenario(const Scenario& s, const RunOptions& o) {
  Scenario sc = s;
  if (o.seed_from) sc.seed_from = *o.seed_from;
  if (o.seed_to) sc.seed_to = *o.seed_to;
  if (o.horizon) sc.horizon = *o.horizon;
  fs::path dir;
  if (!o.out_dir.empty()) {
    dir = fs::path(o.out_dir) / sc.name;
    fs::create_directories(dir);
  }
  RunSummary sum;
  sum.overall = Verdict::pass();
  json seeds = json::array();
  json first = nullptr;
  std::int64_t decisions = 0, steps = 0;
  int counts[3] = {0, 0, 0};
  for (std::uint64_t seed = sc.seed_from;; ++seed) {
    SeedRun r = run_seed(sc, seed);
    auto io = extract_io(r.trace);
    std::int64_t dec = 0;
    for (const auto& x : io.outputs)
      if (!x.is_bottom()) ++dec;
    decisions += dec;
    steps += static_cast<std::int64_t>(r.trace.events.size());
    ++counts[static_cast<int>(r.verdict.status)];
    if (r.verdict.status == Status::Fail && first.is_null())
      first = {{"seed", seed}, {"step", r.verdict.step}, {"detail", r.verdict.detail}};
    seeds.push_back({{"seed", seed},
                     {"status", status_name(r.verdict.status)},
                     {"steps", r.trace.events.size()},
                     {"decisions", dec},
                     {"stop", stop_reason_name(r.trace.stop)},
                     {"detail", r.verdict.detail}});
    sum.overall = worst(sum.overall, r.verdict);
    if (!dir.empty()) {
      std::ofstream out(dir / ("seed-" + std::to_string(seed) + ".trace"), std::ios::binary);
      write_trace(out, r.trace);
      r.trace = RunTrace{};
    }
    sum.runs.push_back(std::move(r));
    if (seed == sc.seed_to) break;
  }
  json j = {{"scenario", sc.name},
            {"runs", sum.runs.size()},
            {"pass", counts[0]},
            {"fail", counts[1]},
            {"inconclusive", counts[2]},
            {"decisions", decisions},
            {"steps", steps},
            {"first_violation", first},
            {"seeds", seeds}};
  sum.json = j.dump(2) + "\n";
  sum.exit = exit_code(sum.overall.status);
  if (!dir.empty()) {
    std::ofstream out(dir / "summary.json", std::ios::binary);
    out << sum.json;
  }
  return sum;
}

ExtractSummary run_extract(const Scenario& s, const RunOptions& o) {
  Scenario sc = s;
  if (o.seed_from) sc.seed_from = *o.seed_from;
  if (o.seed_to) sc.seed_to = *o.seed_to;
  TaskSpec spec = build_task(sc.task, sc.n);
  const json& ex = sc.extraction.is_object() ? sc.extraction : json::object();
  ExtractionConfig cfg;
  try {
    cfg.a = build_protocol(sc.algorithm, spec, sc.n);
  } catch (const SpecError& e) {
    bad(std::string("algorithm: ") + e.what());
  }
  if (cfg.a.s.size() != static_cast<std::size_t>(sc.n)) bad("extraction needs an algorithm with an S-part on all n S-processes");
  cfg.spec = spec;
  cfg.k = ex.value("k", 1);
  if (cfg.k < 1 || cfg.k >= sc.n) bad("extraction k must be in 1..n-1");
  cfg.budget = ex.value("budget", std::int64_t{20000});
  cfg.w_stab = sc.quotas.w_stab;
  fs::path dir;
  if (!o.out_dir.empty()) {
    dir = fs::path(o.out_dir) / sc.name;
    fs::create_directories(dir);
  }
  ExtractSummary sum;
  sum.overall = Verdict::pass();
  for (std::uint64_t seed = sc.seed_from;; ++seed) {
    Rng rng(mix64(seed, scenario_key(sc)));
    cfg.f = build_pattern(sc.environment, sc.n, rng);
    OracleOptions oo;
    oo.mean_stabilization = sc.oracle.value("mean_stabilization", oo.mean_stabilization);
    cfg.h = make_oracle(parse_fd_kind(sc.oracle.value("kind", "trivial")), cfg.f, sc.oracle.value("k", 1), seed, oo);
    cfg.seed = ex.value("exchange_lag", false) ? seed + 1 : 0;
    auto rep = extract_anti_omega(cfg);
    if (!dir.empty()) {
      std::ofstream out(dir / ("extract-" + std::to_string(seed) + ".txt"), std::ios::binary);
      out << "# efd-extract 1\n# pattern " << cfg.f.str() << "\n# tau " << cfg.h.stabilization().tau << " q "
          << cfg.h.stabilization().q_star << "\n";
      for (const auto& e : rep.stream) {
        out << e.emulator << ' ' << e.index;
        for (int x : e.set) out << ' ' << x;
        out << '\n';
      }
      out << "# verdict " << rep.verdict.str() << "\n";
    }
    sum.overall = worst(sum.overall, rep.verdict);
    rep.stream.clear();
    sum.reports.push_back(std::move(rep));
    if (seed == sc.seed_to) break;
  }
  sum.exit = exit_code(sum.overall.status);
  return sum;
}

}  // namespace efd
