#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "efd/algorithms.hpp"
#include "efd/failure.hpp"
#include "efd/rng.hpp"
#include "efd/tasks.hpp"

namespace efd {

// [q, d, seq]: the seq-th query of q returned d at `time`. seen[q'-1] is the
// number of q' vertices that causally precede this one (for q' = q, seq - 1).
struct DagVertex {
  int q = 0;
  std::int64_t seq = 0;
  Time time = 0;
  Value d;
  std::vector<std::int64_t> seen;
};

struct VertexRef {
  int q = 0;
  std::int64_t seq = 0;
  friend bool operator==(const VertexRef&, const VertexRef&) = default;
  friend auto operator<=>(const VertexRef&, const VertexRef&) = default;
};

// Sample of detector outputs. Edges are implicit in `seen`: u -> v iff
// u.seq <= v.seen[u.q - 1].
class SampleDag {
 public:
  SampleDag() = default;
  explicit SampleDag(int n) : n_(n), by_q_(static_cast<std::size_t>(n)) {}

  int n() const { return n_; }
  std::int64_t count(int q) const { return static_cast<std::int64_t>(by_q_[q - 1].size()); }
  std::size_t size() const;
  const DagVertex& vertex(int q, std::int64_t seq) const { return by_q_[q - 1][seq - 1]; }
  const DagVertex& vertex(VertexRef r) const { return vertex(r.q, r.seq); }

  // Appends q's next vertex; `seen` may only mention existing vertices.
  const DagVertex& add(int q, Time t, Value d, std::vector<std::int64_t> seen);

  bool precedes(VertexRef u, VertexRef v) const;
  std::vector<std::pair<VertexRef, VertexRef>> edges() const;
  bool acyclic() const;  // Kahn's algorithm over edges()

 private:
  int n_ = 0;
  std::vector<std::vector<DagVertex>> by_q_;
};

// Grows a DAG one round at a time: every S-process alive at its slot queries
// the detector, after learning the others' vertices. With a non-zero seed the
// exchange lags up to two rounds per peer.
class DagBuilder {
 public:
  DagBuilder(FdHistory h, FailurePattern f, std::uint64_t seed = 0);
  void round(SampleDag& g);
  std::int64_t rounds() const { return round_; }

 private:
  FdHistory h_;
  FailurePattern f_;
  std::uint64_t seed_;
  Rng rng_;
  std::int64_t round_ = 0;
  std::vector<std::vector<std::int64_t>> known_;  // known_[q-1][q'-1]
};

SampleDag build_dag(const FdHistory& h, const FailurePattern& f, int rounds, std::uint64_t seed = 0);

// Visible vertex count per S-process (index q-1).
using DagView = std::vector<std::int64_t>;
DagView full_view(const SampleDag& g);

// A_sim: C-processes run A's C-part on simulated memory and BG-simulate A's
// S-part with safe agreement per simulated read or query. A simulated query
// of q takes q's next visible vertex that causally follows every vertex used
// so far; with none, q's code stalls. Each step() is one step of p_j.
class ASim {
 public:
  ASim(std::shared_ptr<const Protocol> a, std::shared_ptr<const SampleDag> g, Vec inputs,
       bool record = false);

  void step(int j, const DagView& view);

  int m() const { return a_->m; }
  int n() const { return g_->n(); }
  bool decided(int j) const { return c_[j - 1].decided; }
  bool appeared(int j) const { return c_[j - 1].steps > 0; }
  const Value& output(int j) const { return c_[j - 1].out; }
  std::int64_t code_steps(int q) const { return s_[q - 1].steps; }
  std::int64_t steps() const { return steps_; }
  // S-indices ordered by latest appearance, most recent first; codes that
  // never stepped are left out.
  std::vector<int> latest_codes() const;
  // Simulated run of A: C steps and applied S-code steps, an agreed read or
  // query placed where the winning simulator performed it. Queries carry the
  // vertex time. Only filled when recording.
  RunTrace simulated() const;

 private:
  struct CSlot {
    bool started = false;
    bool decided = false;
    bool s_phase = false;  // next step simulates an S-code
    int window = 0;        // code q whose safe agreement we entered at level 1
    int rr = 1;            // next code to try
    std::int64_t steps = 0;
    Value state;
    Action pending;
    Value out;
  };
  struct Proposal {
    int level = 0;  // 0 none, 1 unsafe, 2 safe, 3 withdrawn
    Value value;
    std::int64_t seq = 0;  // queries: vertex
    std::int64_t key = 0;  // log position of the proposal
  };
  struct SSlot {
    Value state;
    Action pending;
    std::int64_t steps = 0;
    std::int64_t last_seq = 0;  // last vertex used
    std::int64_t last_at = -1;  // steps_ at last appearance
    std::vector<Proposal> sa;   // per simulator, for the pending action
  };

  void c_step(int j);
  bool s_step(int j, int q, const DagView& view);
  std::optional<std::int64_t> eligible(int q, const DagView& view) const;
  void apply(int q, const Value& obs, std::int64_t seq, std::int64_t key);
  void log(ProcessId p, const Action& a, const Value& obs, Time t, std::int64_t key = -1);

  std::shared_ptr<const Protocol> a_;
  std::shared_ptr<const SampleDag> g_;
  Vec inputs_;
  bool record_;
  MemoryStore mem_;
  std::vector<CSlot> c_;
  std::vector<SSlot> s_;
  std::int64_t steps_ = 0;
  Time clock_ = 0;
  RunTrace trace_;
  std::vector<std::int64_t> keys_;  // sort key per logged event
};

// Replays a recorded A_sim run against A's automata and the DAG: actions
// follow from the observations, reads return the latest simulated write, and
// every query of q returns d of a q vertex with increasing seq.
Verdict replay_simulated(const Protocol& a, const SampleDag& g, const RunTrace& sim);

// One visited explore() call.
struct NodeInfo {
  std::size_t input_index = 0;
  std::size_t perm_index = 0;
  std::size_t depth = 0;       // |σ|
  int last = 0;                // last entry of σ, 0 at a root
  std::uint64_t sigma_hash = 0;
  std::vector<int> corridor;   // P after replacing decided members
  int undecided = 0;           // participating undecided C-processes
  std::vector<int> output;     // emitted n-k S-indices, ascending
};

// Corridor-based depth-first exploration of (k+1)-concurrent A_sim runs over
// every full input vector (canonical order) and arrival order (lexicographic).
// Corridors P' ⊆ P go by (|P'|, sorted indices); within P', p_j in π order.
class Explorer {
 public:
  Explorer(std::shared_ptr<const Protocol> a, std::shared_ptr<const SampleDag> g, std::vector<Vec> inputs,
           int k);

  // Visits the next node; false once everything was explored.
  bool step(const DagView& view, NodeInfo* info = nullptr);
  std::int64_t visited() const { return visited_; }

 private:
  struct Frame {
    ASim sim;
    std::size_t input_index = 0;
    std::size_t perm_index = 0;
    std::size_t depth = 0;
    std::vector<int> corridor;
    bool entered = false;
    std::vector<std::pair<std::vector<int>, int>> children;
    std::size_t next = 0;
    int last = 0;
    std::uint64_t hash = 0;
  };

  bool open_root();
  std::vector<int> output_of(const ASim& sim) const;

  std::shared_ptr<const Protocol> a_;
  std::shared_ptr<const SampleDag> g_;
  std::vector<Vec> inputs_;
  int k_;
  std::vector<std::vector<int>> perms_;
  std::size_t input_idx_ = 0;
  std::size_t perm_idx_ = 0;
  std::vector<Frame> stack_;
  std::int64_t visited_ = 0;
};

struct ExtractionConfig {
  Protocol a;
  TaskSpec spec;  // ℐ: its full input vectors
  int k = 1;
  FailurePattern f;
  FdHistory h;
  std::int64_t budget = 20000;  // explore() calls per emulator
  std::int64_t w_stab = 200;
  std::uint64_t seed = 0;       // DAG exchange lag and emulator speeds
  bool log_nodes = false;
};

struct Emission {
  int emulator = 0;
  std::int64_t index = 0;
  std::vector<int> set;
};

struct ExtractionReport {
  std::vector<Emission> stream;
  Verdict verdict;
  int excluded = 0;               // correct S-index missing from the final window
  std::vector<int> corridor;      // P at the last node of the first correct emulator
  int max_undecided = 0;
  std::int64_t nodes = 0;
  std::int64_t adoptions = 0;
  std::size_t dag_vertices = 0;
  std::vector<std::vector<NodeInfo>> nodes_log;  // per emulator, when logging
};

// Every correct S-process grows the shared sample and runs the exploration
// one node per turn (one or two, by seed), adopting a peer's exploration when
// the peer has visited more nodes. PASS iff some correct S-index is missing
// from the last w_stab emissions of every correct emulator; INCONCLUSIVE if no
// such index or fewer emissions.
ExtractionReport extract_anti_omega(const ExtractionConfig& cfg);

}  // namespace efd
