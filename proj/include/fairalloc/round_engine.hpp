#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "fairalloc/covering.hpp"
#include "fairalloc/packing.hpp"
#include "fairalloc/problem.hpp"
#include "fairalloc/regularization.hpp"

namespace fairalloc {

enum class Mode { Pack, Cover };

/// Matrix entry (row, col) an agent read during a round.
struct Access {
  std::size_t row = 0;
  std::size_t col = 0;
};

/// Collects reads when auditing is on; a null log means no recording.
using AccessLog = std::vector<Access>;

struct ViewEntry {
  std::size_t row = 0;
  std::size_t col = 0;
  double log_value = 0.0;  // ln A_ij
};

/// Everything agent j may know: its own column plus global scalars.
struct LocalView {
  std::size_t j = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  double rho = 1.0;
  Mode mode = Mode::Pack;
  PackingRegParams packing;    // meaningful in Pack mode
  CoveringRegParams covering;  // meaningful in Cover mode
  std::vector<ViewEntry> entries;

  /// Reads entry k, recording the access in `log` when given.
  const ViewEntry& read(std::size_t k, AccessLog* log) const;
};

/// Loads of the receiver's incident constraints, keyed by constraint index
/// in ascending order.
struct RoundMessage {
  std::uint64_t round = 0;
  std::vector<std::pair<std::size_t, double>> loads;
};

struct AgentState {
  double x_hat = 0.0;  // for covering, the packing-side coordinate x_j
  double z = 0.0;      // mirror state (alpha < 1 and covering)
  double u = 0.0;      // allocation F_alpha(x_hat)
  std::uint64_t round = 0;
};

struct LocalityAudit {
  std::uint64_t rounds = 0;
  std::uint64_t accesses = 0;
  std::uint64_t out_of_column = 0;
  bool enabled = false;

  bool passed() const noexcept { return out_of_column == 0; }
};

LocalView make_local_view(const SparseNonnegMatrix& a, std::size_t j, double rho, Mode mode,
                          const PackingRegParams& packing, const CoveringRegParams& covering);

/// Mirror-descent agents (packing alpha < 1, covering) recover their iterate
/// from z at the start of a round; other agents are left as they are.
AgentState agent_prepare(const LocalView& view, AgentState agent);

/// Gradient coordinate from the view and the message alone, then the
/// regime's update. Throws MissingLoad if an incident load is absent.
AgentState local_update(const LocalView& view, const RoundMessage& msg, AgentState agent,
                        AccessLog* log = nullptr);

struct DistributedOptions {
  bool audit = true;
  /// Called with (k, loads of the k-th iterate) whenever constraint nodes
  /// aggregate a new set of loads.
  std::function<void(std::uint64_t, std::span<const double>)> on_loads;
  /// Test hook: edit the agents' views before the first round.
  std::function<void(std::vector<LocalView>&)> view_hook;
};

struct DistributedPacking {
  PackingSolution solution;
  LocalityAudit audit;
};

struct DistributedCovering {
  CoveringSolution solution;
  LocalityAudit audit;
};

/// Lockstep rounds: constraint nodes aggregate and broadcast loads, then every
/// agent updates. Output matches solve_packing / solve_covering bit for bit.
/// Throws LocalityViolation when the audit catches an out-of-column read.
DistributedPacking run_distributed(const PackingInstance& instance, const PackingConfig& config,
                                   const DistributedOptions& options = {});
DistributedCovering run_distributed(const CoveringInstance& instance,
                                    const CoveringConfig& config,
                                    const DistributedOptions& options = {});

}  // namespace fairalloc
