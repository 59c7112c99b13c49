#include "fairalloc/round_engine.hpp"

#include <algorithm>
#include <string>

#include "fairalloc/error.hpp"

namespace fairalloc {

namespace {

bool mirror_agent(const LocalView& view) {
  return view.mode == Mode::Cover || view.packing.alpha < 1.0;
}

struct Network {
  const SparseNonnegMatrix& a;
  std::vector<LocalView> views;
  std::vector<AgentState> agents;
  std::vector<RoundMessage> inbox;
  std::vector<double> u;
  std::vector<double> loads;
  AccessLog log;
  LocalityAudit audit;

  Network(const SparseNonnegMatrix& matrix, std::vector<LocalView> v, bool audited)
      : a(matrix), views(std::move(v)), agents(views.size()), inbox(views.size()),
        u(matrix.cols()), loads(matrix.rows()) {
    audit.enabled = audited;
  }

  // constraint nodes: each row sums its own incident contributions
  void aggregate() {
    for (std::size_t j = 0; j < agents.size(); ++j) u[j] = agents[j].u;
    constraint_loads(a, u, loads);
  }

  void check_packing_feasible(std::uint64_t k) const {
    for (std::size_t i = 0; i < loads.size(); ++i) {
      if (loads[i] > 1.0) {
        throw Error(ErrorCode::FeasibilityViolation,
                    "round " + std::to_string(k) + ": row " + std::to_string(i + 1) +
                        " has load " + std::to_string(loads[i]) + " > 1");
      }
    }
  }

  // each agent hears only the constraints incident to its true column
  void broadcast(std::uint64_t round) {
    for (std::size_t j = 0; j < agents.size(); ++j) {
      RoundMessage& msg = inbox[j];
      msg.round = round;
      msg.loads.clear();
      for (std::size_t i : a.col_indices(j)) msg.loads.emplace_back(i, loads[i]);
    }
  }

  void update_agents() {
    AccessLog* sink = audit.enabled ? &log : nullptr;
    for (std::size_t j = 0; j < agents.size(); ++j) {
      log.clear();
      agents[j] = local_update(views[j], inbox[j], agents[j], sink);
      if (audit.enabled) check_accesses(j);
    }
    ++audit.rounds;
  }

  void prepare_agents() {
    for (std::size_t j = 0; j < agents.size(); ++j) agents[j] = agent_prepare(views[j], agents[j]);
  }

  void check_accesses(std::size_t j) {
    for (const Access& acc : log) {
      ++audit.accesses;
      if (acc.col != j || acc.row >= a.rows() || acc.col >= a.cols() ||
          !a.contains(acc.row, acc.col)) {
        ++audit.out_of_column;
        throw Error(ErrorCode::LocalityViolation,
                    "agent " + std::to_string(j + 1) + " read entry (" +
                        std::to_string(acc.row + 1) + ", " + std::to_string(acc.col + 1) + ")");
      }
    }
  }
};

std::vector<LocalView> build_views(const SparseNonnegMatrix& a, double rho, Mode mode,
                                   const PackingRegParams& packing,
                                   const CoveringRegParams& covering,
                                   const DistributedOptions& options) {
  std::vector<LocalView> views;
  views.reserve(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    views.push_back(make_local_view(a, j, rho, mode, packing, covering));
  }
  if (options.view_hook) options.view_hook(views);
  return views;
}

}  // namespace

const ViewEntry& LocalView::read(std::size_t k, AccessLog* log) const {
  const ViewEntry& e = entries.at(k);
  if (log) log->push_back({e.row, e.col});
  return e;
}

LocalView make_local_view(const SparseNonnegMatrix& a, std::size_t j, double rho, Mode mode,
                          const PackingRegParams& packing, const CoveringRegParams& covering) {
  LocalView view;
  view.j = j;
  view.m = a.rows();
  view.n = a.cols();
  view.rho = rho;
  view.mode = mode;
  view.packing = packing;
  view.covering = covering;
  const auto rows = a.col_indices(j);
  const auto logs = a.col_log_values(j);
  for (std::size_t k = 0; k < rows.size(); ++k) view.entries.push_back({rows[k], j, logs[k]});
  return view;
}

AgentState agent_prepare(const LocalView& view, AgentState agent) {
  if (!mirror_agent(view)) return agent;
  if (view.mode == Mode::Cover) {
    agent.x_hat = mirror_point(agent.z, view.covering.beta_prime);
    agent.u = agent.x_hat;
  } else {
    agent.x_hat = mirror_point(agent.z, view.packing.beta_prime);
    agent.u = transform(agent.x_hat, view.packing.alpha);
  }
  ++agent.round;
  return agent;
}

AgentState local_update(const LocalView& view, const RoundMessage& msg, AgentState agent,
                        AccessLog* log) {
  const BarrierParams barrier =
      view.mode == Mode::Cover ? barrier_of(view.covering) : barrier_of(view.packing);
  std::vector<double> terms(view.entries.size());
  for (std::size_t k = 0; k < view.entries.size(); ++k) {
    const ViewEntry& e = view.read(k, log);
    const auto it = std::lower_bound(
        msg.loads.begin(), msg.loads.end(), e.row,
        [](const std::pair<std::size_t, double>& p, std::size_t row) { return p.first < row; });
    if (it == msg.loads.end() || it->first != e.row) {
      throw Error(ErrorCode::MissingLoad, "agent " + std::to_string(view.j + 1) +
                                              " has no load for constraint " +
                                              std::to_string(e.row + 1));
    }
    terms[k] = e.log_value + row_log_weight(it->second, barrier);
  }

  if (view.mode == Mode::Cover) {
    const double t = coordinate_gradient(0.0, terms, 0.0).truncated;
    agent.z = mirror_update(agent.z, t, view.covering.epsilon, view.covering.step_size);
    return agent;
  }
  const PackingRegParams& p = view.packing;
  const double t =
      coordinate_gradient(log_gradient_prefactor(agent.x_hat, p.alpha), terms, p.alpha).truncated;
  if (p.alpha < 1.0) {
    agent.z = mirror_update(agent.z, t, p.epsilon, p.step_size);
  } else {
    agent.x_hat = packing_primal_update(agent.x_hat, t, p);
    agent.u = transform(agent.x_hat, p.alpha);
    ++agent.round;
  }
  return agent;
}

DistributedPacking run_distributed(const PackingInstance& instance, const PackingConfig& config,
                                   const DistributedOptions& options) {
  validate(config);
  const SparseNonnegMatrix& a = instance.matrix;
  const PackingRegParams params =
      derive_packing_params(a.rows(), a.cols(), instance.rho, config.alpha, config.epsilon);
  const std::uint64_t budget = config.max_iterations.value_or(params.iterations);
  const std::uint64_t stride = packing_trace_stride(config, budget);

  Network net(a, build_views(a, instance.rho, Mode::Pack, params, {}, options), options.audit);
  PackingState state = init_packing(instance, params);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    net.agents[j].x_hat = state.x_hat[j];
    net.agents[j].u = state.u[j];
    if (!state.z.empty()) net.agents[j].z = state.z[j];
  }

  auto collect = [&](std::uint64_t k) {
    state.k = k;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      state.x_hat[j] = net.agents[j].x_hat;
      state.u[j] = net.agents[j].u;
      if (!state.z.empty()) state.z[j] = net.agents[j].z;
    }
  };
  auto observe = [&](std::uint64_t k) {
    if (options.on_loads) options.on_loads(k, net.loads);
  };

  net.aggregate();
  net.check_packing_feasible(0);
  observe(0);
  state.trace.push_back(packing_trace_row(instance, params, state.x_hat, state.u, net.loads, 0));

  bool stopped_early = false;
  const bool mirror = params.alpha < 1.0;
  for (std::uint64_t round = 1; round <= budget; ++round) {
    if (mirror) {
      net.prepare_agents();
      net.aggregate();
      net.check_packing_feasible(round);
      observe(round);
      net.broadcast(round);
      net.update_agents();
    } else {
      net.broadcast(round);
      net.update_agents();
      net.aggregate();
      net.check_packing_feasible(round);
      observe(round);
    }
    if (round % stride == 0 || round == budget) {
      collect(round);
      state.trace.push_back(
          packing_trace_row(instance, params, state.x_hat, state.u, net.loads, round));
      if (config.early_stop && early_stop_reached(state.trace.back(), instance, params)) {
        stopped_early = true;
        break;
      }
    }
  }
  collect(net.audit.rounds);

  DistributedPacking out{finalize_packing(instance, params, state), net.audit};
  out.solution.stopped_early = stopped_early;
  return out;
}

DistributedCovering run_distributed(const CoveringInstance& instance,
                                    const CoveringConfig& config,
                                    const DistributedOptions& options) {
  validate(config);
  const SparseNonnegMatrix& a = instance.matrix;
  const CoveringRegParams params =
      derive_covering_params(a.rows(), a.cols(), instance.rho, config.beta, config.epsilon);
  const std::uint64_t budget = config.max_iterations.value_or(params.iterations);
  const std::uint64_t stride = covering_trace_stride(config, budget);

  Network net(a, build_views(a, instance.rho, Mode::Cover, {}, params, options), options.audit);
  CoveringState state = init_covering(instance, params);
  for (std::size_t j = 0; j < a.cols(); ++j) {
    net.agents[j].x_hat = state.x[j];
    net.agents[j].u = state.x[j];
    net.agents[j].z = state.z[j];
  }

  auto collect = [&](std::uint64_t k) {
    state.k = k;
    for (std::size_t j = 0; j < a.cols(); ++j) {
      state.x[j] = net.agents[j].x_hat;
      state.z[j] = net.agents[j].z;
    }
  };

  net.aggregate();
  if (options.on_loads) options.on_loads(0, net.loads);
  state.trace.push_back(covering_trace_row(instance, params, state.x, state.y_avg, net.loads, 0));

  for (std::uint64_t round = 1; round <= budget; ++round) {
    net.prepare_agents();
    net.aggregate();
    // constraint nodes keep their own share of the averaged certificate
    for (std::size_t i = 0; i < a.rows(); ++i) {
      state.y_avg[i] = covering_average(state.y_avg[i], net.loads[i], params.beta, round);
    }
    if (options.on_loads) options.on_loads(round, net.loads);
    net.broadcast(round);
    net.update_agents();
    if (round % stride == 0 || round == budget) {
      collect(round);
      state.trace.push_back(
          covering_trace_row(instance, params, state.x, state.y_avg, net.loads, round));
    }
  }
  collect(net.audit.rounds);
  return {finalize_covering(instance, params, state, budget >= params.iterations), net.audit};
}

}  // namespace fairalloc
