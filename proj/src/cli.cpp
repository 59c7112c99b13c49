#include "fairalloc/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>

#include "fairalloc/covering.hpp"
#include "fairalloc/error.hpp"
#include "fairalloc/matrix_market.hpp"
#include "fairalloc/problem.hpp"
#include "fairalloc/round_engine.hpp"
#include "json_writer.hpp"

namespace fairalloc {

namespace {

struct RunRequest {
  std::string mode = "pack";
  std::optional<double> alpha;
  std::optional<double> beta;
  double epsilon = 0.1;
  std::string input;
  std::string output;
  std::string trace;
  std::string engine = "monolithic";
  std::optional<std::uint64_t> max_iters;
  bool early_stop = false;
  std::optional<std::uint64_t> trace_stride;
};

const char* packing_regime(double alpha) {
  if (alpha < 1.0) return "alpha<1";
  if (alpha == 1.0) return "alpha=1";
  return "alpha>1";
}

void write_audit(JsonWriter& w, const std::optional<LocalityAudit>& audit) {
  if (!audit) {
    w.null_field("locality_audit");
    return;
  }
  w.begin_object("locality_audit")
      .field("rounds", audit->rounds)
      .field("accesses", audit->accesses)
      .field("out_of_column", audit->out_of_column)
      .field("passed", audit->passed())
      .end_object();
}

std::string packing_json(const RunRequest& req, const PackingInstance& instance,
                         const PackingSolution& sol, const std::optional<LocalityAudit>& audit,
                         double seconds) {
  const PackingRegParams& p = sol.params;
  JsonWriter w;
  w.begin_object()
      .field("mode", "pack")
      .field("engine", req.engine)
      .field("alpha", p.alpha)
      .field("epsilon", p.epsilon)
      .field("rows", static_cast<std::uint64_t>(instance.matrix.rows()))
      .field("cols", static_cast<std::uint64_t>(instance.matrix.cols()))
      .field("solution", std::span<const double>(sol.x))
      .field("objective", sol.utility)
      .field("feasible", sol.max_load <= 1.0)
      .field("max_load", sol.max_load)
      .field("iterations", sol.iterations_run)
      .field("stopped_early", sol.stopped_early);
  w.begin_object("params")
      .field("beta", p.beta)
      .field("beta_prime", p.beta_prime)
      .field("h", p.step_size)
      .field("K", p.iterations)
      .field("logC", p.log_c)
      .end_object();
  w.begin_object("guarantee")
      .field("regime", packing_regime(p.alpha))
      .field("eps_f", sol.eps_f)
      .field("multiplier", sol.guarantee_multiplier)
      .field("bound", sol.guarantee_multiplier * std::abs(sol.eps_f))
      .field("optimum_stand_in", "returned objective")
      .end_object();
  if (sol.dual_certificate) {
    w.field("dual_certificate", std::span<const double>(*sol.dual_certificate));
  } else {
    w.null_field("dual_certificate");
  }
  if (sol.gap) {
    w.field("gap", *sol.gap);
  } else {
    w.null_field("gap");
  }
  w.field("slackness_warnings", sol.slackness_warnings);
  w.begin_object("scaling")
      .field("scale", instance.scaling.scale)
      .field("rho", instance.rho)
      .field("alpha_used", instance.scaling.alpha_used)
      .end_object();
  write_audit(w, audit);
  w.field("wall_clock_seconds", seconds).end_object();
  return w.str();
}

std::string covering_json(const RunRequest& req, const CoveringInstance& instance,
                          const CoveringSolution& sol, const std::optional<LocalityAudit>& audit,
                          double seconds) {
  const CoveringRegParams& p = sol.params;
  JsonWriter w;
  w.begin_object()
      .field("mode", "cover")
      .field("engine", req.engine)
      .field("beta", *req.beta)
      .field("epsilon", p.epsilon)
      .field("rows", static_cast<std::uint64_t>(instance.matrix.rows()))
      .field("cols", static_cast<std::uint64_t>(instance.matrix.cols()))
      .field("solution", std::span<const double>(sol.y))
      .field("objective", sol.cost)
      .field("objective_pre_scale", sol.cost_avg)
      .field("solution_pre_scale", std::span<const double>(sol.y_avg))
      .field("feasible", sol.min_column_load >= 1.0)
      .field("min_column_load", sol.min_column_load)
      .field("pre_scale_residual", sol.pre_scale_residual)
      .field("certificate_checked", sol.certificate_checked)
      .field("iterations", sol.iterations_run);
  w.begin_object("params")
      .field("beta", p.beta)
      .field("beta_prime", p.beta_prime)
      .field("h", p.step_size)
      .field("K", p.iterations)
      .field("logC", 0.0)
      .field("beta_reset", p.beta_was_reset)
      .field("beta_below_floor", p.below_floor)
      .end_object();
  w.begin_object("guarantee")
      .field("regime", "covering")
      .field("cost_ratio_bound", 1.0 + 3.0 * p.epsilon * (1.0 + p.beta))
      .field("pre_scale_residual_floor", 1.0 - p.epsilon / 2.0)
      .end_object();
  w.field("dual_certificate", std::span<const double>(sol.dual_certificate))
      .field("gap", sol.gap);
  w.begin_object("scaling")
      .field("scale", instance.scaling.scale)
      .field("rho", instance.rho)
      .field("beta_used", instance.scaling.alpha_used)
      .end_object();
  write_audit(w, audit);
  w.field("wall_clock_seconds", seconds).end_object();
  return w.str();
}

int execute(const RunRequest& req, std::ostream& out, std::ostream& err) {
  if (req.mode == "pack" && req.beta) {
    throw Error(ErrorCode::InvalidAlpha, "--beta applies to --mode cover only");
  }
  if (req.mode == "cover" && req.alpha) {
    throw Error(ErrorCode::InvalidAlpha, "--alpha applies to --mode pack only");
  }
  if (req.mode == "cover" && req.early_stop) {
    throw Error(ErrorCode::InvalidAlpha, "--early-stop applies to --mode pack with alpha > 1");
  }
  const bool rounds = req.engine == "rounds";
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  RawMatrix raw = read_matrix_market_file(req.input);
  std::string document;
  std::vector<TraceRow> trace;
  if (req.mode == "pack") {
    PackingConfig config;
    config.alpha = req.alpha.value_or(1.0);
    config.epsilon = req.epsilon;
    config.max_iterations = req.max_iters;
    config.early_stop = req.early_stop;
    config.trace_stride = req.trace_stride;
    validate(config);
    const PackingInstance instance =
        standardize_packing(raw.rows, raw.cols, std::move(raw.entries), config.alpha);
    PackingSolution sol;
    std::optional<LocalityAudit> audit;
    if (rounds) {
      DistributedPacking d = run_distributed(instance, config);
      sol = std::move(d.solution);
      audit = d.audit;
    } else {
      sol = solve_packing(instance, config);
    }
    if (config.early_stop && !(config.alpha > 1.0)) {
      err << "warning: --early-stop has no effect unless alpha > 1\n";
    }
    if (sol.slackness_warnings > 0) {
      err << "warning: approximate complementary slackness missed at " << sol.slackness_warnings
          << " traced iterations after burn-in\n";
    }
    document = packing_json(req, instance, sol, audit, elapsed());
    trace = std::move(sol.trace);
  } else {
    CoveringConfig config;
    config.beta = req.beta.value_or(1.0);
    config.epsilon = req.epsilon;
    config.max_iterations = req.max_iters;
    config.trace_stride = req.trace_stride;
    validate(config);
    const CoveringInstance instance =
        standardize_covering(raw.rows, raw.cols, std::move(raw.entries), config.beta);
    CoveringSolution sol;
    std::optional<LocalityAudit> audit;
    if (rounds) {
      DistributedCovering d = run_distributed(instance, config);
      sol = std::move(d.solution);
      audit = d.audit;
    } else {
      sol = solve_covering(instance, config);
    }
    if (sol.params.beta_was_reset) {
      err << "note: beta <= 0 reset to " << format_double(sol.params.beta) << "\n";
    }
    if (sol.params.below_floor) {
      err << "warning: beta is below (eps/4)/ln(m n rho/eps) = "
          << format_double(sol.params.beta_floor) << "; the cost guarantee does not apply\n";
    }
    RunRequest shown = req;
    shown.beta = config.beta;
    document = covering_json(shown, instance, sol, audit, elapsed());
    trace = std::move(sol.trace);
  }

  if (!req.trace.empty()) emit_trace(trace, req.trace);
  if (req.output.empty()) {
    out << document;
  } else {
    std::ofstream file(req.output);
    if (!file) throw Error(ErrorCode::IoError, "cannot write " + req.output);
    file << document;
    if (!file) throw Error(ErrorCode::IoError, "write failed for " + req.output);
  }
  return kExitOk;
}

}  // namespace

void write_trace(std::ostream& out, std::span<const TraceRow> rows) {
  out << "iter,utility,max_load,f_r,gap\n";
  for (const TraceRow& row : rows) {
    out << row.iteration << ',' << format_double(row.utility) << ','
        << format_double(row.max_load) << ','
        << (row.f_r.overflow ? std::string("+overflow") : format_double(row.f_r.value)) << ',';
    if (row.gap) out << format_double(*row.gap);
    out << '\n';
  }
}

void emit_trace(std::span<const TraceRow> rows, const std::string& path) {
  std::ofstream file(path);
  if (!file) throw Error(ErrorCode::IoError, "cannot write trace to " + path);
  write_trace(file, rows);
  if (!file) throw Error(ErrorCode::IoError, "trace write failed for " + path);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fair packing and covering solver"};
  RunRequest req;
  app.add_option("--mode", req.mode, "pack or cover")
      ->check(CLI::IsMember({"pack", "cover"}))
      ->capture_default_str();
  app.add_option("--alpha", req.alpha, "fairness parameter for packing (>= 0)");
  app.add_option("--beta", req.beta, "fairness parameter for covering");
  app.add_option("--epsilon", req.epsilon, "accuracy")->capture_default_str();
  app.add_option("--input", req.input, "MatrixMarket coordinate file")->required();
  app.add_option("--output", req.output, "result JSON path (default stdout)");
  app.add_option("--trace", req.trace, "convergence trace CSV path");
  app.add_option("--engine", req.engine, "monolithic or rounds")
      ->check(CLI::IsMember({"monolithic", "rounds"}))
      ->capture_default_str();
  app.add_option("--max-iters", req.max_iters, "override the iteration budget");
  app.add_flag("--early-stop", req.early_stop, "stop on the duality-gap rule (alpha > 1)");
  app.add_option("--trace-stride", req.trace_stride, "iterations between trace rows")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    return execute(req, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_internal(e.code()) ? kExitInternal : kExitInput;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace fairalloc
