// hologossip command-line front end.
//
// Exit codes: 0 success, 1 domain-level negative result, 2 input error.

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <hologossip/io.hpp>
#include <hologossip/verification.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace hg = hologossip;
namespace io = hologossip::io;

namespace {

constexpr int kOk = 0;
constexpr int kNegative = 1;
constexpr int kInputError = 2;

/// A domain-level negative result that is not an input error.
struct Negative : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("hologossip");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* env = std::getenv("HOLOGOSSIP_LOG");
  std::string level = env ? env : "off";
  if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else {
    if (level != "off") std::cerr << "warning: HOLOGOSSIP_LOG must be off, info or debug\n";
    spdlog::set_level(spdlog::level::off);
  }
}

std::string render(const hg::Rational& v) { return hg::to_string(v); }

std::string render(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

template <class T>
std::string render_vector(const std::vector<T>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + render(v[i]);
  return out;
}

std::string render_tree(const hg::Graph& g, const hg::SpanningTree& t) {
  std::string out;
  for (hg::EdgeId id : t.sorted_edges()) out += (out.empty() ? "" : " ") + io::format_edge(g, id);
  return "{" + out + "}";
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (char c : text) {
    if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used == text.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw hg::Error(hg::Errc::parse_error, what + ": cannot read '" + text + "' as a number");
}

template <hg::Scalar T>
std::vector<T> parse_values(const std::vector<std::string>& items, const std::string& what) {
  std::vector<T> out;
  for (const auto& s : items) {
    if constexpr (hg::ScalarTraits<T>::exact) {
      out.push_back(hg::parse_rational(s));
    } else {
      out.push_back(parse_double(s, what));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// check / limit / witness
// ---------------------------------------------------------------------------

struct WeightsInput {
  std::string graph;
  std::string weights;
};

int cmd_check(const WeightsInput& in) {
  auto g = io::load_graph(in.graph);
  auto any = io::load_weights(in.weights, g);
  return std::visit(
      [&](const auto& ws) {
        auto report = hg::check_holonomy(ws);
        spdlog::info("checked {} fundamental cycles", g->edge_count() - g->node_count() + 1);
        if (report.holonomic) {
          std::cout << "holonomic: true\n";
          return kOk;
        }
        std::cout << "holonomic: false\n"
                  << "witness: " << hg::format_walk(report.witness->cycle) << ", R=" << render(report.witness->value)
                  << "\n";
        return kNegative;
      },
      any);
}

int cmd_limit(const WeightsInput& in, std::size_t base) {
  auto g = io::load_graph(in.graph);
  if (base < 1 || base > g->node_count())
    throw hg::Error(hg::Errc::node_out_of_range, "--base must lie in 1.." + std::to_string(g->node_count()));
  auto any = io::load_weights(in.weights, g);
  return std::visit(
      [&](const auto& ws) {
        try {
          auto limit = hg::consensus_limit(ws, base - 1);
          std::cout << render_vector(limit.probability.entries) << "\n";
          return kOk;
        } catch (const hg::Error& err) {
          if (err.code() != hg::Errc::not_holonomic) throw;
          throw Negative(std::string(err.what()) + "\nrun `hologossip witness` to see two trees with different limits");
        }
      },
      any);
}

int cmd_witness(const WeightsInput& in) {
  auto g = io::load_graph(in.graph);
  auto any = io::load_weights(in.weights, g);
  return std::visit(
      [&](const auto& ws) {
        auto trees = hg::nonholonomy_witness_trees(ws);
        if (!trees) {
          std::cout << "holonomic, no witness\n";
          return kOk;
        }
        std::cout << "cycle: " << hg::format_walk(trees->cycle) << "\n"
                  << "tree 1: " << render_tree(*g, trees->path_tree) << "\n"
                  << "  p' = " << render_vector(trees->path_vector.entries) << "\n"
                  << "tree 2: " << render_tree(*g, trees->closing_tree) << "\n"
                  << "  p'' = " << render_vector(trees->closing_vector.entries) << "\n";
        return kOk;
      },
      any);
}

// ---------------------------------------------------------------------------
// design
// ---------------------------------------------------------------------------

struct DesignInput {
  std::string graph;
  std::string target;
  std::string x;
  std::optional<std::uint64_t> seed;
};

template <hg::Scalar T>
hg::ProbabilityVector<T> read_target(const std::vector<std::string>& items, std::size_t n) {
  std::vector<T> p = parse_values<T>(items, "--target");
  if (p.size() != n)
    throw hg::Error(hg::Errc::mismatched_node_counts,
                    "--target has " + std::to_string(p.size()) + " entries, the graph has " + std::to_string(n) + " nodes");
  T sum(0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] > T(0))) throw Negative("target entry " + std::to_string(i + 1) + " is not positive");
    sum += p[i];
  }
  if (std::abs(hg::to_double(T(sum - T(1)))) > 1e-9) throw Negative("target sums to " + render(sum) + ", not 1");
  return hg::normalize(p);
}

template <hg::Scalar T>
hg::WeightSet<T> design_weights(const hg::GraphPtr& g, const DesignInput& in, const std::vector<std::string>& target) {
  auto p = read_target<T>(target, g->node_count());
  hg::BoxPoint<T> box;
  if (!in.x.empty()) {
    box.x = parse_values<T>(split_list(in.x), "--x");
    if (box.x.size() == 1) box.x.assign(g->edge_count(), box.x.front());
  } else {
    box = hg::sample_box_point<T>(*g, *in.seed);
  }
  spdlog::debug("box point has {} coordinates", box.x.size());
  return hg::design_for(p, g, box);
}

io::AnyWeightSet design_any(const hg::GraphPtr& g, const DesignInput& in) {
  if (in.x.empty() && !in.seed) throw hg::Error(hg::Errc::parameter_out_of_range, "design needs --x or --seed");
  auto items = split_list(in.target);
  bool rational = in.target.find('/') != std::string::npos;
  if (rational) return design_weights<hg::Rational>(g, in, items);
  return design_weights<double>(g, in, items);
}

int cmd_design(const DesignInput& in, const std::string& out_path) {
  auto g = io::load_graph(in.graph);
  auto any = design_any(g, in);
  std::string doc = std::visit([](const auto& ws) { return io::format_weights(ws); }, any);
  if (out_path.empty()) {
    std::cout << doc;
  } else {
    std::ofstream out(out_path);
    if (!out) throw hg::Error(hg::Errc::parse_error, out_path + ": cannot write file");
    out << doc;
    spdlog::info("wrote {}", out_path);
  }
  return kOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateInput {
  std::string graph;
  std::string weights;
  DesignInput design;
  std::string schedule;
  std::optional<std::size_t> steps;
  std::optional<std::uint64_t> seed;
  double tol = hg::kConvergenceTolerance;
  std::optional<std::size_t> max_steps;
  std::string initial;
  std::string trace;
  std::string report;
};

int cmd_simulate(const SimulateInput& in) {
  if (!(in.tol > 0.0)) throw hg::Error(hg::Errc::parameter_out_of_range, "--tol must be positive");
  auto g = io::load_graph(in.graph);
  io::AnyWeightSet any = [&]() -> io::AnyWeightSet {
    if (!in.weights.empty()) return io::load_weights(in.weights, g);
    DesignInput d = in.design;
    d.graph = in.graph;
    if (!d.seed) d.seed = in.seed;
    return design_any(g, d);
  }();
  auto ws = std::visit([](const auto& w) { return hg::convert_weights<double>(w); }, any);

  hg::Schedule schedule = [&] {
    if (!in.schedule.empty()) return io::load_schedule(in.schedule, g, in.seed);
    if (!in.seed) throw hg::Error(hg::Errc::invalid_schedule, "a random schedule needs --seed");
    return hg::random_schedule(g, *in.seed, *in.steps);
  }();

  hg::RunOptions opts;
  opts.tol = in.tol;
  opts.max_steps = in.max_steps;
  if (!in.initial.empty()) opts.initial_state = parse_values<double>(split_list(in.initial), "--initial");

  spdlog::info("simulating {} steps ({} schedule)", schedule.length(), hg::schedule_kind_name(schedule.kind));
  hg::RunReport report = hg::run(ws, schedule, opts);
  spdlog::info("stopped after {} steps, seminorm {}", report.steps, report.final_seminorm);

  if (!in.trace.empty()) {
    std::ofstream out(in.trace);
    if (!out) throw hg::Error(hg::Errc::parse_error, in.trace + ": cannot write file");
    io::write_trace(out, report, *g);
  }
  if (!in.report.empty()) {
    std::ofstream out(in.report);
    if (!out) throw hg::Error(hg::Errc::parse_error, in.report + ": cannot write file");
    out << io::report_to_json(report).dump(2) << "\n";
  }

  std::cout << "p_hat: " << render_vector(report.limit) << "\n"
            << "steps: " << report.steps << "\n"
            << "seminorm: " << io::format_number(report.final_seminorm) << "\n"
            << "converged: " << (report.converged ? "true" : "false") << "\n";
  if (report.m_spanning)
    std::cout << "bound violations: " << report.bound_violations << " (m = " << *report.m_spanning << ")\n";
  if (report.final_state) std::cout << "final state: " << render_vector(*report.final_state) << "\n";

  if (!report.converged) return kNegative;
  if (report.bound_violations > 0) return kNegative;
  return kOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int cmd_verify(bool serial) {
  auto results = hg::verification::run_all(!serial);
  bool all = true;
  for (const auto& r : results) {
    std::cout << hg::verification::format_result(r) << "\n";
    all = all && r.passed;
  }
  return all ? kOk : kNegative;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Weighted gossip: holonomy, consensus limits, inverse design and simulation"};
  app.require_subcommand(1);

  WeightsInput wi;
  auto add_weights_input = [&](CLI::App* cmd) {
    cmd->add_option("--graph", wi.graph, "Graph file {n, edges}")->required()->check(CLI::ExistingFile);
    cmd->add_option("--weights", wi.weights, "Weights file [{edge, a_ij, a_ji}]")->required()->check(CLI::ExistingFile);
  };

  auto* check = app.add_subcommand("check", "Decide holonomy; print a violated cycle otherwise");
  add_weights_input(check);

  std::size_t base = 1;
  auto* limit = app.add_subcommand("limit", "Print the consensus limit of holonomic weights");
  add_weights_input(limit);
  limit->add_option("--base", base, "Base node of the construction (1-based)");

  auto* witness = app.add_subcommand("witness", "Print two spanning trees with different tree vectors");
  add_weights_input(witness);

  DesignInput di;
  std::string design_out;
  auto* design = app.add_subcommand("design", "Write weights whose consensus limit is a given target");
  design->add_option("--graph", di.graph, "Graph file")->required()->check(CLI::ExistingFile);
  design->add_option("--target", di.target, "Target vector, e.g. \"1/2,1/3,1/6\"")->required();
  auto* design_x = design->add_option("--x", di.x, "Box parameter: one value or one per edge");
  design->add_option("--seed", di.seed, "Seed for a random box parameter")->excludes(design_x);
  design->add_option("--out", design_out, "Output file (default: stdout)");

  SimulateInput si;
  auto* simulate = app.add_subcommand("simulate", "Run a gossip schedule and report the limit");
  simulate->add_option("--graph", si.graph, "Graph file")->required()->check(CLI::ExistingFile);
  auto* sim_weights = simulate->add_option("--weights", si.weights, "Weights file")->check(CLI::ExistingFile);
  auto* sim_target = simulate->add_option("--target", si.design.target, "Design weights for this target instead");
  sim_target->excludes(sim_weights);
  simulate->add_option("--x", si.design.x, "Box parameter used with --target")->needs(sim_target);
  auto* sim_schedule = simulate->add_option("--schedule", si.schedule, "Schedule file")->check(CLI::ExistingFile);
  auto* sim_steps = simulate->add_option("--steps", si.steps, "Random schedule of this many steps")
                        ->check(CLI::PositiveNumber);
  sim_steps->excludes(sim_schedule);
  simulate->add_option("--seed", si.seed, "Seed for random schedules and box parameters");
  simulate->add_option("--tol", si.tol, "Stop once the row spread drops below this");
  simulate->add_option("--max-steps", si.max_steps, "Step budget");
  simulate->add_option("--initial", si.initial, "Initial agent states, e.g. \"1,0,0\"");
  simulate->add_option("--trace", si.trace, "Write the seminorm trace (TSV) here");
  simulate->add_option("--report", si.report, "Write the run report (JSON) here");

  bool serial = false;
  auto* verify = app.add_subcommand("verify", "Run the acceptance checks");
  verify->add_flag("--serial", serial, "Run checks one at a time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*check) return cmd_check(wi);
    if (*limit) return cmd_limit(wi, base);
    if (*witness) return cmd_witness(wi);
    if (*design) return cmd_design(di, design_out);
    if (*simulate) {
      if (si.weights.empty() && si.design.target.empty()) {
        std::cerr << "error: simulate needs --weights or --target\n";
        return kInputError;
      }
      if (si.schedule.empty() && !si.steps) {
        std::cerr << "error: simulate needs --schedule or --steps\n";
        return kInputError;
      }
      return cmd_simulate(si);
    }
    if (*verify) return cmd_verify(serial);
  } catch (const Negative& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNegative;
  } catch (const hg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == hg::Errc::not_holonomic || e.code() == hg::Errc::non_interior_vector) return kNegative;
    return kInputError;
  } catch (const YAML::Exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}
