// rmcdp: command-line driver for the concrete-delivery schedulers.
//
//   rmcdp solve <instance.json> [--algorithm priority|greedy|exact|grid-exact]
//   rmcdp check <instance.json> <schedule.csv>
//   rmcdp space <instance.json>
//   rmcdp export-mip <instance.json> [--horizon N] [--out FILE]
//   rmcdp bench
//
// Exit codes: 0 success/feasible, 2 infeasible, 3 input error, 4 size cap.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "rmcdp/fixtures.hpp"
#include "rmcdp/graph.hpp"
#include "rmcdp/io.hpp"
#include "rmcdp/mip.hpp"
#include "rmcdp/priority.hpp"

namespace {

using namespace rmcdp;

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitInput = 3;
constexpr int kExitCap = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(path + ": cannot write");
  out << text;
}

InstanceDocument load_instance(const std::string& path) {
  try {
    return parse_instance_document(read_file(path));
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw InputError(path + ": " + e.what());
  }
}

Rational parse_beta(const std::string& text) {
  Rational r;
  const auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      r.num = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      r.den = 1;
    } else {
      const std::string a = text.substr(0, slash), b = text.substr(slash + 1);
      r.num = std::stoll(a, &used);
      if (used != a.size()) throw std::invalid_argument(text);
      r.den = std::stoll(b, &used);
      if (used != b.size()) throw std::invalid_argument(text);
    }
  } catch (const std::exception&) {
    throw InputError("--beta: expected an integer or p/q, got '" + text + "'");
  }
  if (r.den <= 0 || r.num < r.den) throw InputError("--beta: must be >= 1, got '" + text + "'");
  return r;
}

unsigned resolve_threads(unsigned flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("RMCDP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    throw InputError("RMCDP_THREADS: expected a positive integer, got '" + std::string(env) + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ShiftBound parse_shift_bound(const std::string& s) {
  if (s == "arrival-gap") return ShiftBound::kArrivalGap;
  if (s == "target-delay") return ShiftBound::kDelayBeyondTarget;
  throw InputError("--shift-bound: expected arrival-gap or target-delay, got '" + s + "'");
}

std::string sequence_text(const TripSequence& seq) {
  std::string out;
  for (int s : seq) out += (out.empty() ? "" : " ") + std::to_string(s);
  return out;
}

// ---- solve -------------------------------------------------------------------

struct SolveArgs {
  std::string instance;
  std::string algorithm = "priority";
  std::string beta = "1";
  std::optional<int> trucks;
  std::string out;
  bool json = false;
  unsigned threads = 0;
  std::string shift_bound = "arrival-gap";
  std::optional<int> horizon;
};

int cmd_solve(const SolveArgs& a) {
  const auto doc = load_instance(a.instance);
  const Instance& inst = doc.instance;
  CheckOptions copt;
  copt.truck_limit = a.trucks;

  std::optional<Schedule> schedule;
  FeasibilityReport report;
  Json extra;
  if (a.algorithm == "priority") {
    PriorityOptions opt;
    opt.beta = parse_beta(a.beta);
    opt.truck_limit = a.trucks;
    opt.threads = resolve_threads(a.threads);
    opt.shift_bound = parse_shift_bound(a.shift_bound);
    auto r = priority_solve(inst, opt);
    extra["stats"] = priority_stats_to_json(r.stats);
    if (r.best) {
      extra["site_order"] = sequence_json(r.best_permutation);
      schedule = std::move(r.best);
    }
  } else if (a.algorithm == "greedy") {
    auto r = greedy_solve(inst, build_graph(inst, inst.grouped_trip_multiset()), copt);
    schedule = std::move(r.schedule);
  } else if (a.algorithm == "exact") {
    ExactOptions opt;
    opt.check = copt;
    auto r = enumerate_exact(inst, opt);
    extra["visited"] = r.visited;
    extra["feasible_count"] = r.feasible_count;
    schedule = std::move(r.best);
  } else if (a.algorithm == "grid-exact") {
    const int horizon = a.horizon.value_or(std::min(2 * inst.total_trips(), GridLimits{}.max_horizon));
    auto r = grid_exact(inst, horizon);
    extra["horizon"] = horizon;
    extra["leaves"] = r.leaves;
    schedule = std::move(r.best);
  } else {
    throw InputError("--algorithm: expected priority, greedy, exact or grid-exact, got '" + a.algorithm + "'");
  }

  if (!schedule) {
    if (a.json) {
      Json out;
      out["algorithm"] = a.algorithm;
      out["feasible"] = false;
      out.update(extra);
      std::cout << out.dump(2) << '\n';
    }
    std::cerr << a.algorithm << ": no feasible solution\n";
    return kExitInfeasible;
  }

  report = check(inst, *schedule, copt);
  const ObjectiveReport obj = evaluate(inst, *schedule);
  const std::string csv = schedule_to_csv(*schedule);
  if (!a.out.empty()) write_file(a.out, csv);

  if (a.json) {
    Json out;
    out["algorithm"] = a.algorithm;
    out["feasible"] = report.feasible();
    out.update(extra);
    out["objective"] = objective_to_json(obj);
    out["feasibility"] = feasibility_to_json(report);
    out["schedule"] = schedule_to_json(*schedule);
    std::cout << out.dump(2) << '\n';
  } else if (a.out.empty()) {
    std::cout << csv;
  }
  std::cerr << a.algorithm << ": total site wait " << format_minutes(obj.total_site_wait) << " min, truck idle "
            << format_minutes(obj.truck_idle_total) << " min, trucks " << obj.trucks_required << ", "
            << (report.feasible() ? "feasible" : "INFEASIBLE") << "\n"
            << "dispatch: " << sequence_text(schedule->dispatch_sequence()) << '\n';
  return report.feasible() ? kExitOk : kExitInfeasible;
}

// ---- check -------------------------------------------------------------------

int cmd_check(const std::string& instance_path, const std::string& schedule_path, std::optional<int> trucks,
              std::optional<double> gamma_minutes) {
  const auto doc = load_instance(instance_path);
  Schedule schedule;
  try {
    schedule = schedule_from_csv(doc.instance, read_file(schedule_path));
  } catch (const InputError& e) {
    throw InputError(schedule_path + ": " + e.what());
  }
  CheckOptions opt;
  opt.truck_limit = trucks;
  if (gamma_minutes) opt.gamma_override = detail::minutes_value(*gamma_minutes, "--gamma");
  const FeasibilityReport report = check(doc.instance, schedule, opt);
  Json out;
  out["feasible"] = report.feasible();
  out["feasibility"] = feasibility_to_json(report);
  if (report.count(ViolationKind::kCoverage) == 0) {
    out["objective"] = objective_to_json(evaluate(doc.instance, schedule));
  } else {
    out["objective"] = nullptr;
  }
  std::cout << out.dump(2) << '\n';
  return report.feasible() ? kExitOk : kExitInfeasible;
}

// ---- space -------------------------------------------------------------------

int cmd_space(const std::string& instance_path) {
  const auto doc = load_instance(instance_path);
  const Instance& inst = doc.instance;
  Json out;
  out["solution_space_size"] = solution_space_size(inst).str();
  out["total_trips"] = inst.total_trips();
  out["loading_time_min"] = detail::minutes_json(inst.loading_time());
  out["truck_upper_bound"] = truck_upper_bound(inst);
  out["truck_upper_bound_single_window"] =
      truck_upper_bound_single_window(inst.depot().gamma, inst.loading_time());
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

// ---- export-mip --------------------------------------------------------------

int cmd_export_mip(const std::string& instance_path, std::optional<int> horizon_flag, std::string out_path) {
  const auto doc = load_instance(instance_path);
  const Instance& inst = doc.instance;
  const int horizon = horizon_flag.value_or(default_horizon(inst));
  MipModel model;
  try {
    model = build_mip(inst, horizon);
  } catch (const ValidationError& e) {
    throw InputError(std::string("--horizon: ") + e.what());
  }
  if (out_path.empty()) {
    const std::string stem =
        doc.name.empty() ? std::filesystem::path(instance_path).stem().string() : doc.name;
    out_path = stem + "_" + std::to_string(horizon) + ".lp";
  }
  write_file(out_path, emit_lp(model));
  Json out;
  out["file"] = out_path;
  out["horizon"] = horizon;
  out["binaries"] = model.binary_count();
  out["continuous"] = model.continuous_count();
  out["rows"] = model.row_count();
  std::cout << out.dump(2) << '\n';
  return kExitOk;
}

// ---- bench -------------------------------------------------------------------

struct BenchRow {
  std::string name;
  std::string expected;
  std::string got;
  bool deviates = false;
};

std::string percent_text(double fraction) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << fraction * 100.0 << '%';
  return s.str();
}

std::string priority_text(const PriorityResult& r) {
  std::ostringstream s;
  s << r.stats.permutations_created << " / " << r.stats.feasible_count << " (" << percent_text(r.stats.feasibility_rate)
    << ") / " << (r.stats.best_objective ? format_minutes(*r.stats.best_objective) : std::string("-")) << " / "
    << std::fixed << std::setprecision(3) << r.stats.runtime_seconds << " s";
  return s.str();
}

int cmd_bench(unsigned threads_flag, bool json) {
  const unsigned threads = resolve_threads(threads_flag);
  std::vector<BenchRow> rows;
  Json doc;

  auto priority_row = [&](const std::string& name, const Instance& inst, ShiftBound bound, std::uint64_t created,
                          std::uint64_t feasible, const char* percent, Seconds best, bool compare) {
    PriorityOptions opt;
    opt.threads = threads;
    opt.shift_bound = bound;
    auto r = priority_solve(inst, opt);
    std::ostringstream exp;
    exp << created << " / " << feasible << " (" << percent << ") / "
        << format_minutes(best);
    const bool ok = r.stats.permutations_created == created && r.stats.feasible_count == feasible &&
                    r.stats.best_objective == best;
    rows.push_back({name, compare ? exp.str() : "(no reference)", priority_text(r), compare && !ok});
    Json j = priority_stats_to_json(r.stats);
    j["runtime_seconds"] = r.stats.runtime_seconds;
    doc[name] = j;
    return r;
  };

  const Instance e1 = fixtures::example1();
  const Instance i1 = fixtures::instance1();
  const Instance i2 = fixtures::instance2();

  auto r1 = priority_row("instance-1 priority", i1, ShiftBound::kArrivalGap, 120, 120, "100%", minutes(195), true);
  priority_row("instance-1 priority, target-delay bound", i1, ShiftBound::kDelayBeyondTarget, 120, 120, "100%", minutes(195),
               true);
  priority_row("instance-2 priority, target-delay bound", i2, ShiftBound::kDelayBeyondTarget, 362880, 60160,
               "16.57%", minutes(885), true);
  priority_row("instance-2 priority, arrival-gap bound", i2, ShiftBound::kArrivalGap, 362880, 60160, "16.57%",
               minutes(885), true);

  // Truck sweep on instance-1.
  std::optional<Seconds> previous;
  bool monotone = true;
  Json sweep = Json::array();
  for (int m = 12; m <= 18; ++m) {
    PriorityOptions opt;
    opt.threads = threads;
    opt.truck_limit = m;
    auto r = priority_solve(i1, opt);
    const auto best = r.stats.best_objective;
    if (previous && best && *best > *previous) monotone = false;
    if (best) previous = best;
    const bool at_least_17 = m >= 17;
    rows.push_back({"instance-1 trucks m=" + std::to_string(m), at_least_17 ? "195" : "(>= 195)",
                    best ? format_minutes(*best) : std::string("infeasible"),
                    (at_least_17 && best != minutes(195)) || (best && *best < minutes(195))});
    Json j;
    j["trucks"] = m;
    j["best_objective"] = best ? detail::minutes_json(*best) : Json(nullptr);
    j["feasible_count"] = r.stats.feasible_count;
    sweep.push_back(j);
  }
  doc["truck_sweep"] = sweep;
  rows.push_back({"truck sweep non-increasing", "yes", monotone ? "yes" : "no", !monotone});
  const int peak = r1.best ? peak_trucks(i1, *r1.best) : 0;
  rows.push_back({"instance-1 optimum trucks in flight", "17", std::to_string(peak), peak != 17});
  doc["instance1_optimum_trucks_required"] = peak;

  // Example-1 through every algorithm.
  {
    auto p = priority_solve(e1);
    rows.push_back({"example-1 priority", "(no reference)",
                    p.stats.best_objective ? format_minutes(*p.stats.best_objective) : "infeasible", false});
    auto g = greedy_solve(e1, build_graph(e1, e1.grouped_trip_multiset()));
    const auto gw = evaluate(e1, g.schedule).total_site_wait;
    rows.push_back({"example-1 greedy", "60 (1 2 1 2)",
                    format_minutes(gw) + " (" + sequence_text(g.sequence) + ")",
                    gw != minutes(60) || g.sequence != TripSequence{1, 2, 1, 2}});
    auto x = enumerate_exact(e1);
    rows.push_back({"example-1 exact", "60 (1 2 1 2), 6 visited",
                    format_minutes(x.best_objective.total_site_wait) + " (" + sequence_text(x.best_sequence) + "), " +
                        std::to_string(x.visited) + " visited",
                    x.best_objective.total_site_wait != minutes(60) || x.visited != 6});
    auto ge = grid_exact(e1, 6);
    rows.push_back({"example-1 grid-exact (6 slots)", "<= 60",
                    ge.best ? format_minutes(ge.best_objective.total_site_wait) : "infeasible",
                    !ge.best || ge.best_objective.total_site_wait > minutes(60)});
    doc["example-1"] = {{"priority", p.stats.best_objective ? detail::minutes_json(*p.stats.best_objective) : Json()},
                        {"greedy", detail::minutes_json(gw)},
                        {"exact", detail::minutes_json(x.best_objective.total_site_wait)},
                        {"grid_exact", ge.best ? detail::minutes_json(ge.best_objective.total_site_wait) : Json()}};
  }
  {
    auto g = greedy_solve(i1, build_graph(i1, i1.grouped_trip_multiset()));
    const auto obj = evaluate(i1, g.schedule);
    rows.push_back({"instance-1 greedy", "(no reference)",
                    format_minutes(obj.total_site_wait) + " wait, " + format_minutes(obj.truck_idle_total) +
                        " idle, " + (g.report.feasible() ? "feasible" : "infeasible"),
                    false});
  }

  int deviations = 0;
  for (const auto& r : rows) deviations += r.deviates ? 1 : 0;
  if (json) {
    Json list = Json::array();
    for (const auto& r : rows) {
      list.push_back({{"name", r.name}, {"expected", r.expected}, {"got", r.got}, {"deviates", r.deviates}});
    }
    doc["rows"] = list;
    doc["deviations"] = deviations;
    std::cout << doc.dump(2) << '\n';
  } else {
    std::size_t w0 = 4, w1 = 8;
    for (const auto& r : rows) {
      w0 = std::max(w0, r.name.size());
      w1 = std::max(w1, r.expected.size());
    }
    std::cout << std::left << std::setw(static_cast<int>(w0)) << "case" << "  " << std::setw(static_cast<int>(w1))
              << "expected" << "  got\n";
    for (const auto& r : rows) {
      std::cout << std::setw(static_cast<int>(w0)) << r.name << "  " << std::setw(static_cast<int>(w1)) << r.expected
                << "  " << r.got << (r.deviates ? "   <-- DEVIATION" : "") << '\n';
    }
    std::cout << "priority rows: created / feasible (%) / best min / runtime\n";
    std::cout << deviations << " deviation(s) from reference values\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ready-mixed concrete delivery scheduling"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Solve an instance and write the schedule as CSV");
  s->add_option("instance", solve.instance, "Instance JSON")->required();
  s->add_option("--algorithm", solve.algorithm, "priority | greedy | exact | grid-exact")->capture_default_str();
  s->add_option("--beta", solve.beta, "Priority spacing factor, integer or p/q >= 1")->capture_default_str();
  s->add_option("--trucks", solve.trucks, "Truck limit");
  s->add_option("--out", solve.out, "CSV output file (default: stdout)");
  s->add_flag("--json", solve.json, "Print a JSON report instead of CSV");
  s->add_option("--threads", solve.threads, "Worker threads (default: RMCDP_THREADS or all cores)");
  s->add_option("--shift-bound", solve.shift_bound, "arrival-gap | target-delay")->capture_default_str();
  s->add_option("--horizon", solve.horizon, "Slot horizon for grid-exact");

  std::string check_instance, check_schedule;
  std::optional<int> check_trucks;
  std::optional<double> check_gamma;
  auto* c = app.add_subcommand("check", "Verify a schedule CSV against an instance");
  c->add_option("instance", check_instance, "Instance JSON")->required();
  c->add_option("schedule", check_schedule, "Schedule CSV")->required();
  c->add_option("--trucks", check_trucks, "Truck limit");
  c->add_option("--gamma", check_gamma, "Override the setting time (minutes) for the arrival-gap test");

  std::string space_instance;
  auto* sp = app.add_subcommand("space", "Print solution-space size and closed-form quantities");
  sp->add_option("instance", space_instance, "Instance JSON")->required();

  std::string mip_instance, mip_out;
  std::optional<int> mip_horizon;
  auto* m = app.add_subcommand("export-mip", "Write the slot-assignment MIP as an LP file");
  m->add_option("instance", mip_instance, "Instance JSON")->required();
  m->add_option("--horizon", mip_horizon, "Number of loading slots T_k (default 2 x trips)");
  m->add_option("--out", mip_out, "LP file (default <instance>_<Tk>.lp)");

  unsigned bench_threads = 0;
  bool bench_json = false;
  auto* b = app.add_subcommand("bench", "Run the bundled instances and compare with reference values");
  b->add_option("--threads", bench_threads, "Worker threads");
  b->add_flag("--json", bench_json, "JSON output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*s) return cmd_solve(solve);
    if (*c) return cmd_check(check_instance, check_schedule, check_trucks, check_gamma);
    if (*sp) return cmd_space(space_instance);
    if (*m) return cmd_export_mip(mip_instance, mip_horizon, mip_out);
    if (*b) return cmd_bench(bench_threads, bench_json);
  } catch (const SizeCapError& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kExitCap;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
