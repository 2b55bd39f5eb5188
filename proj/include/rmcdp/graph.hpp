#pragma once

// Complete-graph view of an instance: one vertex per trip plus the depot,
// labelled by site. Hosts the dynamic-cost greedy and the exact oracles
// (enumeration of every distinct trip sequence, and an exhaustive search
// over the loading-slot grid).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rmcdp/errors.hpp"
#include "rmcdp/feasibility.hpp"
#include "rmcdp/model.hpp"

namespace rmcdp {

class RmcdpGraph {
 public:
  static constexpr std::size_t kDepot = 0;

  std::size_t vertex_count() const { return labels_.size(); }
  // Site id of a trip vertex; 0 for the depot.
  int label(std::size_t v) const { return labels_.at(v); }
  const std::vector<int>& labels() const { return labels_; }

  Seconds unload_by_label(int site) const { return unload_.at(static_cast<std::size_t>(site)); }
  Seconds haul_by_label(int site) const { return haul_.at(static_cast<std::size_t>(site)); }
  Seconds proposed_start_by_label(int site) const { return proposed_.at(static_cast<std::size_t>(site)); }
  Seconds loading_time() const { return loading_; }
  Seconds depot_start() const { return depot_start_; }
  int label_count() const { return static_cast<int>(unload_.size()) - 1; }

  Seconds edge_cost(std::size_t v, std::size_t u) const { return costs_.at(v * vertex_count() + u); }
  void set_edge_cost(std::size_t v, std::size_t u, Seconds c) { costs_.at(v * vertex_count() + u) = c; }

  friend RmcdpGraph build_graph(const Instance& instance, const TripSequence& initial);

 private:
  std::vector<int> labels_;
  std::vector<Seconds> unload_;
  std::vector<Seconds> haul_;
  std::vector<Seconds> proposed_;
  Seconds loading_ = 0;
  Seconds depot_start_ = 0;
  std::vector<Seconds> costs_;
};

// Vertex k (1-based) carries the site of initial[k-1]; all edge costs start
// at zero.
inline RmcdpGraph build_graph(const Instance& instance, const TripSequence& initial) {
  require_trip_multiset(instance, initial);
  RmcdpGraph g;
  g.labels_.reserve(initial.size() + 1);
  g.labels_.push_back(0);
  g.labels_.insert(g.labels_.end(), initial.begin(), initial.end());
  const auto n = instance.site_count();
  g.unload_.assign(n + 1, 0);
  g.haul_.assign(n + 1, 0);
  g.proposed_.assign(n + 1, 0);
  for (const auto& s : instance.sites()) {
    const auto k = static_cast<std::size_t>(s.id);
    g.unload_[k] = s.unload_time;
    g.haul_[k] = instance.hauling_time(s.id);
    g.proposed_[k] = s.proposed_start;
  }
  g.loading_ = instance.loading_time();
  g.depot_start_ = instance.depot().start_time;
  g.costs_.assign(g.labels_.size() * g.labels_.size(), 0);
  return g;
}

struct HamiltonianPath {
  std::vector<std::size_t> vertices;  // starts with the depot

  TripSequence sequence(const RmcdpGraph& g) const {
    TripSequence seq;
    for (std::size_t k = 1; k < vertices.size(); ++k) seq.push_back(g.label(vertices[k]));
    return seq;
  }
};

struct CircuitCost {
  Seconds site_wait = 0;
  Seconds truck_idle = 0;
};

// Cost of a cycle from per-vertex costs: vertex i (1-based along the path)
// starts loading at s^s plus the summed edge times L_t before it; a vertex
// following a same-label vertex u costs v^s - (u^s + U), a first visit costs
// its arrival minus the site's proposed start. Negative same-label costs
// are truck idle; negative first-visit costs are early arrivals (free).
inline CircuitCost circuit_cost(const RmcdpGraph& g, const HamiltonianPath& path) {
  CircuitCost c;
  std::map<int, Seconds> last_start;
  Seconds elapsed = 0;
  for (std::size_t k = 1; k < path.vertices.size(); ++k) {
    if (k > 1) elapsed += g.loading_time();
    const Seconds start = g.depot_start() + elapsed;
    const int l = g.label(path.vertices[k]);
    Seconds cost = 0;
    if (auto it = last_start.find(l); it != last_start.end()) {
      cost = start - (it->second + g.unload_by_label(l));
      if (cost < 0) c.truck_idle += -cost;
    } else {
      cost = (start + g.loading_time() + g.haul_by_label(l)) - g.proposed_start_by_label(l);
    }
    c.site_wait += std::max<Seconds>(0, cost);
    last_start[l] = start;
  }
  return c;
}

struct GreedyStep {
  std::size_t vertex = 0;
  int label = 0;
  Seconds selected_cost = 0;
  // Edge cost from the new frontier to each label that still has
  // unvisited vertices, after the update.
  std::map<int, Seconds> cost_by_label;
};

struct GreedyResult {
  HamiltonianPath path;
  TripSequence sequence;
  Schedule schedule;
  FeasibilityReport report;
  std::vector<GreedyStep> trace;
  RmcdpGraph graph;  // edge costs as left by the run
};

namespace detail {

// Prefer the smallest non-negative cost; if every candidate is negative
// take the largest (least idle). Ties go to the lower site id.
inline bool greedy_prefers(Seconds a_cost, int a_label, Seconds b_cost, int b_label) {
  const bool a_ok = a_cost >= 0;
  const bool b_ok = b_cost >= 0;
  if (a_ok != b_ok) return a_ok;
  if (a_cost != b_cost) return a_ok ? a_cost < b_cost : a_cost > b_cost;
  return a_label < b_label;
}

}  // namespace detail

// Builds the Hamiltonian path greedily. After appending a vertex with label
// l, the cost toward remaining l-vertices becomes U_l and the cost toward
// every other label already on the path drops by L_t; labels not yet on the
// path keep their cost. The cost is per label (one representative vertex is
// examined per label per step).
inline GreedyResult greedy_solve(const Instance& instance, RmcdpGraph graph, const CheckOptions& options = {}) {
  GreedyResult result;
  const std::size_t nv = graph.vertex_count();
  std::vector<bool> visited(nv, false);
  std::vector<bool> label_on_path(static_cast<std::size_t>(graph.label_count()) + 1, false);
  visited[RmcdpGraph::kDepot] = true;
  result.path.vertices.push_back(RmcdpGraph::kDepot);
  std::size_t frontier = RmcdpGraph::kDepot;

  for (std::size_t step = 1; step < nv; ++step) {
    // One representative per label: the lowest-index unvisited vertex.
    std::map<int, std::size_t> representative;
    for (std::size_t u = 1; u < nv; ++u) {
      if (!visited[u]) representative.try_emplace(graph.label(u), u);
    }
    std::size_t chosen = 0;
    int chosen_label = 0;
    Seconds chosen_cost = 0;
    for (const auto& [l, u] : representative) {
      const Seconds c = graph.edge_cost(frontier, u);
      if (chosen == 0 || detail::greedy_prefers(c, l, chosen_cost, chosen_label)) {
        chosen = u;
        chosen_label = l;
        chosen_cost = c;
      }
    }

    visited[chosen] = true;
    label_on_path[static_cast<std::size_t>(chosen_label)] = true;
    result.path.vertices.push_back(chosen);

    GreedyStep trace_step{chosen, chosen_label, chosen_cost, {}};
    for (std::size_t u = 1; u < nv; ++u) {
      if (visited[u]) continue;
      const int l = graph.label(u);
      Seconds c = graph.edge_cost(frontier, u);
      if (l == chosen_label) {
        c = graph.unload_by_label(l);
      } else if (label_on_path[static_cast<std::size_t>(l)]) {
        c -= graph.loading_time();
      }
      graph.set_edge_cost(chosen, u, c);
      trace_step.cost_by_label.try_emplace(l, c);
    }
    result.trace.push_back(std::move(trace_step));
    frontier = chosen;
  }

  result.sequence = result.path.sequence(graph);
  result.schedule = expand_consecutive(instance, result.sequence, "greedy");
  result.report = check(instance, result.schedule, options);
  result.graph = std::move(graph);
  return result;
}

struct ExactOptions {
  CheckOptions check;
  std::uint64_t cap = 10'000'000;
};

struct ExactResult {
  std::optional<Schedule> best;
  TripSequence best_sequence;
  ObjectiveReport best_objective;
  std::uint64_t visited = 0;
  std::uint64_t feasible_count = 0;
};

// Walks every distinct arrangement of the trip multiset in lexicographic
// order, expands each back to back, and keeps the first feasible schedule
// of minimum total site waiting.
inline ExactResult enumerate_exact(const Instance& instance, const ExactOptions& options = {}) {
  const BigInt space = solution_space_size(instance);
  if (space > options.cap) {
    throw SizeCapError("solution space of " + space.str() + " sequences exceeds the enumeration cap of " +
                       std::to_string(options.cap));
  }
  ExactResult result;
  TripSequence seq = instance.grouped_trip_multiset();
  std::optional<Seconds> best_wait;
  do {
    ++result.visited;
    Schedule s = expand_consecutive(instance, seq, "exact");
    if (!check(instance, s, options.check).feasible()) continue;
    ++result.feasible_count;
    ObjectiveReport obj = evaluate(instance, s);
    if (!best_wait || obj.total_site_wait < *best_wait) {
      best_wait = obj.total_site_wait;
      result.best = std::move(s);
      result.best_sequence = seq;
      result.best_objective = std::move(obj);
    }
  } while (std::next_permutation(seq.begin(), seq.end()));
  return result;
}

struct GridLimits {
  std::size_t max_sites = 3;
  int max_trips = 9;
  int max_horizon = 24;
};

struct GridResult {
  std::optional<Schedule> best;
  ObjectiveReport best_objective;
  std::uint64_t leaves = 0;
};

namespace detail {

class GridSearch {
 public:
  GridSearch(const Instance& instance, int horizon) : inst_(instance), horizon_(horizon) {
    const auto n = instance.site_count();
    next_.assign(n, 1);
    last_arrival_.assign(n, 0);
    starts_.assign(n, {});
    remaining_ = instance.total_trips();
  }

  GridResult run() {
    dfs(1, 0);
    return std::move(result_);
  }

 private:
  Seconds slot_start(int t) const { return inst_.depot().start_time + (t - 1) * inst_.loading_time(); }

  // Smallest cost any unstarted site can still add from slot t on.
  Seconds optimistic_rest(int t) const {
    Seconds extra = 0;
    for (const auto& s : inst_.sites()) {
      if (next_[static_cast<std::size_t>(s.id - 1)] == 1) {
        extra += std::max<Seconds>(0, slot_start(t) + inst_.lead_time(s.id) - s.proposed_start);
      }
    }
    return extra;
  }

  void dfs(int t, Seconds cost) {
    if (remaining_ == 0) {
      ++result_.leaves;
      if (!best_cost_ || cost < *best_cost_) {
        Schedule s = schedule_from_depot_starts(inst_, starts_, "grid-exact");
        best_cost_ = cost;
        result_.best_objective = evaluate(inst_, s);
        result_.best = std::move(s);
      }
      return;
    }
    if (horizon_ - t + 1 < remaining_) return;
    if (best_cost_ && cost + optimistic_rest(t) >= *best_cost_) return;
    const Seconds start = slot_start(t);
    for (const auto& s : inst_.sites()) {
      const auto k = static_cast<std::size_t>(s.id - 1);
      if (next_[k] > 1 && next_[k] <= inst_.trips(s.id) &&
          start + inst_.lead_time(s.id) - last_arrival_[k] > inst_.gamma(s.id)) {
        return;  // this site's next trip can no longer arrive within gamma
      }
    }
    for (const auto& s : inst_.sites()) {
      const auto k = static_cast<std::size_t>(s.id - 1);
      if (next_[k] > inst_.trips(s.id)) continue;
      const Seconds arrival = start + inst_.lead_time(s.id);
      const Seconds add = next_[k] == 1 ? std::max<Seconds>(0, arrival - s.proposed_start)
                                        : std::max<Seconds>(0, arrival - last_arrival_[k] - s.unload_time);
      const Seconds saved_arrival = last_arrival_[k];
      starts_[k].push_back(start);
      last_arrival_[k] = arrival;
      ++next_[k];
      --remaining_;
      dfs(t + 1, cost + add);
      ++remaining_;
      --next_[k];
      last_arrival_[k] = saved_arrival;
      starts_[k].pop_back();
    }
    dfs(t + 1, cost);
  }

  const Instance& inst_;
  int horizon_;
  std::vector<int> next_;
  std::vector<Seconds> last_arrival_;
  std::vector<std::vector<Seconds>> starts_;
  int remaining_ = 0;
  std::optional<Seconds> best_cost_;
  GridResult result_;
};

}  // namespace detail

// Exhaustive search over injective trip-to-slot assignments on slots
// 1..horizon (slot t loads at D^s + (t-1) L_t), trips of a site in order.
// Only meant for tiny instances.
inline GridResult grid_exact(const Instance& instance, int horizon, const GridLimits& limits = {}) {
  if (instance.site_count() > limits.max_sites || instance.total_trips() > limits.max_trips ||
      horizon > limits.max_horizon) {
    throw SizeCapError("grid search is limited to " + std::to_string(limits.max_sites) + " sites, " +
                       std::to_string(limits.max_trips) + " trips and a horizon of " +
                       std::to_string(limits.max_horizon) + " slots");
  }
  if (horizon < instance.total_trips()) {
    throw InputError("horizon of " + std::to_string(horizon) + " slots cannot hold " +
                     std::to_string(instance.total_trips()) + " trips");
  }
  return detail::GridSearch(instance, horizon).run();
}

}  // namespace rmcdp
