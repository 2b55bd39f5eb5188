#pragma once

// Timed schedules, the constraint verifier and the waiting/idle objective.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rmcdp/errors.hpp"
#include "rmcdp/model.hpp"
#include "rmcdp/time.hpp"

namespace rmcdp {

// Site ids in dispatch order; one entry per trip.
using TripSequence = std::vector<int>;

struct TripId {
  int site = 0;
  int trip = 0;  // 1-based within the site

  friend auto operator<=>(const TripId&, const TripId&) = default;
};

struct ScheduleEntry {
  TripId trip;
  Seconds depot_start = 0;
  Seconds site_arrival = 0;
  Seconds site_departure = 0;
  double delivered = 0.0;
  double cumulative_delivered = 0.0;
};

struct Schedule {
  std::vector<ScheduleEntry> entries;  // sorted by (site, trip)
  std::string origin;

  // Site ids ordered by depot load start.
  TripSequence dispatch_sequence() const {
    std::vector<const ScheduleEntry*> order;
    order.reserve(entries.size());
    for (const auto& e : entries) order.push_back(&e);
    std::stable_sort(order.begin(), order.end(),
                     [](const ScheduleEntry* a, const ScheduleEntry* b) { return a->depot_start < b->depot_start; });
    TripSequence seq;
    seq.reserve(order.size());
    for (const auto* e : order) seq.push_back(e->trip.site);
    return seq;
  }

  const ScheduleEntry* find(TripId id) const {
    for (const auto& e : entries)
      if (e.trip == id) return &e;
    return nullptr;
  }
};

enum class ViolationKind {
  kGammaExceeded,
  kSlotConflict,
  kTruckOverrun,
  kAccessibility,
  kCoverage,
  kTripOrder,
  kModelRow,
};

inline std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kGammaExceeded: return "gamma_exceeded";
    case ViolationKind::kSlotConflict: return "slot_conflict";
    case ViolationKind::kTruckOverrun: return "truck_overrun";
    case ViolationKind::kAccessibility: return "accessibility";
    case ViolationKind::kCoverage: return "coverage";
    case ViolationKind::kTripOrder: return "trip_order";
    case ViolationKind::kModelRow: return "model_row";
  }
  return "unknown";
}

// measured/bound are seconds for time kinds and plain counts for
// truck_overrun and coverage.
struct Violation {
  ViolationKind kind{};
  std::vector<TripId> trips;
  std::int64_t measured = 0;
  std::int64_t bound = 0;
  std::string detail;
};

struct FeasibilityReport {
  std::vector<Violation> violations;

  bool feasible() const { return violations.empty(); }
  std::size_t count(ViolationKind kind) const {
    return static_cast<std::size_t>(
        std::count_if(violations.begin(), violations.end(), [kind](const Violation& v) { return v.kind == kind; }));
  }
};

struct SiteObjective {
  int site = 0;
  Seconds first_wait = 0;
  Seconds inter_trip_wait = 0;
  Seconds truck_idle = 0;
};

struct ObjectiveReport {
  Seconds first_wait_total = 0;
  Seconds inter_trip_wait_total = 0;
  Seconds total_site_wait = 0;
  Seconds truck_idle_total = 0;
  int trucks_required = 0;
  std::vector<SiteObjective> per_site;
};

inline ScheduleEntry make_entry(const Instance& instance, TripId id, Seconds depot_start) {
  ScheduleEntry e;
  e.trip = id;
  e.depot_start = depot_start;
  e.site_arrival = depot_start + instance.lead_time(id.site);
  e.site_departure = e.site_arrival + instance.unload_time(id.site);
  e.delivered = instance.trip_quantity(id.site, id.trip);
  e.cumulative_delivered = instance.cumulative_quantity(id.site, id.trip);
  return e;
}

// starts[i] holds the depot load starts of site i+1, trip order.
inline Schedule schedule_from_depot_starts(const Instance& instance, const std::vector<std::vector<Seconds>>& starts,
                                           std::string origin = "timetable") {
  Schedule s;
  s.origin = std::move(origin);
  for (std::size_t i = 0; i < starts.size(); ++i) {
    for (std::size_t j = 0; j < starts[i].size(); ++j) {
      s.entries.push_back(make_entry(instance, {static_cast<int>(i) + 1, static_cast<int>(j) + 1}, starts[i][j]));
    }
  }
  return s;
}

// Throws InputError unless seq holds each site exactly trips(site) times.
inline void require_trip_multiset(const Instance& instance, const TripSequence& seq) {
  std::vector<int> seen(instance.site_count() + 1, 0);
  for (int site : seq) {
    if (!instance.has_site(site)) throw InputError("sequence references unknown site " + std::to_string(site));
    ++seen[static_cast<std::size_t>(site)];
  }
  for (const auto& s : instance.sites()) {
    if (seen[static_cast<std::size_t>(s.id)] != instance.trips(s.id)) {
      throw InputError("sequence holds site " + std::to_string(s.id) + " " +
                       std::to_string(seen[static_cast<std::size_t>(s.id)]) + " times, expected " +
                       std::to_string(instance.trips(s.id)));
    }
  }
}

// Back-to-back loading: the k-th trip of seq (0-based) loads at D^s + k L_t.
inline Schedule expand_consecutive(const Instance& instance, const TripSequence& seq,
                                   std::string origin = "sequence") {
  require_trip_multiset(instance, seq);
  std::vector<std::vector<Seconds>> starts(instance.site_count());
  Seconds t = instance.depot().start_time;
  for (int site : seq) {
    starts[static_cast<std::size_t>(site - 1)].push_back(t);
    t += instance.loading_time();
  }
  return schedule_from_depot_starts(instance, starts, std::move(origin));
}

// Largest number of trips simultaneously away from the depot; a trip holds
// its truck over [depot_start, depot_start + trip duration).
inline int peak_trucks(const Instance& instance, const Schedule& schedule) {
  std::vector<std::pair<Seconds, int>> events;
  for (const auto& e : schedule.entries) {
    if (!instance.has_site(e.trip.site)) continue;
    events.emplace_back(e.depot_start, +1);
    events.emplace_back(e.depot_start + instance.trip_duration(e.trip.site), -1);
  }
  std::sort(events.begin(), events.end());  // -1 sorts before +1 at equal times
  int current = 0;
  int peak = 0;
  for (const auto& [t, delta] : events) {
    current += delta;
    peak = std::max(peak, current);
  }
  return peak;
}

struct CheckOptions {
  std::optional<Seconds> gamma_override;  // replaces every site's gamma for the arrival-gap test
  std::optional<int> truck_limit;         // falls back to the depot truck count
};

namespace detail {

inline std::string trip_label(TripId id) { return std::to_string(id.site) + "-" + std::to_string(id.trip); }

// Entries of each known site, ordered by trip index; reports coverage
// problems along the way.
inline std::vector<std::vector<const ScheduleEntry*>> group_by_site(const Instance& instance, const Schedule& schedule,
                                                                   std::vector<Violation>* violations) {
  std::vector<std::vector<const ScheduleEntry*>> by_site(instance.site_count());
  std::map<TripId, int> seen;
  for (const auto& e : schedule.entries) {
    if (!instance.has_site(e.trip.site) || e.trip.trip < 1 || e.trip.trip > instance.trips(e.trip.site)) {
      if (violations) {
        violations->push_back({ViolationKind::kCoverage, {e.trip}, 1, 0,
                               "trip " + trip_label(e.trip) + " is not part of the instance"});
      }
      continue;
    }
    if (++seen[e.trip] == 2 && violations) {
      violations->push_back({ViolationKind::kCoverage, {e.trip}, 2, 1, "trip " + trip_label(e.trip) + " is duplicated"});
    }
    by_site[static_cast<std::size_t>(e.trip.site - 1)].push_back(&e);
  }
  for (const auto& s : instance.sites()) {
    for (int j = 1; j <= instance.trips(s.id); ++j) {
      if (!seen.contains({s.id, j}) && violations) {
        violations->push_back({ViolationKind::kCoverage, {{s.id, j}}, 0, 1,
                               "trip " + trip_label({s.id, j}) + " is missing"});
      }
    }
  }
  for (auto& group : by_site) {
    std::stable_sort(group.begin(), group.end(),
                     [](const ScheduleEntry* a, const ScheduleEntry* b) { return a->trip.trip < b->trip.trip; });
  }
  return by_site;
}

}  // namespace detail

// Collects every violated constraint; never throws on bad schedules.
inline FeasibilityReport check(const Instance& instance, const Schedule& schedule, const CheckOptions& options = {}) {
  FeasibilityReport report;
  auto& out = report.violations;
  const auto by_site = detail::group_by_site(instance, schedule, &out);

  for (const auto& s : instance.sites()) {
    const Seconds reach = instance.loading_time() + instance.hauling_time(s.id) + s.unload_time;
    if (reach > instance.gamma(s.id)) {
      out.push_back({ViolationKind::kAccessibility, {}, reach, instance.gamma(s.id),
                     "site " + std::to_string(s.id) + " lies outside the service area"});
    }
  }

  for (const auto& group : by_site) {
    for (std::size_t k = 1; k < group.size(); ++k) {
      const auto* prev = group[k - 1];
      const auto* next = group[k];
      if (prev->trip == next->trip) continue;  // duplicate, already reported
      const Seconds gap = next->site_arrival - prev->site_arrival;
      const Seconds bound = options.gamma_override.value_or(instance.gamma(next->trip.site));
      if (gap <= 0 || next->depot_start <= prev->depot_start) {
        out.push_back({ViolationKind::kTripOrder, {prev->trip, next->trip}, gap, 0,
                       "trip " + detail::trip_label(next->trip) + " does not follow " + detail::trip_label(prev->trip)});
      } else if (gap > bound) {
        out.push_back({ViolationKind::kGammaExceeded, {prev->trip, next->trip}, gap, bound,
                       "arrivals of " + detail::trip_label(prev->trip) + " and " + detail::trip_label(next->trip) +
                           " are " + format_minutes(gap) + " min apart (> " + format_minutes(bound) + ")"});
      }
    }
  }

  std::vector<const ScheduleEntry*> loads;
  for (const auto& e : schedule.entries) loads.push_back(&e);
  std::stable_sort(loads.begin(), loads.end(),
                   [](const ScheduleEntry* a, const ScheduleEntry* b) { return a->depot_start < b->depot_start; });
  for (std::size_t k = 1; k < loads.size(); ++k) {
    const Seconds delta = loads[k]->depot_start - loads[k - 1]->depot_start;
    if (delta < instance.loading_time()) {
      out.push_back({ViolationKind::kSlotConflict, {loads[k - 1]->trip, loads[k]->trip}, delta,
                     instance.loading_time(),
                     "loads of " + detail::trip_label(loads[k - 1]->trip) + " and " +
                         detail::trip_label(loads[k]->trip) + " overlap at the depot"});
    }
  }

  const auto limit = options.truck_limit ? options.truck_limit : instance.depot().truck_count;
  if (limit) {
    struct Event {
      Seconds time;
      int delta;
      TripId trip;
    };
    std::vector<Event> events;
    for (const auto& e : schedule.entries) {
      if (!instance.has_site(e.trip.site)) continue;
      events.push_back({e.depot_start, +1, e.trip});
      events.push_back({e.depot_start + instance.trip_duration(e.trip.site), -1, e.trip});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
      return a.time != b.time ? a.time < b.time : a.delta < b.delta;
    });
    int current = 0;
    for (const auto& ev : events) {
      current += ev.delta;
      if (ev.delta > 0 && current > *limit) {
        out.push_back({ViolationKind::kTruckOverrun, {ev.trip}, current, *limit,
                       std::to_string(current) + " trucks in flight at " + format_hmm(ev.time)});
      }
    }
  }
  return report;
}

// Waiting and idle per consecutive same-site pair, first-delivery delay,
// and the peak truck count. Throws InputError on coverage problems.
inline ObjectiveReport evaluate(const Instance& instance, const Schedule& schedule) {
  std::vector<Violation> coverage;
  const auto by_site = detail::group_by_site(instance, schedule, &coverage);
  if (!coverage.empty()) throw InputError("schedule does not cover the instance: " + coverage.front().detail);

  ObjectiveReport r;
  for (const auto& s : instance.sites()) {
    const auto& group = by_site[static_cast<std::size_t>(s.id - 1)];
    SiteObjective so;
    so.site = s.id;
    so.first_wait = std::max<Seconds>(0, group.front()->site_arrival - s.proposed_start);
    for (std::size_t k = 1; k < group.size(); ++k) {
      const Seconds gap = group[k]->site_arrival - group[k - 1]->site_arrival;
      so.inter_trip_wait += std::max<Seconds>(0, gap - s.unload_time);
      so.truck_idle += std::max<Seconds>(0, s.unload_time - gap);
    }
    r.first_wait_total += so.first_wait;
    r.inter_trip_wait_total += so.inter_trip_wait;
    r.truck_idle_total += so.truck_idle;
    r.per_site.push_back(so);
  }
  r.total_site_wait = r.first_wait_total + r.inter_trip_wait_total;
  r.trucks_required = peak_trucks(instance, schedule);
  return r;
}

}  // namespace rmcdp
