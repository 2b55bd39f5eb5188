#pragma once

// File formats: JSON instances, CSV schedules and
// JSON reports. Needs nlohmann/json on the include path.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rmcdp/errors.hpp"
#include "rmcdp/feasibility.hpp"
#include "rmcdp/model.hpp"
#include "rmcdp/priority.hpp"
#include "rmcdp/time.hpp"

namespace rmcdp {

using Json = nlohmann::ordered_json;

namespace detail {

inline void json_fail(const std::string& path, const std::string& why) { throw InputError(path + ": " + why); }

inline void reject_unknown(const Json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) json_fail(path + "." + key, "unknown field");
  }
}

inline const Json& require(const Json& obj, const std::string& path, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) json_fail(path + "." + key, "missing");
  return *it;
}

inline double number(const Json& v, const std::string& path) {
  if (!v.is_number()) json_fail(path, "expected a number, got " + std::string(v.type_name()));
  return v.get<double>();
}

inline int integer(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) json_fail(path, "expected an integer, got " + v.dump());
  return v.get<int>();
}

inline Seconds minutes_value(double m, const std::string& path) {
  const double s = m * 60.0;
  if (!std::isfinite(s) || std::abs(s - std::round(s)) > 1e-6) json_fail(path, "not a whole number of seconds");
  return static_cast<Seconds>(std::llround(s));
}

// Times of day and durations: "H:MM" text or a number of minutes.
inline Seconds clock_value(const Json& v, const std::string& path) {
  if (v.is_string()) {
    auto t = parse_hmm(v.get<std::string>());
    if (!t) json_fail(path, "expected \"H:MM\", got \"" + v.get<std::string>() + "\"");
    return *t;
  }
  if (v.is_number()) return minutes_value(v.get<double>(), path);
  json_fail(path, "expected \"H:MM\" or minutes, got " + std::string(v.type_name()));
  return 0;
}

inline Json minutes_json(Seconds s) {
  if (s % 60 == 0) return Json(s / 60);
  return Json(static_cast<double>(s) / 60.0);
}

inline Json volume_json(double v) {
  if (std::abs(v - std::round(v)) < 1e-9) return Json(static_cast<std::int64_t>(std::llround(v)));
  return Json(v);
}

inline std::string volume_text(double v) {
  if (std::abs(v - std::round(v)) < 1e-9) return std::to_string(std::llround(v));
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace detail

struct InstanceDocument {
  std::string name;  // optional "name" field; empty when absent
  Instance instance;
};

inline InstanceDocument parse_instance_document(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Turn the byte offset into line/column.
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError("line " + std::to_string(line) + ", column " + std::to_string(col) + ": malformed JSON (" +
                     e.what() + ")");
  }
  if (!doc.is_object()) detail::json_fail("instance", "expected an object");
  detail::reject_unknown(doc, "instance", {"name", "depot", "sites"});

  std::string name;
  if (auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) detail::json_fail("name", "expected a string");
    name = it->get<std::string>();
  }

  const Json& d = detail::require(doc, "instance", "depot");
  if (!d.is_object()) detail::json_fail("depot", "expected an object");
  detail::reject_unknown(d, "depot", {"start", "plant_capacity", "productivity", "truck_capacity", "trucks", "gamma"});
  DepotSpec depot;
  depot.start_time = detail::clock_value(detail::require(d, "depot", "start"), "depot.start");
  depot.plant_capacity = detail::number(detail::require(d, "depot", "plant_capacity"), "depot.plant_capacity");
  depot.productivity = detail::number(detail::require(d, "depot", "productivity"), "depot.productivity");
  depot.truck_capacity = detail::number(detail::require(d, "depot", "truck_capacity"), "depot.truck_capacity");
  if (auto it = d.find("trucks"); it != d.end() && !it->is_null()) depot.truck_count = detail::integer(*it, "depot.trucks");
  if (auto it = d.find("gamma"); it != d.end()) depot.gamma = detail::clock_value(*it, "depot.gamma");

  const Json& s = detail::require(doc, "instance", "sites");
  if (!s.is_array()) detail::json_fail("sites", "expected an array");
  std::vector<SiteSpec> sites;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const std::string path = "sites[" + std::to_string(k) + "]";
    const Json& o = s[k];
    if (!o.is_object()) detail::json_fail(path, "expected an object");
    detail::reject_unknown(o, path,
                           {"id", "demand", "distance", "speed", "unload", "proposed_start", "gamma_override"});
    SiteSpec site;
    site.id = detail::integer(detail::require(o, path, "id"), path + ".id");
    site.demand = detail::number(detail::require(o, path, "demand"), path + ".demand");
    site.distance = detail::number(detail::require(o, path, "distance"), path + ".distance");
    site.speed = detail::number(detail::require(o, path, "speed"), path + ".speed");
    site.unload_time = detail::clock_value(detail::require(o, path, "unload"), path + ".unload");
    site.proposed_start = detail::clock_value(detail::require(o, path, "proposed_start"), path + ".proposed_start");
    if (auto it = o.find("gamma_override"); it != o.end() && !it->is_null()) {
      site.gamma_override = detail::clock_value(*it, path + ".gamma_override");
    }
    sites.push_back(site);
  }
  return {std::move(name), Instance::create(depot, std::move(sites))};
}

inline Instance parse_instance(std::string_view text) { return parse_instance_document(text).instance; }

inline Json instance_to_json(const Instance& instance, const std::string& name = {}) {
  Json doc;
  if (!name.empty()) doc["name"] = name;
  const auto& d = instance.depot();
  Json depot;
  depot["start"] = format_hmm(d.start_time);
  depot["plant_capacity"] = detail::volume_json(d.plant_capacity);
  depot["productivity"] = detail::volume_json(d.productivity);
  depot["truck_capacity"] = detail::volume_json(d.truck_capacity);
  if (d.truck_count) depot["trucks"] = *d.truck_count;
  depot["gamma"] = detail::minutes_json(d.gamma);
  doc["depot"] = depot;
  Json sites = Json::array();
  for (const auto& s : instance.sites()) {
    Json o;
    o["id"] = s.id;
    o["demand"] = detail::volume_json(s.demand);
    o["distance"] = detail::volume_json(s.distance);
    o["speed"] = detail::volume_json(s.speed);
    o["unload"] = detail::minutes_json(s.unload_time);
    o["proposed_start"] = format_hmm(s.proposed_start);
    if (s.gamma_override) o["gamma_override"] = detail::minutes_json(*s.gamma_override);
    sites.push_back(o);
  }
  doc["sites"] = sites;
  return doc;
}

// ---- CSV schedules -----------------------------------------------------------

inline constexpr std::string_view kScheduleHeader = "site,trip,depot_start,site_start,site_end,delivery";

inline std::string schedule_to_csv(const Schedule& schedule) {
  std::vector<const ScheduleEntry*> rows;
  for (const auto& e : schedule.entries) rows.push_back(&e);
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ScheduleEntry* a, const ScheduleEntry* b) { return a->trip < b->trip; });
  std::ostringstream out;
  out << kScheduleHeader << '\n';
  for (const auto* e : rows) {
    out << e->trip.site << ',' << e->trip.trip << ',' << format_hmm(e->depot_start) << ','
        << format_hmm(e->site_arrival) << ',' << format_hmm(e->site_departure) << ','
        << detail::volume_text(e->cumulative_delivered) << '\n';
  }
  return out.str();
}

// Rows for sites the instance does not know are kept (check() reports them
// as coverage problems). For known sites site_start and site_end must agree
// with depot_start; a disagreement is an input error naming the line.
inline Schedule schedule_from_csv(const Instance& instance, std::string_view text, std::string origin = "csv") {
  Schedule schedule;
  schedule.origin = std::move(origin);
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  bool header = false;
  auto fail = [&](const std::string& field, const std::string& why) {
    throw InputError("schedule line " + std::to_string(lineno) + (field.empty() ? "" : ", " + field) + ": " + why);
  };
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    if (!header) {
      std::string compact;
      for (char c : line)
        if (c != ' ') compact += c;
      if (compact != kScheduleHeader) fail("", "expected header '" + std::string(kScheduleHeader) + "'");
      header = true;
      continue;
    }
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 6) fail("", "expected 6 fields, found " + std::to_string(f.size()));

    auto int_field = [&](std::size_t k, const char* name) {
      int v = 0;
      auto [ptr, ec] = std::from_chars(f[k].data(), f[k].data() + f[k].size(), v);
      if (f[k].empty() || ec != std::errc{} || ptr != f[k].data() + f[k].size() || v < 1) {
        fail(name, "expected a positive integer, got '" + f[k] + "'");
      }
      return v;
    };
    auto time_field = [&](std::size_t k, const char* name) {
      auto t = parse_hmm(f[k]);
      if (!t) fail(name, "expected H:MM, got '" + f[k] + "'");
      return *t;
    };
    ScheduleEntry e;
    e.trip.site = int_field(0, "site");
    e.trip.trip = int_field(1, "trip");
    e.depot_start = time_field(2, "depot_start");
    e.site_arrival = time_field(3, "site_start");
    e.site_departure = time_field(4, "site_end");
    char* end = nullptr;
    e.cumulative_delivered = std::strtod(f[5].c_str(), &end);
    if (f[5].empty() || end != f[5].c_str() + f[5].size() || e.cumulative_delivered < 0) {
      fail("delivery", "expected a non-negative volume, got '" + f[5] + "'");
    }
    if (instance.has_site(e.trip.site)) {
      const Seconds expect = e.depot_start + instance.lead_time(e.trip.site);
      if (e.site_arrival != expect) {
        fail("site_start", format_hmm(e.site_arrival) + " does not equal depot_start + L_t + h = " + format_hmm(expect));
      }
      if (e.site_departure != e.site_arrival + instance.unload_time(e.trip.site)) {
        fail("site_end", format_hmm(e.site_departure) + " does not equal site_start + U = " +
                             format_hmm(e.site_arrival + instance.unload_time(e.trip.site)));
      }
      if (e.trip.trip <= instance.trips(e.trip.site)) {
        e.delivered = instance.trip_quantity(e.trip.site, e.trip.trip);
        const double expect_cum = instance.cumulative_quantity(e.trip.site, e.trip.trip);
        if (std::abs(e.cumulative_delivered - expect_cum) > 1e-6) {
          fail("delivery", "cumulative delivery " + f[5] + " does not match " + detail::volume_text(expect_cum));
        }
      }
    }
    schedule.entries.push_back(e);
  }
  if (!header) throw InputError("schedule is empty (no header)");
  std::stable_sort(schedule.entries.begin(), schedule.entries.end(),
                   [](const ScheduleEntry& a, const ScheduleEntry& b) { return a.trip < b.trip; });
  return schedule;
}

// ---- JSON reports ------------------------------------------------------------

inline Json sequence_json(const TripSequence& seq) {
  Json a = Json::array();
  for (int s : seq) a.push_back(s);
  return a;
}

inline Json schedule_to_json(const Schedule& schedule) {
  Json rows = Json::array();
  std::vector<const ScheduleEntry*> sorted;
  for (const auto& e : schedule.entries) sorted.push_back(&e);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ScheduleEntry* a, const ScheduleEntry* b) { return a->trip < b->trip; });
  for (const auto* e : sorted) {
    Json r;
    r["site"] = e->trip.site;
    r["trip"] = e->trip.trip;
    r["depot_start"] = format_hmm(e->depot_start);
    r["site_start"] = format_hmm(e->site_arrival);
    r["site_end"] = format_hmm(e->site_departure);
    r["delivered"] = detail::volume_json(e->delivered);
    r["delivery"] = detail::volume_json(e->cumulative_delivered);
    rows.push_back(r);
  }
  Json doc;
  doc["origin"] = schedule.origin;
  doc["dispatch_sequence"] = sequence_json(schedule.dispatch_sequence());
  doc["entries"] = rows;
  return doc;
}

inline Json violation_to_json(const Violation& v) {
  Json o;
  o["kind"] = std::string(to_string(v.kind));
  Json trips = Json::array();
  for (const auto& t : v.trips) trips.push_back(Json::array({t.site, t.trip}));
  o["trips"] = trips;
  const bool counted = v.kind == ViolationKind::kTruckOverrun || v.kind == ViolationKind::kCoverage;
  o["measured"] = counted ? Json(v.measured) : detail::minutes_json(v.measured);
  o["bound"] = counted ? Json(v.bound) : detail::minutes_json(v.bound);
  o["detail"] = v.detail;
  return o;
}

inline Json feasibility_to_json(const FeasibilityReport& report) {
  Json o;
  o["feasible"] = report.feasible();
  Json list = Json::array();
  for (const auto& v : report.violations) list.push_back(violation_to_json(v));
  o["violations"] = list;
  return o;
}

// Durations in minutes.
inline Json objective_to_json(const ObjectiveReport& r) {
  Json o;
  o["total_site_wait"] = detail::minutes_json(r.total_site_wait);
  o["first_wait_total"] = detail::minutes_json(r.first_wait_total);
  o["inter_trip_wait_total"] = detail::minutes_json(r.inter_trip_wait_total);
  o["truck_idle_total"] = detail::minutes_json(r.truck_idle_total);
  o["trucks_required"] = r.trucks_required;
  Json sites = Json::array();
  for (const auto& s : r.per_site) {
    Json x;
    x["site"] = s.site;
    x["first_wait"] = detail::minutes_json(s.first_wait);
    x["inter_trip_wait"] = detail::minutes_json(s.inter_trip_wait);
    x["truck_idle"] = detail::minutes_json(s.truck_idle);
    sites.push_back(x);
  }
  o["per_site"] = sites;
  return o;
}

// Runtime is left out on purpose so that reports stay byte-identical across
// runs; callers that want it add it themselves.
inline Json priority_stats_to_json(const PrioritySearchStats& s) {
  Json o;
  o["permutations_created"] = s.permutations_created;
  o["feasible_count"] = s.feasible_count;
  o["feasibility_percent"] = std::round(s.feasibility_rate * 1e6) / 1e4;
  o["best_objective"] = s.best_objective ? detail::minutes_json(*s.best_objective) : Json(nullptr);
  return o;
}

}  // namespace rmcdp
