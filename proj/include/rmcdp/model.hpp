#pragma once

// Instance data for single-depot ready-mixed-concrete delivery and the
// closed-form quantities derived from it (trip counts, loading and trip
// times, truck bound, size of the trip-sequence space).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "rmcdp/errors.hpp"
#include "rmcdp/time.hpp"

namespace rmcdp {

using BigInt = boost::multiprecision::cpp_int;

struct DepotSpec {
  Seconds start_time = hours(8);
  double plant_capacity = 1.0;  // m3, stored only
  double productivity = 60.0;   // m3 per hour
  double truck_capacity = 10.0; // m3
  std::optional<int> truck_count;  // absent: enough trucks for every slot
  Seconds gamma = minutes(90);
};

struct SiteSpec {
  int id = 0;
  double demand = 0.0;       // m3
  double distance = 0.0;     // km
  double speed = 60.0;       // km/h
  Seconds unload_time = 0;
  Seconds proposed_start = 0;
  std::optional<Seconds> gamma_override;
};

namespace detail {

// Converts an exact-in-theory duration to whole seconds, rejecting values
// that are not integral (within floating noise).
inline Seconds whole_seconds(double value, const std::string& what) {
  const double rounded = std::round(value);
  if (!std::isfinite(value) || std::abs(value - rounded) > 1e-6) {
    throw ValidationError(what + " is not a whole number of seconds (" + std::to_string(value) + " s)");
  }
  return static_cast<Seconds>(rounded);
}

}  // namespace detail

// ceil(q / Q).
inline int trips_for_site(double demand, double truck_capacity) {
  if (!(demand > 0.0) || !(truck_capacity > 0.0)) {
    throw ValidationError("demand and truck capacity must be positive");
  }
  const double ratio = demand / truck_capacity;
  const double nearest = std::round(ratio);
  // 50/10 must stay 5 even if the division lands a hair above.
  if (std::abs(ratio - nearest) < 1e-9) return static_cast<int>(nearest);
  return static_cast<int>(std::ceil(ratio));
}

// Q / P_r, in seconds.
inline Seconds loading_time(double truck_capacity, double productivity) {
  if (!(truck_capacity > 0.0) || !(productivity > 0.0)) {
    throw ValidationError("truck capacity and productivity must be positive");
  }
  return detail::whole_seconds(truck_capacity * 3600.0 / productivity, "loading time");
}

// d / v, in seconds.
inline Seconds hauling_time(const SiteSpec& site) {
  if (!(site.speed > 0.0)) throw ValidationError("site " + std::to_string(site.id) + ": speed must be positive");
  return detail::whole_seconds(site.distance * 3600.0 / site.speed,
                               "site " + std::to_string(site.id) + " hauling time");
}

// L_t + 2 h_i + U_i.
inline Seconds trip_duration(const SiteSpec& site, const DepotSpec& depot) {
  return loading_time(depot.truck_capacity, depot.productivity) + 2 * hauling_time(site) + site.unload_time;
}

// floor(2 gamma / L_t).
inline int truck_upper_bound(Seconds gamma, Seconds loading) {
  if (loading <= 0) throw ValidationError("loading time must be positive");
  return static_cast<int>((2 * gamma) / loading);
}

// floor(gamma / L_t). The value usually quoted for instance-1 (18) matches
// this one-window reading rather than the 2-gamma formula.
inline int truck_upper_bound_single_window(Seconds gamma, Seconds loading) {
  if (loading <= 0) throw ValidationError("loading time must be positive");
  return static_cast<int>(gamma / loading);
}

class Instance {
 public:
  // Validates everything; the returned object is immutable.
  static Instance create(DepotSpec depot, std::vector<SiteSpec> sites) {
    Instance inst;
    if (!(depot.truck_capacity > 0.0)) throw ValidationError("depot.truck_capacity must be positive");
    if (!(depot.productivity > 0.0)) throw ValidationError("depot.productivity must be positive");
    if (!(depot.plant_capacity > 0.0)) throw ValidationError("depot.plant_capacity must be positive");
    if (depot.gamma <= 0) throw ValidationError("depot.gamma must be positive");
    if (depot.truck_count && *depot.truck_count <= 0) throw ValidationError("depot.trucks must be positive");
    if (sites.empty()) throw ValidationError("instance needs at least one site");

    inst.loading_ = rmcdp::loading_time(depot.truck_capacity, depot.productivity);
    if (inst.loading_ <= 0) throw ValidationError("loading time must be positive");

    std::sort(sites.begin(), sites.end(), [](const SiteSpec& a, const SiteSpec& b) { return a.id < b.id; });
    for (std::size_t k = 0; k < sites.size(); ++k) {
      const SiteSpec& s = sites[k];
      const std::string tag = "site " + std::to_string(s.id);
      if (s.id != static_cast<int>(k) + 1) {
        throw ValidationError("site ids must be exactly 1.." + std::to_string(sites.size()) +
                              " without duplicates (found " + std::to_string(s.id) + ")");
      }
      if (!(s.demand > 0.0)) throw ValidationError(tag + ": demand must be positive");
      if (!(s.distance >= 0.0)) throw ValidationError(tag + ": distance must be non-negative");
      if (!(s.speed > 0.0)) throw ValidationError(tag + ": speed must be positive");
      if (s.unload_time <= 0) throw ValidationError(tag + ": unload time must be positive");
      if (s.gamma_override && *s.gamma_override <= 0) throw ValidationError(tag + ": gamma must be positive");
      const Seconds haul = rmcdp::hauling_time(s);
      const Seconds window = s.gamma_override.value_or(depot.gamma);
      if (inst.loading_ + haul + s.unload_time > window) {
        throw ValidationError(tag + ": outside the service area (L_t + h + U = " +
                              format_minutes(inst.loading_ + haul + s.unload_time) + " min > gamma " +
                              format_minutes(window) + " min)");
      }
      inst.haul_.push_back(haul);
      inst.trips_.push_back(trips_for_site(s.demand, depot.truck_capacity));
    }
    inst.depot_ = std::move(depot);
    inst.sites_ = std::move(sites);
    for (int t : inst.trips_) inst.total_trips_ += t;
    return inst;
  }

  const DepotSpec& depot() const { return depot_; }
  std::span<const SiteSpec> sites() const { return sites_; }
  std::size_t site_count() const { return sites_.size(); }
  bool has_site(int id) const { return id >= 1 && id <= static_cast<int>(sites_.size()); }
  const SiteSpec& site(int id) const { return sites_.at(static_cast<std::size_t>(id - 1)); }

  Seconds loading_time() const { return loading_; }
  Seconds hauling_time(int id) const { return haul_.at(static_cast<std::size_t>(id - 1)); }
  Seconds unload_time(int id) const { return site(id).unload_time; }
  Seconds gamma(int id) const { return site(id).gamma_override.value_or(depot_.gamma); }
  Seconds trip_duration(int id) const { return loading_ + 2 * hauling_time(id) + unload_time(id); }
  // Depot load start to site arrival.
  Seconds lead_time(int id) const { return loading_ + hauling_time(id); }

  int trips(int id) const { return trips_.at(static_cast<std::size_t>(id - 1)); }
  int total_trips() const { return total_trips_; }

  // Volume carried by trip j (1-based): full loads, remainder on the last.
  double trip_quantity(int id, int j) const {
    const double q = site(id).demand;
    const double cap = depot_.truck_capacity;
    return std::min(cap, q - cap * (j - 1));
  }
  double cumulative_quantity(int id, int j) const {
    return std::min(site(id).demand, depot_.truck_capacity * j);
  }

  // One trip per site per multiplicity, grouped by site: 1,1,..,2,2,...
  std::vector<int> grouped_trip_multiset() const {
    std::vector<int> seq;
    seq.reserve(static_cast<std::size_t>(total_trips_));
    for (const auto& s : sites_) seq.insert(seq.end(), static_cast<std::size_t>(trips(s.id)), s.id);
    return seq;
  }

 private:
  Instance() = default;

  DepotSpec depot_;
  std::vector<SiteSpec> sites_;
  std::vector<Seconds> haul_;
  std::vector<int> trips_;
  Seconds loading_ = 0;
  int total_trips_ = 0;
};

inline int total_trips(const Instance& instance) { return instance.total_trips(); }

inline BigInt factorial(unsigned n) {
  BigInt r = 1;
  for (unsigned k = 2; k <= n; ++k) r *= k;
  return r;
}

// (sum |k_i|)! / prod |k_i|!, exact.
inline BigInt solution_space_size(const Instance& instance) {
  BigInt denominator = 1;
  for (const auto& s : instance.sites()) denominator *= factorial(static_cast<unsigned>(instance.trips(s.id)));
  return factorial(static_cast<unsigned>(instance.total_trips())) / denominator;
}

inline int truck_upper_bound(const Instance& instance) {
  return truck_upper_bound(instance.depot().gamma, instance.loading_time());
}

}  // namespace rmcdp
