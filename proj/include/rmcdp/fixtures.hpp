#pragma once

// The three reference instances: the two-site illustration used for the
// graph examples, and the 5-site / 9-site benchmark instances. The same
// data ships as JSON under data/.

#include <vector>

#include "rmcdp/model.hpp"

namespace rmcdp::fixtures {

// Two sites, two trips each, L_t = 10 min, hauls 10 and 20 min, U = 20 min,
// both sites asking for 8:00.
inline Instance example1() {
  DepotSpec depot;
  depot.start_time = hours(8);
  depot.plant_capacity = 1.0;
  depot.productivity = 60.0;
  depot.truck_capacity = 10.0;
  std::vector<SiteSpec> sites = {
      {1, 20.0, 10.0, 60.0, minutes(20), hours(8), {}},
      {2, 20.0, 20.0, 60.0, minutes(20), hours(8), {}},
  };
  return Instance::create(depot, sites);
}

// Five sites of 50 m3, Q = 10 m3, 120 m3/h (L_t = 5 min), 60 km/h.
inline Instance instance1() {
  DepotSpec depot;
  depot.start_time = hours(8);
  depot.plant_capacity = 2.0;
  depot.productivity = 120.0;
  depot.truck_capacity = 10.0;
  const double distance[] = {30, 20, 20, 10, 10};
  const int unload[] = {25, 25, 25, 30, 30};
  std::vector<SiteSpec> sites;
  for (int i = 0; i < 5; ++i) sites.push_back({i + 1, 50.0, distance[i], 60.0, minutes(unload[i]), hours(8), {}});
  return Instance::create(depot, sites);
}

// Nine sites of 50 m3, U = 20 min everywhere.
inline Instance instance2() {
  DepotSpec depot;
  depot.start_time = hours(8);
  depot.plant_capacity = 2.0;
  depot.productivity = 120.0;
  depot.truck_capacity = 10.0;
  const double distance[] = {30, 30, 30, 20, 20, 20, 10, 10, 10};
  std::vector<SiteSpec> sites;
  for (int i = 0; i < 9; ++i) sites.push_back({i + 1, 50.0, distance[i], 60.0, minutes(20), hours(8), {}});
  return Instance::create(depot, sites);
}

}  // namespace rmcdp::fixtures
