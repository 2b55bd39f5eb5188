#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "rmcdp/fixtures.hpp"
#include "rmcdp/model.hpp"

using namespace rmcdp;

namespace {

__extension__ typedef unsigned __int128 u128;

// Multinomial as a product of binomials C(remaining, k_i), in 128 bits.
u128 multinomial_oracle(const std::vector<int>& counts) {
  u128 result = 1;
  int remaining = 0;
  for (int c : counts) remaining += c;
  for (int c : counts) {
    u128 binom = 1;
    for (int k = 1; k <= c; ++k) binom = binom * static_cast<unsigned>(remaining - c + k) / static_cast<unsigned>(k);
    result *= binom;
    remaining -= c;
  }
  return result;
}

std::string to_string_u128(u128 v) {
  if (v == 0) return "0";
  std::string s;
  while (v > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
    v /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

// Distinct sequences found by recursive generation into a set.
std::size_t brute_force_count(std::vector<int> remaining) {
  std::set<std::vector<int>> seen;
  std::vector<int> prefix;
  int total = 0;
  for (int c : remaining) total += c;
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(prefix.size()) == total) {
      seen.insert(prefix);
      return;
    }
    for (std::size_t i = 0; i < remaining.size(); ++i) {
      if (remaining[i] == 0) continue;
      --remaining[i];
      prefix.push_back(static_cast<int>(i) + 1);
      self(self);
      prefix.pop_back();
      ++remaining[i];
    }
  };
  rec(rec);
  return seen.size();
}

Instance uniform_instance(std::vector<double> demands, double Q = 10.0) {
  DepotSpec d;
  d.productivity = 60.0;
  d.truck_capacity = Q;
  std::vector<SiteSpec> sites;
  for (std::size_t i = 0; i < demands.size(); ++i) {
    sites.push_back({static_cast<int>(i) + 1, demands[i], 10.0, 60.0, minutes(20), hours(8), {}});
  }
  return Instance::create(d, sites);
}

}  // namespace

TEST(TripsForSite, CeilingOfDemandOverCapacity) {
  EXPECT_EQ(trips_for_site(50, 10), 5);
  EXPECT_EQ(trips_for_site(10, 10), 1);
  EXPECT_EQ(trips_for_site(15, 10), 2);
  EXPECT_EQ(trips_for_site(0.5, 10), 1);
}

TEST(TripsForSite, RejectsNonPositive) {
  EXPECT_THROW(trips_for_site(0, 10), ValidationError);
  EXPECT_THROW(trips_for_site(-1, 10), ValidationError);
  EXPECT_THROW(trips_for_site(10, 0), ValidationError);
}

TEST(TripsForSite, BracketsDemand) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> q(1, 500), cap(1, 40);
  for (int k = 0; k < 2000; ++k) {
    const double demand = q(rng) / 4.0;
    const double Q = cap(rng) / 2.0;
    const int t = trips_for_site(demand, Q);
    EXPECT_GE(t * Q, demand - 1e-9);
    EXPECT_LT((t - 1) * Q, demand);
  }
}

TEST(TotalTrips, BundledInstances) {
  EXPECT_EQ(total_trips(fixtures::instance1()), 25);
  EXPECT_EQ(total_trips(fixtures::instance2()), 45);
  EXPECT_EQ(total_trips(uniform_instance({10})), 1);
}

TEST(LoadingTime, WholeMinutes) {
  EXPECT_EQ(loading_time(10, 120), minutes(5));
  EXPECT_EQ(loading_time(10, 60), minutes(10));
  EXPECT_EQ(loading_time(7, 7), minutes(60));
}

TEST(LoadingTime, RejectsFractionalSeconds) {
  EXPECT_THROW(loading_time(10, 7), ValidationError);  // 5142.857... s
  EXPECT_THROW(loading_time(0, 60), ValidationError);
}

TEST(TripDuration, InstanceOneSites) {
  const Instance i1 = fixtures::instance1();
  EXPECT_EQ(i1.trip_duration(1), minutes(90));
  EXPECT_EQ(i1.trip_duration(5), minutes(55));
  EXPECT_EQ(trip_duration(i1.site(1), i1.depot()), minutes(90));
}

TEST(TripDuration, ZeroDistance) {
  DepotSpec d;
  SiteSpec s{1, 10, 0.0, 60, minutes(20), hours(8), {}};
  EXPECT_EQ(trip_duration(s, d), loading_time(d.truck_capacity, d.productivity) + minutes(20));
}

TEST(TripDuration, AtLeastLoadPlusUnload) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<int> dist(0, 40), unload(1, 60);
  DepotSpec d;
  for (int k = 0; k < 500; ++k) {
    SiteSpec s{1, 10, static_cast<double>(dist(rng)), 60, minutes(unload(rng)), hours(8), {}};
    const Seconds base = loading_time(d.truck_capacity, d.productivity) + s.unload_time;
    EXPECT_GE(trip_duration(s, d), base);
    EXPECT_EQ(trip_duration(s, d) == base, s.distance == 0.0);
  }
}

TEST(TruckUpperBound, TwoWindowsOverLoading) {
  EXPECT_EQ(truck_upper_bound(minutes(90), minutes(10)), 18);
  EXPECT_EQ(truck_upper_bound(minutes(90), minutes(5)), 36);
  EXPECT_EQ(truck_upper_bound(minutes(45), minutes(90)), 1);
  EXPECT_EQ(truck_upper_bound(fixtures::instance1()), 36);
  EXPECT_EQ(truck_upper_bound_single_window(minutes(90), minutes(5)), 18);
}

TEST(SolutionSpace, Example1) { EXPECT_EQ(solution_space_size(fixtures::example1()), 6); }

TEST(SolutionSpace, Instance1) {
  const BigInt v = solution_space_size(fixtures::instance1());
  EXPECT_EQ(v.str(), "623360743125120");
  EXPECT_EQ(v.str(), to_string_u128(multinomial_oracle({5, 5, 5, 5, 5})));
  // Reference value 6.2336074 x 10^14.
  EXPECT_EQ(v.str().substr(0, 8), "62336074");
  EXPECT_EQ(v.str().size(), 15u);
}

TEST(SolutionSpace, Instance2) {
  const BigInt v = solution_space_size(fixtures::instance2());
  EXPECT_EQ(v.str(), to_string_u128(multinomial_oracle(std::vector<int>(9, 5))));
  // Reference value 2.3183588 x 10^37; check 8 significant figures with rounding.
  const std::string digits = v.str();
  ASSERT_EQ(digits.size(), 38u);
  const long long lead9 = std::stoll(digits.substr(0, 9));
  EXPECT_EQ((lead9 + 5) / 10, 23183588);
}

TEST(SolutionSpace, MatchesBruteForceCount) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> n(1, 4), k(1, 4);
  for (int rep = 0; rep < 60; ++rep) {
    std::vector<double> demands;
    std::vector<int> counts;
    int total = 0;
    const int sites = n(rng);
    for (int i = 0; i < sites; ++i) {
      int c = k(rng);
      if (total + c > 10) c = 1;
      total += c;
      counts.push_back(c);
      demands.push_back(10.0 * c);
    }
    if (total > 10) continue;
    const Instance inst = uniform_instance(demands);
    EXPECT_EQ(solution_space_size(inst), BigInt(brute_force_count(counts)));
  }
}

TEST(SolutionSpace, SymmetricUnderSiteReordering) {
  const Instance a = uniform_instance({30, 10, 20, 40});
  const Instance b = uniform_instance({40, 20, 10, 30});
  EXPECT_EQ(solution_space_size(a), solution_space_size(b));
  EXPECT_EQ(solution_space_size(a), 12600);  // 10!/(3!1!2!4!)
}

TEST(Instance, ValidatesIds) {
  DepotSpec d;
  SiteSpec s1{1, 10, 10, 60, minutes(20), hours(8), {}};
  SiteSpec s3{3, 10, 10, 60, minutes(20), hours(8), {}};
  EXPECT_THROW(Instance::create(d, {s1, s3}), ValidationError);
  EXPECT_THROW(Instance::create(d, {s1, s1}), ValidationError);
  EXPECT_THROW(Instance::create(d, {}), ValidationError);
  // Ids may come in any order.
  SiteSpec s2{2, 10, 10, 60, minutes(20), hours(8), {}};
  EXPECT_NO_THROW(Instance::create(d, {s2, s1}));
}

TEST(Instance, RejectsInaccessibleSite) {
  DepotSpec d;  // L_t 10, gamma 90
  SiteSpec far{1, 10, 70, 60, minutes(20), hours(8), {}};  // 10 + 70 + 20 > 90
  EXPECT_THROW(Instance::create(d, {far}), ValidationError);
  SiteSpec edge{1, 10, 60, 60, minutes(20), hours(8), {}};  // exactly 90
  EXPECT_NO_THROW(Instance::create(d, {edge}));
}

TEST(Instance, RejectsBadFields) {
  DepotSpec d;
  EXPECT_THROW(Instance::create(d, {{1, 0, 10, 60, minutes(20), hours(8), {}}}), ValidationError);
  EXPECT_THROW(Instance::create(d, {{1, 10, -1, 60, minutes(20), hours(8), {}}}), ValidationError);
  EXPECT_THROW(Instance::create(d, {{1, 10, 10, 0, minutes(20), hours(8), {}}}), ValidationError);
  EXPECT_THROW(Instance::create(d, {{1, 10, 10, 60, 0, hours(8), {}}}), ValidationError);
  // 10 km at 7 km/h is not a whole number of seconds.
  EXPECT_THROW(Instance::create(d, {{1, 10, 10, 7, minutes(20), hours(8), {}}}), ValidationError);
  DepotSpec bad = d;
  bad.truck_count = 0;
  EXPECT_THROW(Instance::create(bad, {{1, 10, 10, 60, minutes(20), hours(8), {}}}), ValidationError);
}

TEST(Instance, PartialLastTrip) {
  const Instance inst = uniform_instance({25});
  EXPECT_EQ(inst.trips(1), 3);
  EXPECT_DOUBLE_EQ(inst.trip_quantity(1, 1), 10);
  EXPECT_DOUBLE_EQ(inst.trip_quantity(1, 3), 5);
  EXPECT_DOUBLE_EQ(inst.cumulative_quantity(1, 3), 25);
}

TEST(Instance, GroupedMultiset) {
  const Instance e1 = fixtures::example1();
  EXPECT_EQ(e1.grouped_trip_multiset(), (std::vector<int>{1, 1, 2, 2}));
}
