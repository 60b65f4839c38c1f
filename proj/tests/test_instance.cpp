#include <cmath>
#include <filesystem>
#include <limits>
#include <random>
#include <set>
#include <sstream>

#include "athn/error.hpp"
#include "athn/geo.hpp"
#include "athn/instance.hpp"
#include "athn/io.hpp"
#include "doctest.h"

using namespace athn;

namespace {

constexpr double kPi = 3.14159265358979323846;

GeoPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lat(-89.0, 89.0), lon(-179.0, 179.0);
  return {lat(rng), lon(rng)};
}

DistanceModel matrix_from(const std::vector<std::string>& ids,
                          const std::map<std::pair<std::string, std::string>, double>& km) {
  std::map<std::pair<std::string, std::string>, Leg> entries;
  for (const auto& a : ids) {
    for (const auto& b : ids) {
      if (a == b) continue;
      auto it = km.find({a, b});
      const double d = it == km.end() ? 1000.0 : it->second;
      entries[{a, b}] = {d, d / 80.0};
    }
  }
  return DistanceModel::from_matrix(entries);
}

}  // namespace

TEST_CASE("haversine reference distances") {
  const GeoPoint x{12.5, -40.25};
  CHECK(haversine_km(x, x) == 0.0);
  CHECK(std::abs(haversine_km({0, 0}, {0, 1}) - 111.195) < 0.01);
  CHECK(std::abs(haversine_km({0, 0}, {0, 1}) - 6371.0088 * kPi / 180.0) < 1e-9);
  CHECK(std::abs(haversine_km({0, 0}, {0, 180}) - 20015.1) < 0.1);
}

TEST_CASE("haversine is symmetric and obeys the triangle inequality") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const GeoPoint a = random_point(rng), b = random_point(rng), c = random_point(rng);
    CHECK(haversine_km(a, b) == doctest::Approx(haversine_km(b, a)));
    CHECK(haversine_km(a, c) <= haversine_km(a, b) + haversine_km(b, c) + 1e-6);
    CHECK(haversine_km(a, b) >= 0.0);
  }
}

TEST_CASE("invalid coordinates are rejected") {
  CHECK_FALSE(is_valid({91.0, 0.0}));
  CHECK_FALSE(is_valid({0.0, -180.5}));
  CHECK_FALSE(is_valid({std::numeric_limits<double>::quiet_NaN(), 0.0}));
  CHECK_THROWS_AS(validate({0.0, 200.0}), Error);
}

TEST_CASE("synthetic travel") {
  const auto model = DistanceModel::synthetic(1.3, 80.0);
  const Location a{"a", {10.0, 10.0}};
  // 100 km due north along a meridian
  const Location b{"b", {10.0 + 100.0 / (6371.0088 * kPi / 180.0), 10.0}};
  REQUIRE(haversine_km(a.point, b.point) == doctest::Approx(100.0));
  const Leg leg = model.travel(a, b);
  CHECK(leg.km == doctest::Approx(130.0));
  CHECK(leg.hours == doctest::Approx(1.625));
  CHECK(model.travel(a, a) == Leg{0.0, 0.0});
  CHECK(model.travel(a, b) == model.travel(a, b));
}

TEST_CASE("matrix travel") {
  const auto model = DistanceModel::from_matrix({{{"i", "j"}, {42.0, 0.7}}});
  const Location i{"i", {1, 1}}, j{"j", {2, 2}};
  CHECK(model.travel(i, j) == Leg{42.0, 0.7});
  CHECK(model.travel(j, j) == Leg{0.0, 0.0});
  try {
    model.travel(j, i);
    FAIL("expected MissingPair");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::missing_pair);
  }
  CHECK_THROWS_AS(DistanceModel::from_matrix({{{"i", "j"}, {1.0, 0.0}}}), Error);
  CHECK_THROWS_AS(DistanceModel::synthetic(0.9, 80.0), Error);
}

TEST_CASE("place_hubs returns the points when every point is its own stop") {
  std::vector<GeoPoint> pts{{30, -100}, {35, -90}, {40, -80}, {45, -110}, {33, -85}};
  std::vector<Hub> stops;
  for (std::size_t i = 0; i < pts.size(); ++i) stops.push_back({"S" + std::to_string(i), pts[i], {}});
  const auto hubs = place_hubs(pts, pts.size(), stops, 5);
  REQUIRE(hubs.size() == pts.size());
  std::set<std::string> ids;
  for (const auto& h : hubs) ids.insert(h.id);
  CHECK(ids.size() == pts.size());
}

TEST_CASE("place_hubs on two far-apart sites matches exhaustive 2-means") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> jitter(0.0, 0.3);
  std::vector<GeoPoint> pts;
  for (int i = 0; i < 5; ++i) pts.push_back({35.0 + jitter(rng), -100.0 + jitter(rng)});
  for (int i = 0; i < 5; ++i) pts.push_back({44.0 + jitter(rng), -78.0 + jitter(rng)});
  std::vector<Hub> stops;
  for (int i = 0; i < 40; ++i) {
    std::uniform_real_distribution<double> lat(30, 48), lon(-115, -70);
    stops.push_back({"S" + std::to_string(i), {lat(rng), lon(rng)}, {}});
  }

  // exhaustive 2-partition on the (lat, lon) plane
  double best = std::numeric_limits<double>::infinity();
  std::vector<GeoPoint> best_centres;
  for (unsigned mask = 1; mask < (1u << pts.size()) - 1; ++mask) {
    GeoPoint c[2] = {{0, 0}, {0, 0}};
    int n[2] = {0, 0};
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const int s = (mask >> i) & 1u;
      c[s].lat += pts[i].lat;
      c[s].lon += pts[i].lon;
      ++n[s];
    }
    for (int s = 0; s < 2; ++s) {
      c[s].lat /= n[s];
      c[s].lon /= n[s];
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const int s = (mask >> i) & 1u;
      sse += std::pow(pts[i].lat - c[s].lat, 2) + std::pow(pts[i].lon - c[s].lon, 2);
    }
    if (sse < best) {
      best = sse;
      best_centres = {c[0], c[1]};
    }
  }
  std::set<std::string> expected;
  for (const auto& c : best_centres) {
    const Hub* nearest = nullptr;
    for (const auto& s : stops) {
      if (!nearest || haversine_km(c, s.location) < haversine_km(c, nearest->location)) nearest = &s;
    }
    expected.insert(nearest->id);
  }

  const auto hubs = place_hubs(pts, 2, stops, 9);
  std::set<std::string> got;
  for (const auto& h : hubs) got.insert(h.id);
  CHECK(got == expected);
  CHECK(place_hubs(pts, 2, stops, 9) == hubs);
}

TEST_CASE("place_hubs rejects empty input and deduplicates snapped stops") {
  const std::vector<Hub> one_stop{{"S", {40, -90}, {}}};
  CHECK_THROWS_AS(place_hubs({}, 2, one_stop, 1), Error);
  CHECK_THROWS_AS(place_hubs({{40, -90}}, 2, {}, 1), Error);
  const auto hubs = place_hubs({{30, -100}, {45, -80}, {38, -95}}, 3, one_stop, 1);
  CHECK(hubs.size() == 1);
}

TEST_CASE("assign_hubs limiting cases match exhaustive search") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lat(30, 47), lon(-120, -75);
  const auto model = DistanceModel::synthetic();
  for (int trial = 0; trial < 200; ++trial) {
    const int nh = 2 + trial % 5;
    std::vector<Hub> hubs;
    for (int h = 0; h < nh; ++h) hubs.push_back({"H" + std::to_string(h), {lat(rng), lon(rng)}, {}});
    const Load load{"L", {lat(rng), lon(rng)}, {lat(rng), lon(rng)}, 0.0};
    const double gamma = trial % 3 == 0 ? 0.0 : (trial % 3 == 1 ? 1.0 : 0.4);
    const Location o{"L:origin", load.origin}, d{"L:dest", load.destination};
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nh; ++i) {
      for (int j = 0; j < nh; ++j) {
        if (i == j) continue;
        const Location hi{hubs[i].id, hubs[i].location}, hj{hubs[j].id, hubs[j].location};
        const double v = model.travel(o, hi).km + (1 - gamma) * model.travel(hi, hj).km + model.travel(hj, d).km;
        best = std::min(best, v);
      }
    }
    const HubPair got = assign_hubs(load, hubs, gamma, model);
    REQUIRE(got.origin_hub != got.destination_hub);
    const auto& hp = hubs[got.origin_hub];
    const auto& hm = hubs[got.destination_hub];
    const double v = model.travel(o, {hp.id, hp.location}).km +
                     (1 - gamma) * model.travel({hp.id, hp.location}, {hm.id, hm.location}).km +
                     model.travel({hm.id, hm.location}, d).km;
    CHECK(v == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("assign_hubs prefers a farther hub that lies in the load's direction") {
  const std::vector<std::string> ids{"A", "B", "C", "L:origin", "L:dest"};
  const auto model = matrix_from(ids, {{{"L:origin", "A"}, 5},
                                       {{"L:origin", "B"}, 10},
                                       {{"L:origin", "C"}, 60},
                                       {{"A", "L:dest"}, 60},
                                       {{"B", "L:dest"}, 60},
                                       {{"C", "L:dest"}, 5},
                                       {{"A", "B"}, 50},
                                       {{"B", "A"}, 50},
                                       {{"A", "C"}, 200},
                                       {{"C", "A"}, 200},
                                       {{"B", "C"}, 100},
                                       {{"C", "B"}, 100}});
  const std::vector<Hub> hubs{{"A", {1, 1}, {}}, {"B", {2, 2}, {}}, {"C", {3, 3}, {}}};
  const Load load{"L", {0, 0}, {4, 4}, 0.0};
  const HubPair got = assign_hubs(load, hubs, 0.4, model);
  CHECK(hubs[got.origin_hub].id == "B");
  CHECK(hubs[got.destination_hub].id == "C");
}

TEST_CASE("assign_hubs breaks ties by hub id") {
  const std::vector<Hub> hubs{{"H2", {40, -90}, {}}, {"H1", {40, -90.0000001}, {}}};
  const Load load{"L", {40, -90}, {40, -90.00000005}, 0.0};
  // both orders cost the same up to rounding in a matrix with equal entries
  const std::vector<std::string> ids{"H1", "H2", "L:origin", "L:dest"};
  const auto model = matrix_from(ids, {});
  const HubPair got = assign_hubs(load, hubs, 0.4, model);
  CHECK(hubs[got.origin_hub].id == "H1");
  CHECK(hubs[got.destination_hub].id == "H2");
  try {
    assign_hubs(load, {hubs[0]}, 0.4, model);
    FAIL("expected FewerThanTwoHubs");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::fewer_than_two_hubs);
  }
}

TEST_CASE("generator honours counts and is deterministic") {
  GeneratorConfig cfg;
  cfg.loads = 100;
  const Instance a = gen_synthetic(cfg, 42);
  CHECK(a.loads.size() == 100);
  CHECK_NOTHROW(a.validate());
  const Instance b = gen_synthetic(cfg, 42);
  CHECK(instance_to_json(a).dump() == instance_to_json(b).dump());
  const Instance c = gen_synthetic(cfg, 43);
  CHECK(instance_to_json(a).dump() != instance_to_json(c).dump());
}

TEST_CASE("generator weekend share") {
  GeneratorConfig cfg;
  cfg.loads = 200;
  cfg.days = 28;
  cfg.weekend_ratio = 0.2;
  std::size_t weekend = 0, total = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (const Load& l : gen_synthetic(cfg, seed).loads) {
      weekend += is_weekend_day(static_cast<int>(std::floor(l.release_hours / 24.0))) ? 1 : 0;
      ++total;
    }
  }
  const double share = static_cast<double>(weekend) / static_cast<double>(total);
  CHECK(std::abs(share - 0.2 * 2.0 / 7.0) <= 0.05);
}

TEST_CASE("generator rejects bad configs") {
  GeneratorConfig cfg;
  cfg.loads = -1;
  CHECK_THROWS_AS(gen_synthetic(cfg, 1), Error);
  cfg = {};
  cfg.lat_min = 50;
  cfg.lat_max = 40;
  CHECK_THROWS_AS(gen_synthetic(cfg, 1), Error);
}

TEST_CASE("instance files round trip") {
  GeneratorConfig cfg;
  cfg.loads = 30;
  Instance inst = gen_synthetic(cfg, 5);
  const auto path = std::filesystem::temp_directory_path() / "athn_roundtrip.json";
  save_instance(inst, path);
  CHECK(load_instance(path) == inst);

  inst.distance_model = DistanceModel::from_matrix({{{"a", "b"}, {1.5, 0.25}}});
  CHECK(instance_from_json(instance_to_json(inst)) == inst);
  std::filesystem::remove(path);
}

TEST_CASE("CSV readers report line and field") {
  std::istringstream loads(
      "id,origin_lat,origin_lon,dest_lat,dest_lon,release_hours\n"
      "L1,40,-90,41,-91,0\n"
      "L2,4x,-90,41,-91,3\n");
  try {
    read_loads_csv(loads, "loads.csv");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::parse_error);
    CHECK(std::string(e.what()).find("loads.csv:3 field 'origin_lat'") != std::string::npos);
  }

  std::istringstream header("id,lat\nS1,40\n");
  CHECK_THROWS_AS(read_truck_stops_csv(header, "stops.csv"), Error);

  std::istringstream stops("id,lat,lon\nS1,40,-90\n\nS2,41,-91\n");
  CHECK(read_truck_stops_csv(stops, "stops.csv").size() == 2);

  std::istringstream matrix("from_id,to_id,km,hours\na,b,42,0.7\n");
  const auto model = read_distance_matrix_csv(matrix, "m.csv");
  CHECK(model.travel({"a", {}}, {"b", {}}) == Leg{42, 0.7});

  std::istringstream regions("hub_id,region\nH1,West\nH2,East\n");
  const auto map = read_region_map_csv(regions, "r.csv");
  CHECK(map.at("H2") == "East");
}

TEST_CASE("instance validation") {
  GeneratorConfig cfg;
  cfg.loads = 5;
  Instance inst = gen_synthetic(cfg, 2);
  inst.hub_assignment[0].destination_hub = inst.hub_assignment[0].origin_hub;
  CHECK_THROWS_AS(inst.validate(), Error);
  inst = gen_synthetic(cfg, 2);
  inst.params.beta = 1.0;
  CHECK_THROWS_AS(inst.validate(), Error);
}
