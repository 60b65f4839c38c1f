#include "athn/instance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include "athn/error.hpp"

namespace athn {

bool is_valid(const GeoPoint& p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 && p.lat <= 90.0 &&
         p.lon >= -180.0 && p.lon <= 180.0;
}

void validate(const GeoPoint& p) {
  if (!is_valid(p)) {
    throw Error(Errc::invalid_argument,
                "coordinate out of range (" + std::to_string(p.lat) + ", " + std::to_string(p.lon) + ")");
  }
}

double haversine_km(const GeoPoint& a, const GeoPoint& b) {
  constexpr double to_rad = std::numbers::pi / 180.0;
  const double lat1 = a.lat * to_rad;
  const double lat2 = b.lat * to_rad;
  const double dlat = lat2 - lat1;
  const double dlon = (b.lon - a.lon) * to_rad;
  const double s = std::sin(dlat / 2.0);
  const double t = std::sin(dlon / 2.0);
  double h = s * s + std::cos(lat1) * std::cos(lat2) * t * t;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

std::string origin_location_id(const Load& load) { return load.id + ":origin"; }
std::string destination_location_id(const Load& load) { return load.id + ":dest"; }

DistanceModel DistanceModel::synthetic(double circuity, double speed_kmh) {
  if (!(circuity >= 1.0) || !std::isfinite(circuity)) {
    throw Error(Errc::invalid_argument, "circuity must be >= 1");
  }
  if (!(speed_kmh > 0.0) || !std::isfinite(speed_kmh)) {
    throw Error(Errc::invalid_argument, "speed_kmh must be > 0");
  }
  DistanceModel m;
  m.mode_ = Mode::synthetic;
  m.circuity_ = circuity;
  m.speed_kmh_ = speed_kmh;
  return m;
}

DistanceModel DistanceModel::from_matrix(std::map<std::pair<std::string, std::string>, Leg> entries) {
  for (const auto& [key, leg] : entries) {
    if (!(leg.km >= 0.0) || !std::isfinite(leg.km)) {
      throw Error(Errc::invalid_argument, "negative distance for " + key.first + " -> " + key.second);
    }
    if (key.first != key.second && (!(leg.hours > 0.0) || !std::isfinite(leg.hours))) {
      throw Error(Errc::invalid_argument, "non-positive duration for " + key.first + " -> " + key.second);
    }
  }
  DistanceModel m;
  m.mode_ = Mode::matrix;
  m.entries_ = std::move(entries);
  return m;
}

Leg DistanceModel::travel(const Location& from, const Location& to) const {
  if (from.id == to.id) return {};
  if (mode_ == Mode::synthetic) {
    const double km = haversine_km(from.point, to.point) * circuity_;
    return {km, km / speed_kmh_};
  }
  auto it = entries_.find({from.id, to.id});
  if (it == entries_.end()) {
    throw Error(Errc::missing_pair, from.id + " -> " + to.id);
  }
  return it->second;
}

void CostParams::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw Error(Errc::invalid_argument, what);
  };
  check(alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
  check(beta >= 0.0 && beta < 1.0, "beta must lie in [0, 1)");
  check(gamma >= 0.0 && gamma <= 1.0, "gamma must lie in [0, 1]");
  check(delta_hours >= 0.0 && std::isfinite(delta_hours), "delta_hours must be >= 0");
  check(service_hours >= 0.0 && std::isfinite(service_hours), "service_hours must be >= 0");
  check(max_trucks >= 0, "max_trucks must be >= 0");
}

Location Instance::hub_location(std::size_t hub) const { return {hubs[hub].id, hubs[hub].location}; }

Location Instance::origin_location(std::size_t load) const {
  return {origin_location_id(loads[load]), loads[load].origin};
}

Location Instance::destination_location(std::size_t load) const {
  return {destination_location_id(loads[load]), loads[load].destination};
}

std::optional<std::size_t> Instance::find_hub(const std::string& id) const {
  for (std::size_t i = 0; i < hubs.size(); ++i) {
    if (hubs[i].id == id) return i;
  }
  return std::nullopt;
}

void Instance::validate() const {
  params.validate();
  std::set<std::string> ids;
  for (const auto& load : loads) {
    athn::validate(load.origin);
    athn::validate(load.destination);
    if (!ids.insert(load.id).second) throw Error(Errc::invalid_argument, "duplicate load id " + load.id);
    if (load.origin == load.destination) {
      throw Error(Errc::invalid_argument, "load " + load.id + " has identical origin and destination");
    }
    if (!(load.release_hours >= 0.0) || !std::isfinite(load.release_hours)) {
      throw Error(Errc::invalid_argument, "load " + load.id + " has a negative release time");
    }
  }
  std::set<std::string> hub_ids;
  for (const auto& hub : hubs) {
    athn::validate(hub.location);
    if (!hub_ids.insert(hub.id).second) throw Error(Errc::invalid_argument, "duplicate hub id " + hub.id);
  }
  if (hub_assignment.size() != loads.size()) {
    throw Error(Errc::invalid_argument, "hub assignment does not cover every load");
  }
  for (std::size_t l = 0; l < loads.size(); ++l) {
    const auto& pair = hub_assignment[l];
    if (pair.origin_hub >= hubs.size() || pair.destination_hub >= hubs.size()) {
      throw Error(Errc::invalid_argument, "load " + loads[l].id + " refers to an unknown hub");
    }
    if (pair.origin_hub == pair.destination_hub) {
      throw Error(Errc::invalid_argument, "load " + loads[l].id + " has h+ == h-");
    }
  }
}

namespace {

double squared_planar(const GeoPoint& a, const GeoPoint& b) {
  const double dlat = a.lat - b.lat;
  const double dlon = a.lon - b.lon;
  return dlat * dlat + dlon * dlon;
}

std::size_t nearest_center(const GeoPoint& p, const std::vector<GeoPoint>& centers) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centers.size(); ++c) {
    const double d = squared_planar(p, centers[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

}  // namespace

std::vector<GeoPoint> kmeans_centroids(const std::vector<GeoPoint>& points, std::size_t k,
                                       std::uint64_t seed, const KMeansSettings& settings) {
  if (points.empty()) throw Error(Errc::empty_input, "no points to cluster");
  if (k == 0) throw Error(Errc::invalid_argument, "k must be >= 1");
  k = std::min(k, points.size());

  std::mt19937_64 rng(seed);
  std::vector<GeoPoint> centers;
  centers.reserve(k);
  std::uniform_int_distribution<std::size_t> pick(0, points.size() - 1);
  centers.push_back(points[pick(rng)]);

  // k-means++ seeding
  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) d2[i] = squared_planar(points[i], centers[0]);
  while (centers.size() < k) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      chosen = points.size() - 1;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (d2[i] <= 0.0) continue;
        target -= d2[i];
        if (target < 0.0) {
          chosen = i;
          break;
        }
      }
      while (d2[chosen] <= 0.0 && chosen > 0) --chosen;
    } else {
      chosen = pick(rng);
    }
    centers.push_back(points[chosen]);
    for (std::size_t i = 0; i < points.size(); ++i) {
      d2[i] = std::min(d2[i], squared_planar(points[i], centers.back()));
    }
  }

  // Lloyd iterations
  double previous_inertia = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> label(points.size());
  for (int iter = 0; iter < settings.max_iterations; ++iter) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      label[i] = nearest_center(points[i], centers);
      inertia += squared_planar(points[i], centers[label[i]]);
    }
    std::vector<double> sum_lat(k, 0.0), sum_lon(k, 0.0);
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      sum_lat[label[i]] += points[i].lat;
      sum_lon[label[i]] += points[i].lon;
      ++count[label[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] == 0) continue;  // empty cluster keeps its center
      centers[c] = {sum_lat[c] / static_cast<double>(count[c]), sum_lon[c] / static_cast<double>(count[c])};
    }
    if (std::isfinite(previous_inertia) &&
        std::abs(previous_inertia - inertia) <= settings.relative_tolerance * previous_inertia) {
      break;
    }
    previous_inertia = inertia;
  }
  return centers;
}

std::vector<Hub> place_hubs(const std::vector<GeoPoint>& points, std::size_t k,
                            const std::vector<Hub>& truck_stops, std::uint64_t seed,
                            const KMeansSettings& settings) {
  if (points.empty()) throw Error(Errc::empty_input, "no points to place hubs on");
  if (truck_stops.empty()) throw Error(Errc::empty_input, "no truck stops");
  for (const auto& p : points) validate(p);
  for (const auto& s : truck_stops) validate(s.location);

  const auto centers = kmeans_centroids(points, k, seed, settings);
  std::vector<Hub> hubs;
  std::set<std::size_t> taken;
  for (const auto& c : centers) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < truck_stops.size(); ++s) {
      const double d = haversine_km(c, truck_stops[s].location);
      if (d < best_d) {
        best_d = d;
        best = s;
      }
    }
    if (taken.insert(best).second) hubs.push_back(truck_stops[best]);
  }
  return hubs;
}

HubPair assign_hubs(const Load& load, const std::vector<Hub>& hubs, double gamma,
                    const DistanceModel& model) {
  if (hubs.size() < 2) throw Error(Errc::fewer_than_two_hubs, "load " + load.id);

  std::vector<std::size_t> order(hubs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return hubs[a].id < hubs[b].id; });

  const Location origin{origin_location_id(load), load.origin};
  const Location dest{destination_location_id(load), load.destination};
  std::vector<double> first(hubs.size()), last(hubs.size());
  for (std::size_t h = 0; h < hubs.size(); ++h) {
    const Location hub{hubs[h].id, hubs[h].location};
    first[h] = model.travel(origin, hub).km;
    last[h] = model.travel(hub, dest).km;
  }

  HubPair best;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::size_t hp : order) {
    const Location from{hubs[hp].id, hubs[hp].location};
    for (std::size_t hm : order) {
      if (hp == hm) continue;
      const Location to{hubs[hm].id, hubs[hm].location};
      const double value = first[hp] + (1.0 - gamma) * model.travel(from, to).km + last[hm];
      if (value < best_value) {
        best_value = value;
        best = {hp, hm};
      }
    }
  }
  return best;
}

void assign_all_hubs(Instance& instance) {
  instance.hub_assignment.clear();
  instance.hub_assignment.reserve(instance.loads.size());
  for (const auto& load : instance.loads) {
    instance.hub_assignment.push_back(
        assign_hubs(load, instance.hubs, instance.params.gamma, instance.distance_model));
  }
}

void GeneratorConfig::validate() const {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw Error(Errc::invalid_argument, what);
  };
  check(loads >= 0, "loads must be >= 0");
  check(clusters >= 1, "clusters must be >= 1");
  check(days >= 1, "days must be >= 1");
  check(weekend_ratio >= 0.0 && std::isfinite(weekend_ratio), "weekend_ratio must be >= 0");
  check(cluster_sigma_km >= 0.0, "cluster_sigma_km must be >= 0");
  check(hubs >= 2, "hubs must be >= 2");
  check(truck_stops >= 2, "truck_stops must be >= 2");
  check(design_samples >= 0, "design_samples must be >= 0");
  check(regions >= 1, "regions must be >= 1");
  check(lat_min < lat_max && lat_min >= -90.0 && lat_max <= 90.0, "invalid latitude range");
  check(lon_min < lon_max && lon_min >= -180.0 && lon_max <= 180.0, "invalid longitude range");
  // weekdays carry unit weight; an all-weekend horizon needs a positive ratio
  check(weekend_ratio > 0.0 || days > 2 || !is_weekend_day(0), "no day can receive loads");
  params.validate();
  DistanceModel::synthetic(circuity, speed_kmh);
}

bool is_weekend_day(int day) { return day % 7 == 5 || day % 7 == 6; }

namespace {

class PointSampler {
 public:
  PointSampler(const GeneratorConfig& config, std::mt19937_64& rng) : config_(config), rng_(rng) {
    std::uniform_real_distribution<double> lat(config.lat_min, config.lat_max);
    std::uniform_real_distribution<double> lon(config.lon_min, config.lon_max);
    for (int c = 0; c < config.clusters; ++c) centers_.push_back({lat(rng_), lon(rng_)});
  }

  GeoPoint around(std::size_t cluster, double sigma_scale = 1.0) {
    const auto& c = centers_[cluster];
    const double km_per_deg = kEarthRadiusKm * std::numbers::pi / 180.0;
    const double sigma_lat = config_.cluster_sigma_km * sigma_scale / km_per_deg;
    const double sigma_lon = sigma_lat / std::max(0.1, std::cos(c.lat * std::numbers::pi / 180.0));
    std::normal_distribution<double> n(0.0, 1.0);
    GeoPoint p{c.lat + sigma_lat * n(rng_), c.lon + sigma_lon * n(rng_)};
    p.lat = std::clamp(p.lat, -90.0, 90.0);
    p.lon = std::clamp(p.lon, -180.0, 180.0);
    return p;
  }

  std::size_t random_cluster() {
    std::uniform_int_distribution<std::size_t> d(0, centers_.size() - 1);
    return d(rng_);
  }

  std::pair<GeoPoint, GeoPoint> od_pair() {
    const std::size_t oc = random_cluster();
    std::size_t dc = random_cluster();
    while (centers_.size() > 1 && dc == oc) dc = random_cluster();
    GeoPoint o = around(oc);
    GeoPoint d = around(dc);
    while (o == d) d = around(dc);
    return {o, d};
  }

 private:
  const GeneratorConfig& config_;
  std::mt19937_64& rng_;
  std::vector<GeoPoint> centers_;
};

}  // namespace

Instance gen_synthetic(const GeneratorConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  PointSampler sampler(config, rng);

  std::vector<double> day_weight(static_cast<std::size_t>(config.days));
  for (int d = 0; d < config.days; ++d) day_weight[d] = is_weekend_day(d) ? config.weekend_ratio : 1.0;
  std::discrete_distribution<int> day_of(day_weight.begin(), day_weight.end());
  std::uniform_real_distribution<double> hour_of(0.0, 24.0);

  Instance instance;
  instance.params = config.params;
  instance.distance_model = DistanceModel::synthetic(config.circuity, config.speed_kmh);

  std::vector<Load> loads;
  loads.reserve(static_cast<std::size_t>(config.loads));
  for (int i = 0; i < config.loads; ++i) {
    auto [o, d] = sampler.od_pair();
    const int day = day_of(rng);
    loads.push_back({"", o, d, 24.0 * day + hour_of(rng)});
  }
  std::stable_sort(loads.begin(), loads.end(),
                   [](const Load& a, const Load& b) { return a.release_hours < b.release_hours; });
  for (std::size_t i = 0; i < loads.size(); ++i) loads[i].id = "L" + std::to_string(i + 1);
  instance.loads = std::move(loads);

  std::vector<Hub> stops;
  for (int s = 0; s < config.truck_stops; ++s) {
    stops.push_back({"S" + std::to_string(s + 1), sampler.around(sampler.random_cluster(), 2.0), std::nullopt});
  }

  const int samples = config.design_samples > 0 ? config.design_samples : 3 * config.loads;
  std::vector<GeoPoint> design;
  for (int i = 0; i < std::max(samples, 1); ++i) {
    auto [o, d] = sampler.od_pair();
    design.push_back(o);
    design.push_back(d);
  }
  const std::uint64_t hub_seed = rng();
  const std::uint64_t region_seed = rng();
  instance.hubs = place_hubs(design, static_cast<std::size_t>(config.hubs), stops, hub_seed);
  if (instance.hubs.size() < 2) {
    throw Error(Errc::fewer_than_two_hubs, "hub placement collapsed onto fewer than two truck stops");
  }

  std::vector<GeoPoint> hub_points;
  for (const auto& h : instance.hubs) hub_points.push_back(h.location);
  const auto region_centers =
      kmeans_centroids(hub_points, static_cast<std::size_t>(config.regions), region_seed);
  for (auto& h : instance.hubs) {
    h.region = "R" + std::to_string(nearest_center(h.location, region_centers) + 1);
  }

  assign_all_hubs(instance);
  return instance;
}

}  // namespace athn
