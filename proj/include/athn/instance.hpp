#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "athn/geo.hpp"

namespace athn {

struct Load {
  std::string id;
  GeoPoint origin;
  GeoPoint destination;
  double release_hours = 0.0;  // r(l), hours since horizon start

  bool operator==(const Load&) const = default;
};

struct Hub {
  std::string id;
  GeoPoint location;
  std::optional<std::string> region;

  bool operator==(const Hub&) const = default;
};

// A location the distance model can be queried for. The id is what matrix
// files key on: hub ids verbatim, "<load>:origin" and "<load>:dest" for load
// endpoints.
struct Location {
  std::string id;
  GeoPoint point;
};

std::string origin_location_id(const Load& load);
std::string destination_location_id(const Load& load);

struct Leg {
  double km = 0.0;
  double hours = 0.0;

  bool operator==(const Leg&) const = default;
};

class DistanceModel {
 public:
  enum class Mode { synthetic, matrix };

  static DistanceModel synthetic(double circuity = 1.3, double speed_kmh = 80.0);
  static DistanceModel from_matrix(std::map<std::pair<std::string, std::string>, Leg> entries);

  Mode mode() const { return mode_; }
  double circuity() const { return circuity_; }
  double speed_kmh() const { return speed_kmh_; }
  const std::map<std::pair<std::string, std::string>, Leg>& entries() const { return entries_; }

  // (0, 0) for identical ids. Matrix mode throws Errc::missing_pair when the
  // ordered pair is absent.
  Leg travel(const Location& from, const Location& to) const;

  bool operator==(const DistanceModel&) const = default;

 private:
  Mode mode_ = Mode::synthetic;
  double circuity_ = 1.3;
  double speed_kmh_ = 80.0;
  std::map<std::pair<std::string, std::string>, Leg> entries_;
};

struct CostParams {
  double alpha = 0.25;         // autonomous mileage discount
  double beta = 0.25;          // first/last-mile inefficiency, < 1
  double gamma = 0.40;         // hub-assignment discount
  double delta_hours = 1.0;    // pickup flexibility
  double service_hours = 0.5;  // loading or unloading time
  int max_trucks = 100;

  void validate() const;
  bool operator==(const CostParams&) const = default;
};

struct HubPair {
  std::size_t origin_hub = 0;       // index into Instance::hubs (h+)
  std::size_t destination_hub = 0;  // index into Instance::hubs (h-)

  bool operator==(const HubPair&) const = default;
};

struct Instance {
  std::vector<Load> loads;
  std::vector<Hub> hubs;
  std::vector<HubPair> hub_assignment;  // parallel to loads
  DistanceModel distance_model;
  CostParams params;

  Location hub_location(std::size_t hub) const;
  Location origin_location(std::size_t load) const;
  Location destination_location(std::size_t load) const;
  std::optional<std::size_t> find_hub(const std::string& id) const;

  // Checks every structural invariant; throws athn::Error on the first breach.
  void validate() const;

  bool operator==(const Instance&) const = default;
};

// Places hubs: k-means++ seeded Lloyd iterations on the (lat, lon) plane,
// then each centroid snapped to its haversine-nearest truck stop. Stops
// picked twice are kept once, in first-occurrence order.
struct KMeansSettings {
  int max_iterations = 100;
  double relative_tolerance = 1e-6;
};

std::vector<GeoPoint> kmeans_centroids(const std::vector<GeoPoint>& points, std::size_t k,
                                       std::uint64_t seed, const KMeansSettings& settings = {});

std::vector<Hub> place_hubs(const std::vector<GeoPoint>& points, std::size_t k,
                            const std::vector<Hub>& truck_stops, std::uint64_t seed,
                            const KMeansSettings& settings = {});

// Ordered hub pair minimising c(o,h+) + (1 - gamma) c(h+,h-) + c(h-,d), ties by
// (h+ id, h- id).
HubPair assign_hubs(const Load& load, const std::vector<Hub>& hubs, double gamma,
                    const DistanceModel& model);

void assign_all_hubs(Instance& instance);

struct GeneratorConfig {
  int loads = 100;
  int clusters = 5;
  int days = 28;
  double weekend_ratio = 0.2;
  double cluster_sigma_km = 60.0;
  int hubs = 10;
  int truck_stops = 200;
  // Size of the sample the hubs are clustered on; 0 means three times the
  // number of loads.
  int design_samples = 0;
  int regions = 4;
  double lat_min = 30.0;
  double lat_max = 47.0;
  double lon_min = -120.0;
  double lon_max = -75.0;
  double circuity = 1.3;
  double speed_kmh = 80.0;
  CostParams params;

  void validate() const;
};

bool is_weekend_day(int day);

Instance gen_synthetic(const GeneratorConfig& config, std::uint64_t seed);

}  // namespace athn
