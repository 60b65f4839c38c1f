#include "athn/io.hpp"

#include <fstream>
#include <sstream>

#include "athn/error.hpp"

namespace athn {

using nlohmann::json;

namespace {

constexpr const char* kInstanceFormat = "athn-instance";
constexpr int kInstanceVersion = 1;

template <typename T>
T field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(Errc::parse_error, where + ": missing field '" + key + "'");
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(Errc::parse_error, where + ": field '" + key + "' has the wrong type");
  }
}

template <typename T>
T field_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return field<T>(obj, key, where);
}

json params_to_json(const CostParams& p) {
  return {{"alpha", p.alpha},
          {"beta", p.beta},
          {"gamma", p.gamma},
          {"delta_hours", p.delta_hours},
          {"service_hours", p.service_hours},
          {"max_trucks", p.max_trucks}};
}

CostParams params_from_json(const json& obj, const std::string& where, CostParams p = {}) {
  p.alpha = field_or(obj, "alpha", p.alpha, where);
  p.beta = field_or(obj, "beta", p.beta, where);
  p.gamma = field_or(obj, "gamma", p.gamma, where);
  p.delta_hours = field_or(obj, "delta_hours", p.delta_hours, where);
  p.service_hours = field_or(obj, "service_hours", p.service_hours, where);
  p.max_trucks = field_or(obj, "max_trucks", p.max_trucks, where);
  return p;
}

// Minimal CSV splitting: comma separated, surrounding whitespace and double
// quotes stripped. Embedded commas inside quotes are not supported.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    auto b = cell.find_first_not_of(" \t\r");
    auto e = cell.find_last_not_of(" \t\r");
    cell = b == std::string::npos ? std::string() : cell.substr(b, e - b + 1);
    if (cell.size() >= 2 && cell.front() == '"' && cell.back() == '"') cell = cell.substr(1, cell.size() - 2);
    out.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

class CsvReader {
 public:
  CsvReader(std::istream& in, std::string source, std::vector<std::string> header)
      : in_(in), source_(std::move(source)), header_(std::move(header)) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (is_blank(line)) continue;
      auto cells = split_csv(line);
      if (!cells.empty() && cells[0].rfind("\xEF\xBB\xBF", 0) == 0) cells[0] = cells[0].substr(3);
      if (cells != header_) {
        std::string expected;
        for (std::size_t i = 0; i < header_.size(); ++i) expected += (i ? "," : "") + header_[i];
        throw Error(Errc::parse_error, where() + ": expected header '" + expected + "'");
      }
      return;
    }
    throw Error(Errc::parse_error, source_ + ": empty file");
  }

  bool next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (is_blank(line)) continue;
      cells_ = split_csv(line);
      if (cells_.size() != header_.size()) {
        throw Error(Errc::parse_error, where() + ": expected " + std::to_string(header_.size()) +
                                           " fields, found " + std::to_string(cells_.size()));
      }
      return true;
    }
    return false;
  }

  const std::string& text(std::size_t col) const {
    if (cells_[col].empty()) throw Error(Errc::parse_error, where(col) + ": empty value");
    return cells_[col];
  }

  double number(std::size_t col) const {
    const std::string& s = text(col);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size()) throw Error(Errc::parse_error, where(col) + ": '" + s + "' is not a number");
    return v;
  }

  std::string where(std::optional<std::size_t> col = std::nullopt) const {
    std::string w = source_ + ":" + std::to_string(line_no_);
    if (col) w += " field '" + header_[*col] + "'";
    return w;
  }

 private:
  static bool is_blank(const std::string& line) {
    return line.find_first_not_of(" \t\r") == std::string::npos;
  }

  std::istream& in_;
  std::string source_;
  std::vector<std::string> header_;
  std::vector<std::string> cells_;
  std::size_t line_no_ = 0;
};

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::parse_error, "cannot open " + path.string());
  return in;
}

GeoPoint checked_point(const CsvReader& r, std::size_t lat_col, std::size_t lon_col) {
  GeoPoint p{r.number(lat_col), r.number(lon_col)};
  if (!is_valid(p)) throw Error(Errc::parse_error, r.where(lat_col) + ": coordinate out of range");
  return p;
}

}  // namespace

json instance_to_json(const Instance& instance) {
  json doc;
  doc["format"] = kInstanceFormat;
  doc["version"] = kInstanceVersion;
  doc["params"] = params_to_json(instance.params);

  const auto& model = instance.distance_model;
  if (model.mode() == DistanceModel::Mode::synthetic) {
    doc["distance_model"] = {{"mode", "synthetic"}, {"circuity", model.circuity()}, {"speed_kmh", model.speed_kmh()}};
  } else {
    json entries = json::array();
    for (const auto& [key, leg] : model.entries()) entries.push_back({key.first, key.second, leg.km, leg.hours});
    doc["distance_model"] = {{"mode", "matrix"}, {"entries", entries}};
  }

  json hubs = json::array();
  for (const auto& h : instance.hubs) {
    json j = {{"id", h.id}, {"lat", h.location.lat}, {"lon", h.location.lon}};
    if (h.region) j["region"] = *h.region;
    hubs.push_back(j);
  }
  doc["hubs"] = hubs;

  json loads = json::array();
  for (std::size_t l = 0; l < instance.loads.size(); ++l) {
    const auto& load = instance.loads[l];
    json j = {{"id", load.id},
              {"origin_lat", load.origin.lat},
              {"origin_lon", load.origin.lon},
              {"dest_lat", load.destination.lat},
              {"dest_lon", load.destination.lon},
              {"release_hours", load.release_hours}};
    if (l < instance.hub_assignment.size()) {
      j["h_plus"] = instance.hubs.at(instance.hub_assignment[l].origin_hub).id;
      j["h_minus"] = instance.hubs.at(instance.hub_assignment[l].destination_hub).id;
    }
    loads.push_back(j);
  }
  doc["loads"] = loads;
  return doc;
}

Instance instance_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(Errc::parse_error, "instance: document is not an object");
  if (field_or<std::string>(doc, "format", kInstanceFormat, "instance") != kInstanceFormat) {
    throw Error(Errc::parse_error, "instance: unexpected format tag");
  }
  Instance instance;
  if (doc.contains("params")) instance.params = params_from_json(doc["params"], "instance.params");

  if (doc.contains("distance_model")) {
    const auto& dm = doc["distance_model"];
    const auto mode = field<std::string>(dm, "mode", "instance.distance_model");
    if (mode == "synthetic") {
      instance.distance_model = DistanceModel::synthetic(field_or(dm, "circuity", 1.3, "instance.distance_model"),
                                                         field_or(dm, "speed_kmh", 80.0, "instance.distance_model"));
    } else if (mode == "matrix") {
      std::map<std::pair<std::string, std::string>, Leg> entries;
      const auto& list = dm.contains("entries") ? dm["entries"] : json::array();
      for (std::size_t i = 0; i < list.size(); ++i) {
        const auto& e = list[i];
        const std::string where = "instance.distance_model.entries[" + std::to_string(i) + "]";
        if (!e.is_array() || e.size() != 4) throw Error(Errc::parse_error, where + ": expected [from, to, km, hours]");
        try {
          entries[{e[0].get<std::string>(), e[1].get<std::string>()}] = {e[2].get<double>(), e[3].get<double>()};
        } catch (const json::exception&) {
          throw Error(Errc::parse_error, where + ": wrong value types");
        }
      }
      instance.distance_model = DistanceModel::from_matrix(std::move(entries));
    } else {
      throw Error(Errc::parse_error, "instance.distance_model: unknown mode '" + mode + "'");
    }
  }

  const json empty = json::array();
  const auto& hubs = doc.contains("hubs") ? doc["hubs"] : empty;
  for (std::size_t i = 0; i < hubs.size(); ++i) {
    const std::string where = "instance.hubs[" + std::to_string(i) + "]";
    Hub h{field<std::string>(hubs[i], "id", where),
          {field<double>(hubs[i], "lat", where), field<double>(hubs[i], "lon", where)},
          std::nullopt};
    if (hubs[i].contains("region")) h.region = field<std::string>(hubs[i], "region", where);
    instance.hubs.push_back(std::move(h));
  }

  const auto& loads = doc.contains("loads") ? doc["loads"] : empty;
  bool any_assignment = false;
  for (std::size_t i = 0; i < loads.size(); ++i) {
    const std::string where = "instance.loads[" + std::to_string(i) + "]";
    const auto& j = loads[i];
    instance.loads.push_back({field<std::string>(j, "id", where),
                              {field<double>(j, "origin_lat", where), field<double>(j, "origin_lon", where)},
                              {field<double>(j, "dest_lat", where), field<double>(j, "dest_lon", where)},
                              field<double>(j, "release_hours", where)});
    if (j.contains("h_plus") || j.contains("h_minus")) {
      any_assignment = true;
      auto hp = instance.find_hub(field<std::string>(j, "h_plus", where));
      auto hm = instance.find_hub(field<std::string>(j, "h_minus", where));
      if (!hp || !hm) throw Error(Errc::parse_error, where + ": assigned hub does not exist");
      instance.hub_assignment.push_back({*hp, *hm});
    } else if (any_assignment) {
      throw Error(Errc::parse_error, where + ": missing hub assignment");
    }
  }
  if (any_assignment && instance.hub_assignment.size() != instance.loads.size()) {
    throw Error(Errc::parse_error, "instance: hub assignment missing for some loads");
  }
  return instance;
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
  write_text_file(path, instance_to_json(instance).dump(2) + "\n");
}

Instance load_instance(const std::filesystem::path& path) { return instance_from_json(read_json_file(path)); }

GeneratorConfig generator_config_from_json(const json& doc) {
  const std::string w = "config";
  GeneratorConfig c;
  c.loads = field_or(doc, "loads", c.loads, w);
  c.clusters = field_or(doc, "clusters", c.clusters, w);
  c.days = field_or(doc, "days", c.days, w);
  c.weekend_ratio = field_or(doc, "weekend_ratio", c.weekend_ratio, w);
  c.cluster_sigma_km = field_or(doc, "cluster_sigma_km", c.cluster_sigma_km, w);
  c.hubs = field_or(doc, "hubs", c.hubs, w);
  c.truck_stops = field_or(doc, "truck_stops", c.truck_stops, w);
  c.design_samples = field_or(doc, "design_samples", c.design_samples, w);
  c.regions = field_or(doc, "regions", c.regions, w);
  c.lat_min = field_or(doc, "lat_min", c.lat_min, w);
  c.lat_max = field_or(doc, "lat_max", c.lat_max, w);
  c.lon_min = field_or(doc, "lon_min", c.lon_min, w);
  c.lon_max = field_or(doc, "lon_max", c.lon_max, w);
  c.circuity = field_or(doc, "circuity", c.circuity, w);
  c.speed_kmh = field_or(doc, "speed_kmh", c.speed_kmh, w);
  if (doc.contains("params")) c.params = params_from_json(doc["params"], "config.params", c.params);
  return c;
}

json generator_config_to_json(const GeneratorConfig& c) {
  return {{"loads", c.loads},
          {"clusters", c.clusters},
          {"days", c.days},
          {"weekend_ratio", c.weekend_ratio},
          {"cluster_sigma_km", c.cluster_sigma_km},
          {"hubs", c.hubs},
          {"truck_stops", c.truck_stops},
          {"design_samples", c.design_samples},
          {"regions", c.regions},
          {"lat_min", c.lat_min},
          {"lat_max", c.lat_max},
          {"lon_min", c.lon_min},
          {"lon_max", c.lon_max},
          {"circuity", c.circuity},
          {"speed_kmh", c.speed_kmh},
          {"params", params_to_json(c.params)}};
}

std::vector<Load> read_loads_csv(std::istream& in, const std::string& source) {
  CsvReader r(in, source, {"id", "origin_lat", "origin_lon", "dest_lat", "dest_lon", "release_hours"});
  std::vector<Load> loads;
  while (r.next()) {
    Load l{r.text(0), checked_point(r, 1, 2), checked_point(r, 3, 4), r.number(5)};
    if (l.release_hours < 0.0) throw Error(Errc::parse_error, r.where(5) + ": release time must be >= 0");
    if (l.origin == l.destination) throw Error(Errc::parse_error, r.where() + ": origin equals destination");
    for (const auto& other : loads) {
      if (other.id == l.id) throw Error(Errc::parse_error, r.where(0) + ": duplicate load id '" + l.id + "'");
    }
    loads.push_back(std::move(l));
  }
  return loads;
}

std::vector<Hub> read_truck_stops_csv(std::istream& in, const std::string& source) {
  CsvReader r(in, source, {"id", "lat", "lon"});
  std::vector<Hub> stops;
  while (r.next()) stops.push_back({r.text(0), checked_point(r, 1, 2), std::nullopt});
  return stops;
}

DistanceModel read_distance_matrix_csv(std::istream& in, const std::string& source) {
  CsvReader r(in, source, {"from_id", "to_id", "km", "hours"});
  std::map<std::pair<std::string, std::string>, Leg> entries;
  while (r.next()) {
    Leg leg{r.number(2), r.number(3)};
    if (leg.km < 0.0) throw Error(Errc::parse_error, r.where(2) + ": distance must be >= 0");
    if (r.text(0) != r.text(1) && leg.hours <= 0.0) {
      throw Error(Errc::parse_error, r.where(3) + ": travel time must be > 0");
    }
    entries[{r.text(0), r.text(1)}] = leg;
  }
  return DistanceModel::from_matrix(std::move(entries));
}

std::map<std::string, std::string> read_region_map_csv(std::istream& in, const std::string& source) {
  CsvReader r(in, source, {"hub_id", "region"});
  std::map<std::string, std::string> regions;
  while (r.next()) regions[r.text(0)] = r.text(1);
  return regions;
}

std::vector<Load> read_loads_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_loads_csv(in, path.string());
}

std::vector<Hub> read_truck_stops_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_truck_stops_csv(in, path.string());
}

DistanceModel read_distance_matrix_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_distance_matrix_csv(in, path.string());
}

std::map<std::string, std::string> read_region_map_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_region_map_csv(in, path.string());
}

json read_json_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::invalid_argument, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(Errc::invalid_argument, "failed writing " + path.string());
}

}  // namespace athn
