#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "athn/instance.hpp"
#include "json.hpp"

namespace athn {

// Instance documents
nlohmann::json instance_to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& doc);
void save_instance(const Instance& instance, const std::filesystem::path& path);
Instance load_instance(const std::filesystem::path& path);

GeneratorConfig generator_config_from_json(const nlohmann::json& doc);
nlohmann::json generator_config_to_json(const GeneratorConfig& config);

// CSV ingestion. Every reader names the offending line and column on error.
std::vector<Load> read_loads_csv(std::istream& in, const std::string& source = "<loads>");
std::vector<Hub> read_truck_stops_csv(std::istream& in, const std::string& source = "<stops>");
DistanceModel read_distance_matrix_csv(std::istream& in, const std::string& source = "<matrix>");
std::map<std::string, std::string> read_region_map_csv(std::istream& in,
                                                       const std::string& source = "<regions>");

std::vector<Load> read_loads_csv(const std::filesystem::path& path);
std::vector<Hub> read_truck_stops_csv(const std::filesystem::path& path);
DistanceModel read_distance_matrix_csv(const std::filesystem::path& path);
std::map<std::string, std::string> read_region_map_csv(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace athn
