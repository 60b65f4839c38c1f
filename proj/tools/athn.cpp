#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "athn/decompose.hpp"
#include "athn/error.hpp"
#include "athn/format.hpp"
#include "athn/io.hpp"
#include "athn/report.hpp"
#include "athn/solver.hpp"

#ifndef ATHN_VERSION
#define ATHN_VERSION "0.0.0"
#endif
#ifndef ATHN_BUILD_HASH
#define ATHN_BUILD_HASH "unknown"
#endif

namespace {

using namespace athn;

constexpr int kExitInput = 2;
constexpr int kExitLimit = 3;
constexpr int kExitInternal = 4;

struct LimitFlags {
  double time_limit = std::numeric_limits<double>::infinity();
  std::size_t node_limit = std::numeric_limits<std::size_t>::max();
  double gap = 0.0;
  bool mip_start = false;
  int threads = 1;
  bool log = false;

  void add(CLI::App* cmd) {
    cmd->add_option("--time-limit", time_limit, "Wall-clock limit per solve in seconds");
    cmd->add_option("--node-limit", node_limit, "Branch-and-bound node limit per solve");
    cmd->add_option("--gap", gap, "Stop once the relative gap (fraction) drops to this value")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--mip-start", mip_start, "Seed the search with the zero-flexibility schedule");
    cmd->add_option("--threads", threads, "Solver worker threads; 1 is deterministic")->check(CLI::PositiveNumber);
    cmd->add_flag("--log", log, "Print node=.. lb=.. ub=.. gap=.. progress lines to stderr");
  }

  SolverLimits limits() const {
    SolverLimits l;
    l.time_limit_seconds = time_limit;
    l.node_limit = node_limit;
    l.relative_gap = gap;
    l.mip_start = mip_start;
    l.threads = threads;
    if (log) l.log = &std::cerr;
    return l;
  }
};

struct ParamFlags {
  std::optional<int> trucks;
  std::optional<double> delta;
  std::optional<double> service;
  std::optional<double> alpha;
  std::optional<double> beta;

  void add(CLI::App* cmd) {
    cmd->add_option("--trucks", trucks, "Autonomous fleet size K");
    cmd->add_option("--delta", delta, "Pickup flexibility in hours");
    cmd->add_option("--service", service, "Loading/unloading time in hours");
    cmd->add_option("--alpha", alpha, "Autonomous mileage discount");
    cmd->add_option("--beta", beta, "First/last-mile inefficiency");
  }

  void apply(CostParams& p) const {
    if (trucks) p.max_trucks = *trucks;
    if (delta) p.delta_hours = *delta;
    if (service) p.service_hours = *service;
    if (alpha) p.alpha = *alpha;
    if (beta) p.beta = *beta;
    p.validate();
  }
};

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

std::string json_text(const nlohmann::json& doc) { return doc.dump(2) + "\n"; }

Instance load_with_params(const std::string& path, const ParamFlags& params) {
  Instance inst = load_instance(path);
  params.apply(inst.params);
  return inst;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || !std::isfinite(v)) {
      throw Error(Errc::invalid_argument, "bad value '" + item + "' in --values");
    }
    values.push_back(v);
  }
  if (values.empty()) throw Error(Errc::invalid_argument, "--values is empty");
  return values;
}

int exit_for(const SolveReport& report) {
  if (report.reason == Termination::infeasible) {
    std::cerr << "error: no feasible schedule exists\n";
    return kExitInternal;
  }
  return report.limit_reached() ? kExitLimit : 0;
}

void summary(const Schedule& s, const SolveReport& r) {
  std::cerr << "objective=" << format_number(s.objective) << " loads_autonomous=" << autonomous_load_count(s)
            << " trucks=" << s.routes.size() << " lb=" << format_number(r.lower_bound)
            << " gap%=" << format_number(100.0 * r.gap) << " nodes=" << r.nodes
            << " seconds=" << format_number(r.seconds) << " termination=" << to_string(r.reason) << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Autonomous transfer hub network planning"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("athn ") + ATHN_VERSION + " (" + ATHN_BUILD_HASH + ")");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a synthetic instance");
  std::string gen_config, gen_out;
  std::uint64_t gen_seed = 1;
  std::optional<int> gen_loads, gen_hubs, gen_days;
  ParamFlags gen_params;
  gen->add_option("--config", gen_config, "Generator settings (JSON)")->check(CLI::ExistingFile);
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("--out", gen_out, "Instance file to write (stdout when omitted)");
  gen->add_option("--loads", gen_loads, "Number of loads");
  gen->add_option("--hubs", gen_hubs, "Number of hubs");
  gen->add_option("--days", gen_days, "Horizon length in days");
  gen_params.add(gen);

  // hubs
  auto* hubs = app.add_subcommand("hubs", "Place hubs on truck stops and assign them to loads");
  std::string hubs_instance, hubs_loads, hubs_stops, hubs_matrix, hubs_regions, hubs_out;
  std::size_t hubs_k = 10;
  std::optional<double> hubs_gamma;
  std::uint64_t hubs_seed = 1;
  ParamFlags hubs_params;
  auto* src_inst = hubs->add_option("--instance", hubs_instance, "Instance whose loads are used")->check(CLI::ExistingFile);
  auto* src_loads = hubs->add_option("--loads", hubs_loads, "Load CSV")->check(CLI::ExistingFile);
  src_inst->excludes(src_loads);
  hubs->add_option("--stops", hubs_stops, "Truck-stop CSV")->required()->check(CLI::ExistingFile);
  hubs->add_option("--k", hubs_k, "Number of hubs")->check(CLI::PositiveNumber);
  hubs->add_option("--gamma", hubs_gamma, "Hub-assignment discount");
  hubs->add_option("--seed", hubs_seed, "k-means seed");
  hubs->add_option("--matrix", hubs_matrix, "Distance-matrix CSV")->check(CLI::ExistingFile);
  hubs->add_option("--regions", hubs_regions, "Region map CSV (hub_id,region)")->check(CLI::ExistingFile);
  hubs->add_option("--out", hubs_out, "Instance file to write");
  hubs_params.add(hubs);

  // solve
  auto* solve = app.add_subcommand("solve", "Solve an instance");
  std::string solve_instance, solve_out;
  ParamFlags solve_params;
  LimitFlags solve_limits;
  solve->add_option("--instance", solve_instance, "Instance file")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", solve_out, "Solution file to write (stdout when omitted)");
  solve_params.add(solve);
  solve_limits.add(solve);

  // sweep
  auto* sw = app.add_subcommand("sweep", "Re-solve over a range of parameter values");
  std::string sw_instance, sw_dimension, sw_values, sw_csv, sw_svg, sw_stops;
  std::uint64_t sw_seed = 1;
  ParamFlags sw_params;
  LimitFlags sw_limits;
  sw->add_option("--instance", sw_instance, "Instance file")->required()->check(CLI::ExistingFile);
  sw->add_option("--dimension", sw_dimension, "K, delta, service or hubs")->required();
  sw->add_option("--values", sw_values, "Comma-separated values")->required();
  sw->add_option("--csv", sw_csv, "CSV output (stdout when omitted)");
  sw->add_option("--svg", sw_svg, "SVG chart output");
  sw->add_option("--stops", sw_stops, "Truck-stop CSV for the hubs dimension")->check(CLI::ExistingFile);
  sw->add_option("--seed", sw_seed, "k-means seed for the hubs dimension");
  sw_params.add(sw);
  sw_limits.add(sw);

  // decompose
  auto* dec = app.add_subcommand("decompose", "Regional or rolling-horizon solve");
  std::string dec_instance, dec_scheme, dec_regions, dec_out, dec_compare, dec_windows;
  double dec_horizon = 24.0;
  ParamFlags dec_params;
  LimitFlags dec_limits;
  dec->add_option("--instance", dec_instance, "Instance file")->required()->check(CLI::ExistingFile);
  dec->add_option("--scheme", dec_scheme, "regional or rolling")
      ->required()
      ->check(CLI::IsMember({"regional", "rolling"}));
  dec->add_option("--regions", dec_regions, "Region map CSV; hub regions of the instance otherwise")
      ->check(CLI::ExistingFile);
  dec->add_option("--horizon", dec_horizon, "Rolling window length in hours")->check(CLI::PositiveNumber);
  dec->add_option("--out", dec_out, "Solution file to write (stdout when omitted)");
  dec->add_option("--compare", dec_compare, "Also solve globally and write the comparison CSV here");
  dec->add_option("--windows", dec_windows, "Per-window CSV for the rolling scheme");
  dec_params.add(dec);
  dec_limits.add(dec);

  // report
  auto* rep = app.add_subcommand("report", "Statistics and exports for a solution");
  std::string rep_solution, rep_instance, rep_gantt, rep_geojson, rep_stats;
  std::optional<double> rep_rate;
  rep->add_option("--solution", rep_solution, "Solution file")->required()->check(CLI::ExistingFile);
  rep->add_option("--instance", rep_instance, "Instance file")->required()->check(CLI::ExistingFile);
  rep->add_option("--gantt", rep_gantt, "Gantt CSV output");
  rep->add_option("--geojson", rep_geojson, "GeoJSON route output");
  rep->add_option("--stats", rep_stats, "Statistics CSV output (stdout when no output is named)");
  rep->add_option("--rate-per-km", rep_rate, "Money per km-equivalent for an extra cost column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  if (gen->parsed()) {
    GeneratorConfig cfg;
    if (!gen_config.empty()) cfg = generator_config_from_json(read_json_file(gen_config));
    if (gen_loads) cfg.loads = *gen_loads;
    if (gen_hubs) cfg.hubs = *gen_hubs;
    if (gen_days) cfg.days = *gen_days;
    gen_params.apply(cfg.params);
    const Instance inst = gen_synthetic(cfg, gen_seed);
    if (gen_out.empty()) {
      std::cout << json_text(instance_to_json(inst));
    } else {
      save_instance(inst, gen_out);
    }
    return 0;
  }

  if (hubs->parsed()) {
    Instance inst;
    if (!hubs_instance.empty()) {
      inst = load_instance(hubs_instance);
    } else if (!hubs_loads.empty()) {
      inst.loads = read_loads_csv(std::filesystem::path(hubs_loads));
    } else {
      throw Error(Errc::invalid_argument, "hubs needs --instance or --loads");
    }
    if (!hubs_matrix.empty()) inst.distance_model = read_distance_matrix_csv(std::filesystem::path(hubs_matrix));
    if (hubs_gamma) inst.params.gamma = *hubs_gamma;
    hubs_params.apply(inst.params);
    std::vector<GeoPoint> points;
    for (const Load& l : inst.loads) {
      points.push_back(l.origin);
      points.push_back(l.destination);
    }
    inst.hubs = place_hubs(points, hubs_k, read_truck_stops_csv(std::filesystem::path(hubs_stops)), hubs_seed);
    if (!hubs_regions.empty()) {
      const auto regions = read_region_map_csv(std::filesystem::path(hubs_regions));
      for (Hub& h : inst.hubs) {
        auto it = regions.find(h.id);
        if (it != regions.end()) h.region = it->second;
      }
    }
    assign_all_hubs(inst);
    inst.validate();
    if (hubs_out.empty()) {
      std::cout << json_text(instance_to_json(inst));
    } else {
      save_instance(inst, hubs_out);
    }
    std::cerr << "hubs=" << inst.hubs.size() << " loads=" << inst.loads.size() << "\n";
    return 0;
  }

  if (solve->parsed()) {
    const Instance inst = load_with_params(solve_instance, solve_params);
    TaskGraph graph = build_task_graph(inst);
    const PreprocessStats pre = preprocess(graph);
    std::cerr << "tasks=" << graph.task_count() << " arcs=" << graph.arcs().size()
              << " removed=" << pre.arcs_removed << " unconstrained=" << pre.constraints_dropped
              << " constrained=" << graph.time_constrained_count() << "\n";
    const SolveResult result = branch_and_bound(graph, solve_limits.limits());
    if (result.report.reason != Termination::infeasible) {
      validate_schedule(result.schedule, graph);
      emit(solve_out, json_text(solution_to_json(result.schedule, graph, result.report)));
      summary(result.schedule, result.report);
    }
    return exit_for(result.report);
  }

  if (sw->parsed()) {
    const Instance inst = load_with_params(sw_instance, sw_params);
    const SweepDimension dim = parse_sweep_dimension(sw_dimension);
    SweepOptions opts;
    opts.seed = sw_seed;
    if (!sw_stops.empty()) opts.truck_stops = read_truck_stops_csv(std::filesystem::path(sw_stops));
    const auto points = sweep(inst, dim, parse_values(sw_values), sw_limits.limits(), opts);
    emit(sw_csv, sweep_csv(points));
    if (!sw_svg.empty()) write_text_file(sw_svg, sweep_svg(points, to_string(dim)));
    bool limited = false;
    for (const auto& p : points) limited = limited || p.report.limit_reached();
    return limited ? kExitLimit : 0;
  }

  if (dec->parsed()) {
    const Instance inst = load_with_params(dec_instance, dec_params);
    const SolverLimits limits = dec_limits.limits();
    std::vector<SchemeResult> rows;
    Schedule schedule;
    SolveReport report;
    bool limited = false;
    if (dec_scheme == "regional") {
      const auto regions =
          dec_regions.empty() ? hub_regions(inst) : read_region_map_csv(std::filesystem::path(dec_regions));
      const RegionalResult r = solve_regional(inst, regions, limits);
      schedule = r.schedule;
      report = r.report;
      limited = r.report.limit_reached();
      rows.push_back({"regional", schedule.objective, autonomous_load_count(schedule), r.report.seconds});
      for (const auto& [region, trucks] : r.trucks_per_region) {
        std::cerr << "region=" << region << " trucks=" << trucks << "\n";
      }
    } else {
      const RollingResult r = solve_rolling(inst, dec_horizon, limits);
      schedule = r.schedule;
      report.upper_bound = schedule.objective;
      report.seconds = r.seconds;
      for (const auto& w : r.windows) {
        report.nodes += w.report.nodes;
        report.relaxations += w.report.relaxations;
        limited = limited || w.report.limit_reached();
      }
      report.lower_bound = -std::numeric_limits<double>::infinity();
      report.gap = std::numeric_limits<double>::infinity();
      report.reason = limited ? Termination::time_limit : Termination::optimal;
      rows.push_back({"rolling", schedule.objective, autonomous_load_count(schedule), r.seconds});
      if (!dec_windows.empty()) {
        std::ostringstream csv;
        csv << "window,begin_hours,end_hours,tasks,fixed_arcs,objective,objective_delta,gap%,termination\n";
        for (const auto& w : r.windows) {
          csv << w.index << ',' << format_number(w.begin_hours) << ',' << format_number(w.end_hours) << ','
              << w.tasks << ',' << w.fixed_arcs << ',' << format_number(w.objective) << ','
              << format_number(w.objective_delta) << ',' << format_number(100.0 * w.report.gap) << ','
              << to_string(w.report.reason) << '\n';
        }
        write_text_file(dec_windows, csv.str());
      }
      std::cerr << "windows=" << r.windows.size() << " accumulated=" << format_number(r.accumulated_objective)
                << "\n";
    }
    TaskGraph graph = build_task_graph(inst);
    validate_schedule(schedule, graph);
    if (!dec_compare.empty()) {
      TaskGraph global_graph = graph;
      preprocess(global_graph);
      const SolveResult global = branch_and_bound(global_graph, limits);
      limited = limited || global.report.limit_reached();
      rows.insert(rows.begin(), {"global", global.schedule.objective, autonomous_load_count(global.schedule),
                                 global.report.seconds});
      write_text_file(dec_compare, comparison_csv(rows));
    }
    emit(dec_out, json_text(solution_to_json(schedule, graph, report)));
    std::cerr << "objective=" << format_number(schedule.objective)
              << " loads_autonomous=" << autonomous_load_count(schedule) << "\n";
    return limited ? kExitLimit : 0;
  }

  if (rep->parsed()) {
    const Instance inst = load_instance(rep_instance);
    const TaskGraph graph = build_task_graph(inst);
    const Schedule schedule = schedule_from_json(read_json_file(rep_solution), graph);
    validate_schedule(schedule, graph);
    const StatsTable table = stats(schedule, graph);
    const bool any = !rep_gantt.empty() || !rep_geojson.empty() || !rep_stats.empty();
    if (!rep_stats.empty() || !any) emit(rep_stats, stats_csv(table, rep_rate));
    if (!rep_gantt.empty()) write_text_file(rep_gantt, export_gantt(schedule, graph));
    if (!rep_geojson.empty()) write_text_file(rep_geojson, json_text(export_routes_geojson(schedule, graph, inst)));
    return 0;
  }
  return kExitInput;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const athn::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_input_error() ? kExitInput : kExitInternal;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: ParseError: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return kExitInternal;
  }
}
