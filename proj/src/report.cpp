#include "athn/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "athn/error.hpp"
#include "athn/format.hpp"

namespace athn {

namespace {

double share(double part, double whole) { return whole == 0.0 ? 0.0 : part / whole; }

}  // namespace

StatsTable stats_from_km(const KmFigures& km, const CostParams& params) {
  StatsTable t;
  t.current = {"Current", "Direct", km.total_loads, "Full", km.current_km, 0.5, 1.0, km.current_km};
  t.middle = {"ATHN",
              "Autonomous",
              km.autonomous_loads,
              "Middle",
              km.middle_km,
              share(km.relocation_km, km.middle_km),
              1.0 - params.alpha,
              km.middle_km * (1.0 - params.alpha)};
  t.first_last = {"ATHN", "Autonomous", km.autonomous_loads, "First/last", km.first_last_km, params.beta, 1.0,
                  km.first_last_km};
  const std::size_t direct_loads = km.total_loads >= km.autonomous_loads ? km.total_loads - km.autonomous_loads : 0;
  t.direct = {"ATHN", "Direct", direct_loads, "Full", km.direct_km, 0.5, 1.0, km.direct_km};
  t.first_last_raw_km = km.first_last_raw_km;
  t.athn_loads = km.total_loads;
  t.athn_km = t.middle.km + t.first_last.km + t.direct.km;
  t.athn_cost = t.middle.cost + t.first_last.cost + t.direct.cost;
  t.km_savings = t.current.km - t.athn_km;
  t.km_savings_share = share(t.km_savings, t.current.km);
  t.cost_savings = t.current.cost - t.athn_cost;
  t.cost_savings_share = share(t.cost_savings, t.current.cost);
  return t;
}

KmFigures schedule_km(const Schedule& schedule, const TaskGraph& graph) {
  KmFigures km;
  km.total_loads = graph.task_count();
  const double inflate = 1.0 / (1.0 - graph.params().beta);
  for (const Task& t : graph.tasks()) km.current_km += t.direct_cost;
  for (const Route& r : schedule.routes) {
    for (std::size_t i = 0; i < r.tasks.size(); ++i) {
      const Task& t = graph.task(r.tasks[i]);
      ++km.autonomous_loads;
      km.middle_km += t.middle_km;
      km.first_last_raw_km += t.first_km + t.last_km;
      if (i + 1 < r.tasks.size()) {
        const double reloc = graph.hub_leg(t.h_minus, graph.task(r.tasks[i + 1]).h_plus).km;
        km.middle_km += reloc;
        km.relocation_km += reloc;
      }
    }
  }
  km.first_last_km = km.first_last_raw_km * inflate;
  for (TaskId t : schedule.served_direct) km.direct_km += graph.task(t).direct_cost;
  return km;
}

StatsTable stats(const Schedule& schedule, const TaskGraph& graph) {
  return stats_from_km(schedule_km(schedule, graph), graph.params());
}

StatsTable stats(const Schedule& schedule, const Instance& instance) {
  return stats(schedule, build_task_graph(instance));
}

std::string stats_csv(const StatsTable& table, std::optional<double> rate_per_km) {
  std::ostringstream out;
  out << "system,service,loads,segment,total_km,empty_pct,cost_factor,cost";
  if (rate_per_km) out << ",cost_money";
  out << '\n';
  auto row = [&](const StatsRow& r) {
    out << r.system << ',' << r.service << ',' << r.loads << ',' << r.segment << ',' << format_number(r.km) << ','
        << format_number(100.0 * r.empty_share) << ',' << format_number(r.cost_factor) << ','
        << format_number(r.cost);
    if (rate_per_km) out << ',' << format_number(r.cost * *rate_per_km);
    out << '\n';
  };
  row(table.current);
  row(table.middle);
  row(table.first_last);
  out << "ATHN,Autonomous," << table.first_last.loads << ",First/last raw," << format_number(table.first_last_raw_km)
      << ",0,,";
  if (rate_per_km) out << ',';
  out << '\n';
  row(table.direct);
  out << "ATHN,Total," << table.athn_loads << ",," << format_number(table.athn_km) << ",,,"
      << format_number(table.athn_cost);
  if (rate_per_km) out << ',' << format_number(table.athn_cost * *rate_per_km);
  out << '\n';
  out << "Savings,,,," << format_number(table.km_savings) << ",,," << format_number(table.cost_savings);
  if (rate_per_km) out << ',' << format_number(table.cost_savings * *rate_per_km);
  out << '\n';
  out << "Savings %,,,," << format_number(100.0 * table.km_savings_share) << ",,,"
      << format_number(100.0 * table.cost_savings_share);
  if (rate_per_km) out << ',';
  out << '\n';
  return out.str();
}

namespace {

struct Interval {
  TaskId task;
  const char* kind;
  double start;
  double end;
};

std::vector<Interval> truck_intervals(const Route& r, const TaskGraph& graph) {
  std::vector<Interval> out;
  const double service = graph.params().service_hours;
  for (std::size_t i = 0; i < r.tasks.size(); ++i) {
    const Task& t = graph.task(r.tasks[i]);
    const double end = r.start[i] + 2.0 * service + t.middle_hours;
    out.push_back({t.id, "task", r.start[i], end});
    if (i + 1 == r.tasks.size()) break;
    const TaskId next = r.tasks[i + 1];
    const double arrive = end + graph.hub_leg(t.h_minus, graph.task(next).h_plus).hours;
    if (arrive > end) out.push_back({next, "relocation", end, arrive});
    if (r.start[i + 1] > arrive) out.push_back({next, "idle", arrive, r.start[i + 1]});
  }
  return out;
}

}  // namespace

std::string export_gantt(const Schedule& schedule, const TaskGraph& graph) {
  std::ostringstream out;
  out << "truck,task_id,kind,start_hours,end_hours\n";
  for (std::size_t k = 0; k < schedule.routes.size(); ++k) {
    for (const Interval& iv : truck_intervals(schedule.routes[k], graph)) {
      out << k + 1 << ',' << iv.task << ',' << iv.kind << ',' << format_number(iv.start) << ','
          << format_number(iv.end) << '\n';
    }
  }
  return out.str();
}

double inactivity(const Schedule& schedule, const TaskGraph& graph) {
  double idle = 0.0;
  double span = 0.0;
  for (const Route& r : schedule.routes) {
    const auto ivs = truck_intervals(r, graph);
    if (ivs.empty()) continue;
    span += ivs.back().end - ivs.front().start;
    for (const Interval& iv : ivs) {
      if (std::string_view(iv.kind) == "idle") idle += iv.end - iv.start;
    }
  }
  return share(idle, span);
}

nlohmann::json export_routes_geojson(const Schedule& schedule, const TaskGraph& graph, const Instance& instance) {
  auto coords = [&](std::size_t hub) {
    const GeoPoint& p = instance.hubs.at(hub).location;
    return nlohmann::json::array({p.lon, p.lat});
  };
  auto feature = [&](std::size_t truck, bool loaded, std::size_t from, std::size_t to, double km, TaskId task) {
    return nlohmann::json{
        {"type", "Feature"},
        {"geometry", {{"type", "LineString"}, {"coordinates", {coords(from), coords(to)}}}},
        {"properties", {{"truck", truck}, {"loaded", loaded}, {"km", km}, {"task_id", task}}}};
  };
  nlohmann::json features = nlohmann::json::array();
  for (std::size_t k = 0; k < schedule.routes.size(); ++k) {
    const Route& r = schedule.routes[k];
    for (std::size_t i = 0; i < r.tasks.size(); ++i) {
      const Task& t = graph.task(r.tasks[i]);
      features.push_back(feature(k + 1, true, t.h_plus, t.h_minus, t.middle_km, t.id));
      if (i + 1 == r.tasks.size()) break;
      const Task& next = graph.task(r.tasks[i + 1]);
      if (t.h_minus == next.h_plus) continue;
      features.push_back(
          feature(k + 1, false, t.h_minus, next.h_plus, graph.hub_leg(t.h_minus, next.h_plus).km, next.id));
    }
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

SweepDimension parse_sweep_dimension(const std::string& name) {
  if (name == "K" || name == "k" || name == "trucks") return SweepDimension::trucks;
  if (name == "delta") return SweepDimension::delta;
  if (name == "service") return SweepDimension::service;
  if (name == "hubs") return SweepDimension::hubs;
  throw Error(Errc::invalid_argument, "unknown sweep dimension '" + name + "' (K, delta, service, hubs)");
}

const char* to_string(SweepDimension dimension) {
  switch (dimension) {
    case SweepDimension::trucks: return "K";
    case SweepDimension::delta: return "delta";
    case SweepDimension::service: return "service";
    case SweepDimension::hubs: return "hubs";
  }
  return "unknown";
}

std::vector<SweepPoint> sweep(const Instance& instance, SweepDimension dimension, const std::vector<double>& values,
                              const SolverLimits& limits, const SweepOptions& options) {
  std::vector<GeoPoint> endpoints;
  if (dimension == SweepDimension::hubs) {
    if (options.truck_stops.empty()) throw Error(Errc::empty_input, "a hubs sweep needs truck stops");
    for (const Load& l : instance.loads) {
      endpoints.push_back(l.origin);
      endpoints.push_back(l.destination);
    }
  }
  const bool warm = dimension == SweepDimension::trucks || dimension == SweepDimension::delta;
  std::vector<SweepPoint> points;
  std::optional<Schedule> previous;
  for (double v : values) {
    Instance variant = instance;
    switch (dimension) {
      case SweepDimension::trucks:
        if (v < 0 || v != std::floor(v)) throw Error(Errc::invalid_argument, "truck counts must be whole numbers");
        variant.params.max_trucks = static_cast<int>(v);
        break;
      case SweepDimension::delta:
        variant.params.delta_hours = v;
        break;
      case SweepDimension::service:
        variant.params.service_hours = v;
        break;
      case SweepDimension::hubs:
        if (v < 2 || v != std::floor(v)) throw Error(Errc::invalid_argument, "hub counts must be whole numbers >= 2");
        variant.hubs = place_hubs(endpoints, static_cast<std::size_t>(v), options.truck_stops, options.seed);
        assign_all_hubs(variant);
        break;
    }
    variant.params.validate();
    TaskGraph graph = build_task_graph(variant);
    preprocess(graph);
    SolverLimits lim = limits;
    if (warm && previous) lim.warm_incumbent = previous;
    SolveResult solved = branch_and_bound(graph, lim);
    SweepPoint p;
    p.value = v;
    p.objective = solved.schedule.objective;
    p.loads_autonomous = autonomous_load_count(solved.schedule);
    p.inactivity = inactivity(solved.schedule, graph);
    p.report = solved.report;
    points.push_back(p);
    previous = std::move(solved.schedule);
  }
  return points;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  out << "value,objective,loads_autonomous,inactivity%,gap\n";
  for (const SweepPoint& p : points) {
    out << format_number(p.value) << ',' << format_number(p.objective) << ',' << p.loads_autonomous << ','
        << format_number(100.0 * p.inactivity) << ',' << format_number(100.0 * p.report.gap) << '\n';
  }
  return out.str();
}

namespace {

struct Axis {
  double lo;
  double hi;
};

Axis axis_for(double lo, double hi) {
  if (!(hi > lo)) {
    const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.05;
    return {lo - pad, hi + pad};
  }
  const double pad = (hi - lo) * 0.05;
  return {lo - pad, hi + pad};
}

}  // namespace

std::string sweep_svg(const std::vector<SweepPoint>& points, const std::string& x_label) {
  constexpr double width = 640, height = 400, left = 80, right = 70, top = 30, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#444\"/>\n";
  if (!points.empty()) {
    double xmin = points.front().value, xmax = xmin, omin = points.front().objective, omax = omin;
    double imin = 100.0 * points.front().inactivity, imax = imin;
    for (const auto& p : points) {
      xmin = std::min(xmin, p.value);
      xmax = std::max(xmax, p.value);
      omin = std::min(omin, p.objective);
      omax = std::max(omax, p.objective);
      imin = std::min(imin, 100.0 * p.inactivity);
      imax = std::max(imax, 100.0 * p.inactivity);
    }
    const Axis xa = axis_for(xmin, xmax), oa = axis_for(omin, omax), ia = axis_for(std::min(0.0, imin), imax);
    auto sx = [&](double v) { return left + (v - xa.lo) / (xa.hi - xa.lo) * plot_w; };
    auto sy = [&](double v, const Axis& a) { return top + plot_h - (v - a.lo) / (a.hi - a.lo) * plot_h; };
    auto line = [&](const char* colour, auto value, const Axis& a) {
      svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\" points=\"";
      for (const auto& p : points) svg << sx(p.value) << ',' << sy(value(p), a) << ' ';
      svg << "\"/>\n";
      for (const auto& p : points) {
        svg << "<circle cx=\"" << sx(p.value) << "\" cy=\"" << sy(value(p), a) << "\" r=\"3\" fill=\"" << colour
            << "\"/>\n";
      }
    };
    line("#1f5fa8", [](const SweepPoint& p) { return p.objective; }, oa);
    line("#c0392b", [](const SweepPoint& p) { return 100.0 * p.inactivity; }, ia);
    for (int i = 0; i <= 4; ++i) {
      const double f = i / 4.0;
      const double y = top + plot_h - f * plot_h;
      svg << "<text x=\"" << left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\" fill=\"#1f5fa8\">"
          << format_number(oa.lo + f * (oa.hi - oa.lo)) << "</text>\n";
      svg << "<text x=\"" << left + plot_w + 6 << "\" y=\"" << y + 4 << "\" fill=\"#c0392b\">"
          << format_number(ia.lo + f * (ia.hi - ia.lo)) << "</text>\n";
    }
    for (const auto& p : points) {
      svg << "<text x=\"" << sx(p.value) << "\" y=\"" << top + plot_h + 16 << "\" text-anchor=\"middle\">"
          << format_number(p.value) << "</text>\n";
    }
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10 << "\" text-anchor=\"middle\">" << x_label
      << "</text>\n";
  svg << "<text x=\"" << left << "\" y=\"" << top - 10 << "\" fill=\"#1f5fa8\">objective (km-equivalent)</text>\n";
  svg << "<text x=\"" << left + plot_w << "\" y=\"" << top - 10
      << "\" text-anchor=\"end\" fill=\"#c0392b\">inactivity %</text>\n";
  svg << "</svg>\n";
  return svg.str();
}

nlohmann::json report_to_json(const SolveReport& report) {
  auto num = [](double v) -> nlohmann::json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  return {{"upper_bound", num(report.upper_bound)},
          {"lower_bound", num(report.lower_bound)},
          {"gap_percent", num(100.0 * report.gap)},
          {"nodes", report.nodes},
          {"relaxations", report.relaxations},
          {"seconds", report.seconds},
          {"termination", to_string(report.reason)}};
}

nlohmann::json solution_to_json(const Schedule& schedule, const TaskGraph& graph, const SolveReport& report) {
  nlohmann::json routes = nlohmann::json::array();
  for (std::size_t k = 0; k < schedule.routes.size(); ++k) {
    const Route& r = schedule.routes[k];
    nlohmann::json loads = nlohmann::json::array();
    for (TaskId t : r.tasks) loads.push_back(graph.task(t).load_id);
    routes.push_back({{"truck", k + 1}, {"tasks", r.tasks}, {"loads", loads}, {"start_times", r.start}});
  }
  nlohmann::json direct = nlohmann::json::array();
  for (TaskId t : schedule.served_direct) direct.push_back(graph.task(t).load_id);
  return {{"format", "athn-solution"},
          {"version", 1},
          {"objective", schedule.objective},
          {"loads_autonomous", autonomous_load_count(schedule)},
          {"routes", routes},
          {"direct_loads", direct},
          {"report", report_to_json(report)}};
}

Schedule schedule_from_json(const nlohmann::json& doc, const TaskGraph& graph) {
  try {
    if (doc.value("format", "") != "athn-solution") {
      throw Error(Errc::parse_error, "not an athn-solution document");
    }
    Schedule s;
    for (const auto& r : doc.at("routes")) {
      Route route;
      route.tasks = r.at("tasks").get<std::vector<TaskId>>();
      route.start = r.at("start_times").get<std::vector<double>>();
      for (TaskId t : route.tasks) {
        if (!graph.is_task(t)) throw Error(Errc::parse_error, "route names unknown task " + std::to_string(t));
      }
      s.routes.push_back(std::move(route));
    }
    std::vector<char> used(graph.task_count() + 1, 0);
    for (const Route& r : s.routes) {
      for (TaskId t : r.tasks) used[static_cast<std::size_t>(t)] = 1;
    }
    for (TaskId t = 1; t <= static_cast<TaskId>(graph.task_count()); ++t) {
      if (!used[static_cast<std::size_t>(t)]) s.served_direct.push_back(t);
    }
    s.objective = doc.at("objective").get<double>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("solution: ") + e.what());
  }
}

}  // namespace athn
