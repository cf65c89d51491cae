#include "savnav/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>

#include "json.hpp"
#include "savnav/error.hpp"

namespace savnav {

namespace {

const char* split_key(const Episode& e) {
  if (e.unseen_house) return e.unheard_sound ? "UH/US" : "UH/HS";
  return e.unheard_sound ? "SH/US" : "SH/HS";
}

struct Accumulator {
  double sr = 0, spl = 0, sna = 0, dtg = 0, sws = 0;
  int n = 0, silent = 0;

  MetricValues finish(bool sws_over_silent_only) const {
    MetricValues v;
    v.n = n;
    if (n == 0) return v;
    v.sr = sr / n;
    v.spl = spl / n;
    v.sna = sna / n;
    v.dtg = dtg / n;
    const int sws_den = sws_over_silent_only ? silent : n;
    v.sws = sws_den == 0 ? 0.0 : sws / sws_den;
    return v;
  }
};

}  // namespace

MetricReport compute_metrics(const std::vector<EvaluatedEpisode>& results,
                             bool sws_over_silent_only) {
  require(!results.empty(), "metrics", "empty result batch");
  Accumulator overall;
  std::map<std::string, Accumulator> per_split;

  for (const EvaluatedEpisode& ev : results) {
    require(ev.map != nullptr, "metrics", "evaluated episode missing its map");
    require(ev.episode.goal_object_index >= 0 &&
                ev.episode.goal_object_index < static_cast<int>(ev.map->objects.size()),
            "metrics", "episode/map mismatch: goal object out of range");
    const double s = ev.result.success ? 1.0 : 0.0;
    const double l = shortest_goal_distance(*ev.map, ev.episode);
    const double p = ev.result.path_length_m;
    const double spl = s * (l <= 0.0 ? 1.0 : l / std::max(p, l));
    const int opt_actions = optimal_action_count(*ev.map, ev.episode);
    const double sna =
        s * static_cast<double>(opt_actions) /
        std::max<double>(ev.result.action_count, opt_actions);
    const double sws = (ev.result.success && ev.result.stopped_after_silence) ? 1.0 : 0.0;
    const bool silent_at_end = ev.result.action_count >= ev.result.sound_stopped_step;

    for (Accumulator* acc : {&overall, &per_split[split_key(ev.episode)]}) {
      acc->sr += s;
      acc->spl += spl;
      acc->sna += sna;
      acc->dtg += ev.result.final_geodesic_m;
      acc->sws += sws;
      acc->n += 1;
      acc->silent += silent_at_end ? 1 : 0;
    }
  }

  MetricReport report;
  report.overall = overall.finish(sws_over_silent_only);
  for (const auto& [key, acc] : per_split) report.per_split[key] = acc.finish(sws_over_silent_only);
  return report;
}

double shortest_goal_distance(const HouseMap& map, const Episode& episode) {
  const ObjectInstance& goal = map.objects[episode.goal_object_index];
  const auto dist = bfs_distances(map, episode.start.cell);
  double best = kInfDistance;
  for (Vec2i v : goal.viewpoints) {
    const int d = dist[map.cell_index(v)];
    if (d >= 0) best = std::min(best, static_cast<double>(d));
  }
  require(best < kInfDistance, "metrics", "goal viewpoints unreachable from start");
  return best;
}

int optimal_action_count(const HouseMap& map, const Episode& episode) {
  const ObjectInstance& goal = map.objects[episode.goal_object_index];
  require(!goal.viewpoints.empty(), "metrics", "goal has no viewpoints");

  // Uniform-cost BFS over (cell, heading); forward and each 90-degree turn
  // cost one action.
  const int cells = map.width * map.height;
  std::vector<int> dist(static_cast<std::size_t>(cells) * 4, -1);
  auto state = [&](Vec2i c, int h) { return map.cell_index(c) * 4 + h / 90; };

  std::deque<std::pair<Vec2i, int>> queue;
  dist[state(episode.start.cell, episode.start.heading_deg)] = 0;
  queue.emplace_back(episode.start.cell, episode.start.heading_deg);

  std::vector<bool> is_goal(cells, false);
  for (Vec2i v : goal.viewpoints) is_goal[map.cell_index(v)] = true;

  while (!queue.empty()) {
    auto [cell, heading] = queue.front();
    queue.pop_front();
    const int d = dist[state(cell, heading)];
    if (is_goal[map.cell_index(cell)]) return d + 1;  // plus the final Stop

    auto visit = [&](Vec2i c, int h) {
      if (dist[state(c, h)] < 0) {
        dist[state(c, h)] = d + 1;
        queue.emplace_back(c, h);
      }
    };
    visit(cell, (heading + 90) % 360);
    visit(cell, (heading + 270) % 360);
    const Vec2i dir = heading_dir(heading);
    const Vec2i fwd{cell.x + dir.x, cell.y + dir.y};
    if (map.is_free(fwd)) visit(fwd, heading);
  }
  fail("metrics", "goal viewpoints unreachable from the start pose");
}

ClassifierMetrics classifier_metrics(const std::vector<Vec>& predictions,
                                     const std::vector<Vec>& ground_truth) {
  require(predictions.size() == ground_truth.size(), "metrics",
          "prediction/ground-truth length mismatch");
  require(!predictions.empty(), "metrics", "empty classifier batch");
  ClassifierMetrics m;
  double hamming_sum = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const Vec& p = predictions[i];
    const Vec& t = ground_truth[i];
    require(p.size() == t.size(), "metrics", "label width mismatch at index " + std::to_string(i));
    std::size_t p_top = 0, t_top = 0;
    bool exact = true;
    int disagreements = 0;
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (p[j] > p[p_top]) p_top = j;
      if (t[j] > t[t_top]) t_top = j;
      const bool pj = p[j] >= 0.5, tj = t[j] >= 0.5;
      if (pj != tj) {
        exact = false;
        ++disagreements;
      }
    }
    m.accuracy += p_top == t_top ? 1.0 : 0.0;
    m.emr += exact ? 1.0 : 0.0;
    hamming_sum += static_cast<double>(disagreements) / static_cast<double>(p.size());
  }
  const double n = static_cast<double>(predictions.size());
  m.accuracy /= n;
  m.emr /= n;
  m.hamming = hamming_sum / n;
  return m;
}

namespace {

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void append_row(std::string& csv, const std::string& split, const MetricValues& v) {
  csv += split + "," + fmt(v.sr) + "," + fmt(v.spl) + "," + fmt(v.sna) + "," + fmt(v.dtg) + "," +
         fmt(v.sws) + "," + std::to_string(v.n) + "\n";
}

nlohmann::json values_json(const MetricValues& v) {
  return {{"sr", v.sr}, {"spl", v.spl}, {"sna", v.sna},
          {"dtg", v.dtg}, {"sws", v.sws}, {"n", v.n}};
}

MetricValues values_from(const nlohmann::json& j) {
  MetricValues v;
  v.sr = j.at("sr").get<double>();
  v.spl = j.at("spl").get<double>();
  v.sna = j.at("sna").get<double>();
  v.dtg = j.at("dtg").get<double>();
  v.sws = j.at("sws").get<double>();
  v.n = j.at("n").get<int>();
  return v;
}

}  // namespace

std::string report_to_csv(const MetricReport& report) {
  std::string csv = "split,sr,spl,sna,dtg,sws,n\n";
  // Fixed split order matching the results table layout.
  for (const char* key : {"SH/HS", "SH/US", "UH/HS", "UH/US"}) {
    auto it = report.per_split.find(key);
    if (it != report.per_split.end()) append_row(csv, key, it->second);
  }
  for (const auto& [key, values] : report.per_split)
    if (key != "SH/HS" && key != "SH/US" && key != "UH/HS" && key != "UH/US")
      append_row(csv, key, values);
  if (report.overall.n > 0) append_row(csv, "ALL", report.overall);
  return csv;
}

std::string report_to_json(const MetricReport& report) {
  nlohmann::json j;
  j["overall"] = values_json(report.overall);
  j["per_split"] = nlohmann::json::object();
  for (const auto& [key, values] : report.per_split) j["per_split"][key] = values_json(values);
  return j.dump(2);
}

MetricReport report_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  MetricReport report;
  report.overall = values_from(j.at("overall"));
  for (const auto& [key, values] : j.at("per_split").items())
    report.per_split[key] = values_from(values);
  return report;
}

void write_report(const MetricReport& report, const std::string& path, const std::string& format) {
  require(format == "csv" || format == "json", "metrics", "format must be csv or json");
  std::ofstream f(path);
  require(f.good(), "io", "cannot open '" + path + "' for writing");
  f << (format == "csv" ? report_to_csv(report) : report_to_json(report));
  require(f.good(), "io", "write failure on '" + path + "'");
}

}  // namespace savnav
