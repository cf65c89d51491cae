#pragma once
// The five navigation metrics over rollout batches (SR/SPL/SNA/DTG/SWS),
// the turn-aware optimal action count behind SNA, classifier calibration
// metrics, and report serialization.

#include <map>
#include <string>
#include <vector>

#include "savnav/episodes.hpp"
#include "savnav/worldgen.hpp"

namespace savnav {

struct MetricValues {
  double sr = 0.0;
  double spl = 0.0;
  double sna = 0.0;
  double dtg = 0.0;
  double sws = 0.0;
  int n = 0;
};

struct MetricReport {
  MetricValues overall;
  // keyed by "SH/HS", "SH/US", "UH/HS", "UH/US"
  std::map<std::string, MetricValues> per_split;
};

struct EvaluatedEpisode {
  RolloutResult result;
  Episode episode;
  const HouseMap* map = nullptr;
};

/// SPL_i = S_i * l_i / max(p_i, l_i) with l_i the shortest geodesic from the
/// start to the nearest goal viewpoint; SNA uses the optimal action count; DTG
/// is the final geodesic to the nearest viewpoint; SWS counts successes that
/// stopped after the sound went silent (over all episodes by default).
MetricReport compute_metrics(const std::vector<EvaluatedEpisode>& results,
                             bool sws_over_silent_only = false);

/// Minimum number of actions (moves + turns + the final Stop) from the start
/// pose to any goal viewpoint, via uniform-cost search over (cell, heading).
int optimal_action_count(const HouseMap& map, const Episode& episode);

/// Shortest geodesic from the episode start to the nearest goal viewpoint.
double shortest_goal_distance(const HouseMap& map, const Episode& episode);

struct ClassifierMetrics {
  double accuracy = 0.0;  // top-1 match rate
  double emr = 0.0;       // exact match ratio over full label vectors
  double hamming = 0.0;   // mean per-class disagreement rate
};

ClassifierMetrics classifier_metrics(const std::vector<Vec>& predictions,
                                     const std::vector<Vec>& ground_truth);

/// format is "csv" or "json"; CSV columns: split, sr, spl, sna, dtg, sws, n.
void write_report(const MetricReport& report, const std::string& path, const std::string& format);
std::string report_to_csv(const MetricReport& report);
std::string report_to_json(const MetricReport& report);
MetricReport report_from_json(const std::string& text);

}  // namespace savnav
