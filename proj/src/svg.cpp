#include "savnav/svg.hpp"

#include <cstdio>
#include <string>

#include "json.hpp"
#include "savnav/error.hpp"
#include "savnav/vocab.hpp"
#include "savnav/worldgen.hpp"

namespace savnav {

namespace {

constexpr int kScale = 12;  // px per cell

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

// Fixed pastel palette per region class; derived once from the class index so
// colours are stable across runs.
std::string region_fill(int region_class) {
  const int hue = (region_class * 47) % 360;
  return "hsl(" + std::to_string(hue) + ",45%,85%)";
}

}  // namespace

std::string trajectory_svg_from_json(const std::string& trajectory_json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(trajectory_json_text);
  } catch (const nlohmann::json::parse_error& e) {
    fail("svg", std::string("invalid trajectory JSON: ") + e.what());
  }
  const HouseMap map = house_from_json(j.at("house").dump());

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(map.width * kScale) + "\" height=\"" +
         std::to_string(map.height * kScale) + "\" viewBox=\"0 0 " +
         std::to_string(map.width * kScale) + " " + std::to_string(map.height * kScale) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#222\"/>\n";

  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x) {
      const std::int16_t v = map.grid[static_cast<std::size_t>(y) * map.width + x];
      if (v == kWall) continue;
      svg += "<rect x=\"" + std::to_string(x * kScale) + "\" y=\"" + std::to_string(y * kScale) +
             "\" width=\"" + std::to_string(kScale) + "\" height=\"" + std::to_string(kScale) +
             "\" fill=\"" + region_fill(map.regions[v].region_class) + "\"/>\n";
    }

  const int goal_index = j.value("goal_object_index", -1);
  for (std::size_t i = 0; i < map.objects.size(); ++i) {
    const ObjectInstance& obj = map.objects[i];
    const double cx = (obj.cell.x + 0.5) * kScale;
    const double cy = (obj.cell.y + 0.5) * kScale;
    const bool is_goal = static_cast<int>(i) == goal_index;
    svg += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" +
           num(kScale * (is_goal ? 0.38 : 0.28)) + "\" fill=\"" +
           (is_goal ? "#d62728" : "#555") + "\"/>\n";
  }

  const auto& poses = j.at("poses");
  if (poses.size() >= 2) {
    std::string points;
    for (const auto& p : poses) {
      if (!points.empty()) points += " ";
      points += num((p.at(0).get<int>() + 0.5) * kScale) + "," +
                num((p.at(1).get<int>() + 0.5) * kScale);
    }
    svg += "<polyline points=\"" + points +
           "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\"/>\n";
  }
  if (!poses.empty()) {
    const auto& s = poses.front();
    svg += "<circle cx=\"" + num((s.at(0).get<int>() + 0.5) * kScale) + "\" cy=\"" +
           num((s.at(1).get<int>() + 0.5) * kScale) + "\" r=\"" + num(kScale * 0.3) +
           "\" fill=\"#2ca02c\"/>\n";
    if (poses.size() >= 2) {
      const auto& e = poses.back();
      const double ex = (e.at(0).get<int>() + 0.5) * kScale;
      const double ey = (e.at(1).get<int>() + 0.5) * kScale;
      svg += "<rect x=\"" + num(ex - kScale * 0.25) + "\" y=\"" + num(ey - kScale * 0.25) +
             "\" width=\"" + num(kScale * 0.5) + "\" height=\"" + num(kScale * 0.5) +
             "\" fill=\"#1f77b4\"/>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace savnav
