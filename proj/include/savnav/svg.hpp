#pragma once
// Static SVG rendering of a house map with an overlaid trajectory.
// Deterministic output bytes for identical input (golden-file friendly).

#include <string>

namespace savnav {

/// Input: the trajectory JSON emitted by trajectory_to_json.
std::string trajectory_svg_from_json(const std::string& trajectory_json_text);

}  // namespace savnav
