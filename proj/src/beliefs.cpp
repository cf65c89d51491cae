#include "savnav/beliefs.hpp"

#include "savnav/error.hpp"
#include "savnav/vocab.hpp"

namespace savnav {

ClassBelief initial_class_belief() {
  ClassBelief b;
  b.scores.assign(Vocabulary::kObjects, 1.0 / Vocabulary::kObjects);
  return b;
}

ClassBelief update_class_belief(const ClassBelief& prev, const Vec& obs, int step, double delta) {
  require(obs.size() == prev.scores.size(), "beliefs", "class observation width mismatch");
  require(delta >= 0.0 && delta <= 1.0, "beliefs", "delta outside [0,1]");
  for (double v : obs)
    require(v >= 0.0 && v <= 1.0, "beliefs", "class observation entry outside [0,1]");
  ClassBelief out;
  out.scores.resize(prev.scores.size());
  for (std::size_t i = 0; i < obs.size(); ++i)
    out.scores[i] = (1.0 - delta) * obs[i] + delta * prev.scores[i];
  out.last_update_step = step;
  return out;
}

ClassBelief update_class_belief_silent(const ClassBelief& prev) { return prev; }

EgoOffset pose_transform(const EgoOffset& prev, const PoseDelta& dp) {
  const double x = prev.x - dp.tx;
  const double y = prev.y - dp.ty;
  switch (((dp.rotation_deg % 360) + 360) % 360) {
    case 0: return {x, y};
    case 90: return {y, -x};    // R(-90)
    case 180: return {-x, -y};  // R(-180)
    case 270: return {-y, x};   // R(+90) == R(-270)
    default: fail("beliefs", "rotation must be a multiple of 90 degrees");
  }
}

LocationBelief update_location_belief(const LocationBelief& prev, const EgoOffset& obs_offset,
                                      double obs_drr, const PoseDelta& dp, LocationMode mode) {
  if (mode == LocationMode::kDynamic)
    require(obs_drr >= 0.0 && obs_drr <= 1.0, "beliefs", "DRR estimate outside [0,1]");
  const EgoOffset prior = pose_transform(prev.offset, dp);
  const double w = mode == LocationMode::kExponential ? 0.5 : obs_drr;
  LocationBelief out;
  out.offset.x = w * obs_offset.x + (1.0 - w) * prior.x;
  out.offset.y = w * obs_offset.y + (1.0 - w) * prior.y;
  out.drr = obs_drr;
  return out;
}

LocationBelief update_location_belief_silent(const LocationBelief& prev, const PoseDelta& dp) {
  LocationBelief out;
  out.offset = pose_transform(prev.offset, dp);
  out.drr = 0.0;
  return out;
}

}  // namespace savnav
