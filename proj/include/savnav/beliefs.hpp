#pragma once
// Recursive belief filters for the sounding-object class and the egocentric
// goal location. Egocentric frame: +x along the heading, +y to the agent's
// left; this convention is shared with acoustics and agents.

#include "savnav/matrix.hpp"

namespace savnav {

struct ClassBelief {
  Vec scores;  // 21 entries in [0,1]
  int last_update_step = -1;
};

/// Uniform 1/21 prior.
ClassBelief initial_class_belief();

/// Observed: (1-delta)*obs + delta*prev, stamped with `step`.
ClassBelief update_class_belief(const ClassBelief& prev, const Vec& obs, int step,
                                double delta = 0.5);
/// Silent step: the latest estimate is kept as-is (stamp included).
ClassBelief update_class_belief_silent(const ClassBelief& prev);

struct EgoOffset {
  double x = 0.0;
  double y = 0.0;
};

struct LocationBelief {
  EgoOffset offset;  // metres, current egocentric frame
  double drr = 0.0;
};

struct PoseDelta {
  double tx = 0.0;  // translation in the previous egocentric frame (integer metres)
  double ty = 0.0;
  int rotation_deg = 0;  // 0, +-90, 180
};

/// Transports an offset across a pose change: R(-dtheta) * (l - t).
/// Exact (no trig) for the four cardinal rotations.
EgoOffset pose_transform(const EgoOffset& prev, const PoseDelta& dp);

enum class LocationMode { kExponential, kDynamic };

/// Observed: delta_eff*lhat + (1-delta_eff)*transported prior, where delta_eff
/// is 0.5 (exponential) or the DRR estimate (dynamic).
LocationBelief update_location_belief(const LocationBelief& prev, const EgoOffset& obs_offset,
                                      double obs_drr, const PoseDelta& dp, LocationMode mode);
/// Silent: transported prior; DRR pinned to 0.
LocationBelief update_location_belief_silent(const LocationBelief& prev, const PoseDelta& dp);

}  // namespace savnav
