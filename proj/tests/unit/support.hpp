#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "ergolab/phase_maps.hpp"

namespace ergolab::testing {

inline const double kPhi = (std::sqrt(5.0) - 1.0) / 2.0;
inline const double kSqrt2m1 = std::sqrt(2.0) - 1.0;

inline SmoothMap rotation(double alpha) { return SmoothMap(Rotation{alpha}); }
inline SmoothMap diffeo(double a, double b, int mode = 1) { return SmoothMap(CircleDiffeo{a, b, mode}); }
inline SmoothMap cat_map() { return SmoothMap(ToralAutomorphism{{2, 1, 1, 1}}); }
inline SmoothMap translation(double v1, double v2) { return SmoothMap(ToralTranslation{v1, v2}); }

/// x + 0.05 sin(4 pi x): sinks at 1/4 and 3/4, sources at 0 and 1/2.
inline SmoothMap two_sink_map() { return diffeo(0.0, 0.05 * 4.0 * std::numbers::pi, 2); }

inline IFSystem circle_ifs(std::vector<SmoothMap> maps, std::vector<double> probs = {}) {
  if (probs.empty()) probs.assign(maps.size(), 1.0 / static_cast<double>(maps.size()));
  return IFSystem(PhaseSpace::Circle, std::move(maps), std::move(probs));
}

inline IFSystem torus_ifs(std::vector<SmoothMap> maps, std::vector<double> probs = {}) {
  if (probs.empty()) probs.assign(maps.size(), 1.0 / static_cast<double>(maps.size()));
  return IFSystem(PhaseSpace::Torus2, std::move(maps), std::move(probs));
}

inline IFSystem theorem_b_ifs() { return torus_ifs({cat_map(), translation(kPhi, kSqrt2m1)}); }

}  // namespace ergolab::testing
