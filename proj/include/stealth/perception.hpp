#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stealth/geometry.hpp"
#include "stealth/world.hpp"

namespace stealth {

/// Sight cone whose half-angle shrinks as 1/distance beyond a close-range
/// clamp, so targets right beside the observer are still seen.
/// A zero r_max denotes a sightless observer.
struct InverseDistanceCone {
  double theta_max = kPi / 2.0;
  double k = kPi / 2.0;
  double r_max = 12.0;
  double d_close = 1.0;

  bool blind() const { return r_max <= 0.0; }
  /// theta_max in (0, pi], k > 0, r_max > d_close > 0; blind cones are exempt.
  bool well_formed() const;
};

double half_angle(const InverseDistanceCone& model, double d);

struct ViewCone {
  std::string name;
  double half_angle = 0.0;
  double range = 0.0;
};

/// Union of fixed cones. The canonical set is normal/focused/peripheral/close.
struct MultiCone {
  std::vector<ViewCone> cones;

  static MultiCone four_cone_default();
  bool well_formed() const;
  /// Copy restricted to the named cone (the single fixed cone baseline).
  MultiCone only(std::string_view name) const;
};

using VisionModel = std::variant<InverseDistanceCone, MultiCone>;

/// Geometric acceptance only (angle and range), no occlusion.
bool in_view(const VisionModel& model, const Pose& observer, Point target);
bool can_see(const VisionModel& model, const GridMap& map, const Pose& observer, Point target);
/// Furthest range any part of the model reaches.
double max_range(const VisionModel& model);

struct HearingModel {
  double threshold = 1.0;
  double occlusion_factor = 0.5;
};

struct SoundEvent {
  Point position;
  double loudness = 0.0;  // audible radius in open space at threshold 1
  std::int64_t tick = 0;
  int source_agent = -1;
  friend bool operator==(const SoundEvent&, const SoundEvent&) = default;
};

enum class PerceptKind : std::uint8_t { Sight, Sound };

struct Percept {
  PerceptKind kind = PerceptKind::Sight;
  Point position;
  std::int64_t tick = 0;
};

inline constexpr double kHearingEpsilon = 0.001;

double received_loudness(const HearingModel& model, const GridMap& map, Point listener,
                         const SoundEvent& event);
std::vector<Percept> hear(const HearingModel& model, const GridMap& map, Point listener,
                          std::span<const SoundEvent> events);

enum class AwarenessPhase : std::uint8_t { Unaware, Suspicious, Alert, Searching };

struct AwarenessState {
  AwarenessPhase phase = AwarenessPhase::Unaware;
  std::optional<Point> focus;
  int ticks_since_stimulus = 0;
  friend bool operator==(const AwarenessState&, const AwarenessState&) = default;
};

struct AwarenessTuning {
  int lost_grace = 20;       // silent ticks before Alert becomes Searching, Suspicious becomes Unaware
  int search_give_up = 200;  // silent ticks before Searching becomes Unaware
};

AwarenessState update_awareness(const AwarenessState& state, std::span<const Percept> percepts,
                                const AwarenessTuning& tuning);

inline AwarenessState update_awareness(const AwarenessState& state,
                                       std::span<const Percept> percepts, int lost_grace) {
  return update_awareness(state, percepts, AwarenessTuning{lost_grace, AwarenessTuning{}.search_give_up});
}

std::string_view to_string(AwarenessPhase phase);

}  // namespace stealth
