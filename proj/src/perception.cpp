#include "stealth/perception.hpp"

#include <algorithm>
#include <cmath>

namespace stealth {

namespace {

double deg(double d) { return d * kPi / 180.0; }

}  // namespace

bool InverseDistanceCone::well_formed() const {
  if (blind()) return true;
  return theta_max > 0.0 && theta_max <= kPi && k > 0.0 && d_close > 0.0 && r_max > d_close;
}

double half_angle(const InverseDistanceCone& model, double d) {
  if (d > model.r_max) return 0.0;
  if (d <= model.d_close) return model.theta_max;
  return std::min(model.theta_max, model.k / d);
}

MultiCone MultiCone::four_cone_default() {
  return MultiCone{{{"normal", deg(30.0), 10.0},
                    {"focused", deg(15.0), 14.0},
                    {"peripheral", deg(80.0), 4.0},
                    {"close", deg(180.0), 1.5}}};
}

bool MultiCone::well_formed() const {
  static constexpr std::string_view kNames[] = {"normal", "focused", "peripheral", "close"};
  if (cones.size() != 4) return false;
  for (std::size_t i = 0; i < 4; ++i) {
    if (cones[i].name != kNames[i]) return false;
    if (!(cones[i].range > 0.0)) return false;
    if (cones[i].half_angle < 0.0 || cones[i].half_angle > kPi) return false;
  }
  return true;
}

MultiCone MultiCone::only(std::string_view name) const {
  MultiCone out;
  for (const auto& c : cones)
    if (c.name == name) out.cones.push_back(c);
  return out;
}

bool in_view(const VisionModel& model, const Pose& observer, Point target) {
  const double d = distance(observer.position, target);
  const double offset = offset_from_heading(observer, target);
  if (const auto* cone = std::get_if<InverseDistanceCone>(&model)) {
    if (cone->blind() || d > cone->r_max) return false;
    return offset <= half_angle(*cone, d) + kAngleEps;
  }
  const auto& multi = std::get<MultiCone>(model);
  return std::any_of(multi.cones.begin(), multi.cones.end(), [&](const ViewCone& c) {
    return d <= c.range && offset <= c.half_angle + kAngleEps;
  });
}

bool can_see(const VisionModel& model, const GridMap& map, const Pose& observer, Point target) {
  if (!in_view(model, observer, target)) return false;
  return line_clear(map, observer.position, target, RayHeight::Stand);
}

double max_range(const VisionModel& model) {
  if (const auto* cone = std::get_if<InverseDistanceCone>(&model)) return std::max(0.0, cone->r_max);
  double r = 0.0;
  for (const auto& c : std::get<MultiCone>(model).cones) r = std::max(r, c.range);
  return r;
}

double received_loudness(const HearingModel& model, const GridMap& map, Point listener,
                         const SoundEvent& event) {
  const double d = distance(listener, event.position);
  double loudness = event.loudness;
  if (!line_clear(map, event.position, listener, RayHeight::Stand))
    loudness *= model.occlusion_factor;
  return loudness / std::max(d, kHearingEpsilon);
}

std::vector<Percept> hear(const HearingModel& model, const GridMap& map, Point listener,
                          std::span<const SoundEvent> events) {
  std::vector<Percept> out;
  for (const auto& e : events) {
    if (received_loudness(model, map, listener, e) >= model.threshold)
      out.push_back({PerceptKind::Sound, e.position, e.tick});
  }
  return out;
}

AwarenessState update_awareness(const AwarenessState& state, std::span<const Percept> percepts,
                                const AwarenessTuning& tuning) {
  const Percept* sight = nullptr;
  const Percept* sound = nullptr;
  for (const auto& p : percepts) {
    if (p.kind == PerceptKind::Sight) sight = &p;
    else sound = &p;
  }

  AwarenessState next = state;
  if (sight) {
    next.phase = AwarenessPhase::Alert;
    next.focus = sight->position;
    next.ticks_since_stimulus = 0;
    return next;
  }

  switch (state.phase) {
    case AwarenessPhase::Unaware:
      if (sound) {
        next.phase = AwarenessPhase::Suspicious;
        next.focus = sound->position;
        next.ticks_since_stimulus = 0;
      }
      return next;

    case AwarenessPhase::Suspicious:
    case AwarenessPhase::Searching:
      if (sound) {
        next.focus = sound->position;
        next.ticks_since_stimulus = 0;
        return next;
      }
      ++next.ticks_since_stimulus;
      if (state.phase == AwarenessPhase::Suspicious
              ? next.ticks_since_stimulus > tuning.lost_grace
              : next.ticks_since_stimulus > tuning.search_give_up) {
        next = AwarenessState{};
      }
      return next;

    case AwarenessPhase::Alert:
      // Hearing keeps the focus fresh but only sight resets the lost-track clock.
      if (sound) next.focus = sound->position;
      ++next.ticks_since_stimulus;
      if (next.ticks_since_stimulus > tuning.lost_grace) {
        next.phase = AwarenessPhase::Searching;
        next.ticks_since_stimulus = 0;
      }
      return next;
  }
  return next;
}

std::string_view to_string(AwarenessPhase phase) {
  switch (phase) {
    case AwarenessPhase::Unaware: return "unaware";
    case AwarenessPhase::Suspicious: return "suspicious";
    case AwarenessPhase::Alert: return "alert";
    case AwarenessPhase::Searching: return "searching";
  }
  return "unaware";
}

}  // namespace stealth
