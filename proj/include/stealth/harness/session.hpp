#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stealth/sim.hpp"
#include "stealth/trace.hpp"

namespace stealth::harness {

struct OverlayToggles {
  bool cones = false;
  bool posts = false;
  bool canvass = false;
  bool follow = false;
};

/// One live session: owns its simulation exclusively and knows nothing about
/// the transport. The server feeds it client messages and asks it to tick.
class Session {
 public:
  Session(Scenario scenario, std::optional<std::uint64_t> seed = std::nullopt,
          std::map<std::string, double> overrides = {});

  /// Handles one client message; returns the messages to send back (meta,
  /// error). Malformed messages produce an error reply and change nothing.
  std::vector<Json> handle(const std::string& text);

  /// Advances one tick with the latest input unless paused; returns the snapshot.
  std::optional<Json> tick();

  bool paused() const { return paused_; }
  bool greeted() const { return greeted_; }
  double tick_rate() const { return scenario_.tick_rate; }
  const Simulation& sim() const { return sim_; }
  const OverlayToggles& overlays() const { return overlays_; }
  /// Inputs actually applied, one per simulated tick since the last reset.
  const std::vector<PlayerInput>& applied_inputs() const { return applied_; }

  Json meta() const;
  Json snapshot(const TickRecord& record) const;

 private:
  Json error(const std::string& message) const;

  Scenario scenario_;
  std::map<std::string, double> overrides_;
  Simulation sim_;
  PlayerInput input_;
  OverlayToggles overlays_;
  bool paused_ = false;
  bool greeted_ = false;
  std::vector<PlayerInput> applied_;
};

}  // namespace stealth::harness
