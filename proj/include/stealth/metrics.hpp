#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "stealth/sim.hpp"
#include "stealth/trace.hpp"

namespace stealth {

inline constexpr std::int64_t kNeverDetected = -1;  // shown as "inf"

struct CoverageSample {
  std::int64_t tick = 0;
  int epoch = 0;
  double coverage = 0.0;
};

struct AgentMetrics {
  int id = 0;
  std::string kind;
  std::int64_t first_detection = kNeverDetected;  // first tick the NPC was Alert
  std::vector<CoverageSample> canvass;             // one sample per tick a canvass ran
  std::int64_t follow_ticks = 0;                   // ticks in the Follow skill (buddy)
  std::int64_t follow_available = 0;               // ...of which with a usable position
  int max_post_rays = 0;
  double mean_post_rays = 0.0;
  std::map<std::string, std::int64_t> skill_ticks;
};

struct Metrics {
  std::int64_t ticks = 0;
  std::vector<AgentMetrics> agents;
  std::vector<int> post_rays_per_tick;  // summed over NPCs
  int teleports = 0;
  int player_hits = 0;
};

Metrics compute_metrics(std::span<const TickRecord> records);
Json to_json(const Metrics& m);

}  // namespace stealth
