#include "stealth/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace stealth {

Metrics compute_metrics(std::span<const TickRecord> records) {
  if (records.empty()) throw std::invalid_argument("metrics need at least one tick");
  Metrics m;
  m.ticks = static_cast<std::int64_t>(records.size());
  for (const AgentRecord& a : records.front().agents) {
    if (a.kind == "player") continue;
    m.agents.push_back({});
    m.agents.back().id = a.id;
    m.agents.back().kind = a.kind;
  }
  std::vector<std::int64_t> ray_sum(m.agents.size(), 0);

  for (const TickRecord& t : records) {
    int rays = 0;
    std::size_t k = 0;
    for (const AgentRecord& a : t.agents) {
      if (a.kind == "player") continue;
      AgentMetrics& am = m.agents.at(k);
      if (am.first_detection == kNeverDetected && a.phase == AwarenessPhase::Alert) am.first_detection = t.tick;
      if (a.canvass_unseen >= 0) {
        const double cov = a.canvass_initial > 0
                               ? 1.0 - static_cast<double>(a.canvass_unseen) / a.canvass_initial
                               : 1.0;
        am.canvass.push_back({t.tick, a.canvass_epoch, cov});
      }
      if (a.kind == "buddy" && a.skill == SkillId::Follow) {
        ++am.follow_ticks;
        if (a.follow_usable > 0) ++am.follow_available;
      }
      am.max_post_rays = std::max(am.max_post_rays, a.post_rays);
      ray_sum[k] += a.post_rays;
      rays += a.post_rays;
      if (a.alive && a.skill) ++am.skill_ticks[std::string(to_string(*a.skill))];
      ++k;
    }
    m.post_rays_per_tick.push_back(rays);
  }
  for (std::size_t k = 0; k < m.agents.size(); ++k)
    m.agents[k].mean_post_rays = static_cast<double>(ray_sum[k]) / static_cast<double>(m.ticks);
  m.teleports = records.back().teleports;
  m.player_hits = records.back().player_hits;
  return m;
}

Json to_json(const Metrics& m) {
  Json agents = Json::array();
  for (const AgentMetrics& a : m.agents) {
    Json coverage = Json::array();
    for (const CoverageSample& s : a.canvass) coverage.push_back({s.tick, s.epoch, s.coverage});
    Json j{{"id", a.id},
           {"kind", a.kind},
           {"first_detection", a.first_detection == kNeverDetected ? Json("inf") : Json(a.first_detection)},
           {"canvass_coverage", std::move(coverage)},
           {"post_rays_max", a.max_post_rays},
           {"post_rays_mean", a.mean_post_rays},
           {"skill_occupancy", a.skill_ticks}};
    if (a.kind == "buddy")
      j["follow_availability"] =
          a.follow_ticks > 0 ? static_cast<double>(a.follow_available) / static_cast<double>(a.follow_ticks) : 1.0;
    agents.push_back(std::move(j));
  }
  return {{"ticks", m.ticks},
          {"agents", std::move(agents)},
          {"post_rays_per_tick", m.post_rays_per_tick},
          {"teleports", m.teleports},
          {"player_hits", m.player_hits}};
}

}  // namespace stealth
