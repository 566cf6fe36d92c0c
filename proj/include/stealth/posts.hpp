#pragma once

#include <array>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stealth/geometry.hpp"
#include "stealth/world.hpp"

namespace stealth {

enum class PostKind : std::uint8_t { Cover, Open };

struct Post {
  int id = 0;
  Cell cell;
  Point position;      // cell center
  PostKind kind = PostKind::Open;
  Point cover_normal;  // Cover only: from the cover cell into the post cell
  CellKind source_cover = CellKind::Free;  // Cover only: LowCover or Wall
};

enum class RayPurpose : std::uint8_t { ThreatStand, ThreatCrouch, Approach, Exposure };

std::string_view to_string(RayPurpose purpose);

struct ValidationRay {
  RayPurpose purpose = RayPurpose::ThreatStand;
  RayHeight height = RayHeight::Stand;
  RayOutcome outcome = RayOutcome::Clear;
};

struct PostValidation {
  std::array<ValidationRay, 4> rays{};  // threat_stand, threat_crouch, approach, exposure
  bool valid = false;          // behavioural rule
  bool literal_valid = false;  // kept unless all four rays came back rejected

  const ValidationRay& ray(RayPurpose p) const { return rays[static_cast<std::size_t>(p)]; }
};

inline constexpr int kRaysPerPost = 4;

struct EvaluatedPost {
  Post post;
  PostValidation validation;
};

struct PostsConfig {
  int max_cover = 20;
  int max_open = 20;
  double cover_radius = 16.0;
  double open_r_min = 3.0;
  double open_r_max = 6.0;
  double exclusion_radius = 2.0;  // rho for the not-near-player path criterion
  double band_min = 3.0;
  double band_max = 9.0;
  double band_falloff = 6.0;
  double ally_separation = 3.0;
  double approach_scale = 8.0;
  double exposure_offset = 0.5;
};

/// Everything a criterion may look at. Distance fields are optional caches;
/// when absent, path queries fall back to find_path.
struct SelectionContext {
  Pose npc;
  Pose player;
  const GridMap* map = nullptr;
  Point threat;
  std::vector<Cell> recent_posts;
  std::vector<Point> allies;
  PostsConfig config;

  std::shared_ptr<const DistanceField> npc_field;   // from the NPC, unrestricted
  std::shared_ptr<const DistanceField> safe_field;  // from the NPC, avoiding the player zone
};

SelectionContext make_context(const GridMap& map, const Pose& npc, const Pose& player,
                              const PostsConfig& config);

/// Cells whose centers lie within the exclusion radius of the player.
CellMask near_player_mask(const GridMap& map, Point player, double radius);

/// Fills the two distance-field caches on the context.
void prepare_paths(SelectionContext& ctx);

std::vector<Post> generate_posts(const GridMap& map, const SelectionContext& ctx);

PostValidation validate_post(const GridMap& map, const Post& post, const SelectionContext& ctx);

using CriterionFn = std::function<double(const EvaluatedPost&, const SelectionContext&)>;

struct Criterion {
  std::string id;
  CriterionFn evaluate;
};

class CriterionRegistry {
 public:
  void add(Criterion c);
  const Criterion* find(std::string_view id) const;
  std::vector<std::string> ids() const;
  /// The eight shipped criteria.
  static const CriterionRegistry& defaults();

 private:
  std::map<std::string, Criterion, std::less<>> criteria_;
};

struct PostSelector {
  std::string name;
  std::vector<std::string> criteria;
};

/// take-cover, flank, advance, hide, investigate
const std::vector<PostSelector>& default_selectors();
const PostSelector* find_selector(std::string_view name);
bool selector_resolves(const PostSelector& selector, const CriterionRegistry& registry);

struct PostRating {
  int post_id = 0;
  double rating = 0.0;
  std::vector<double> values;  // per criterion, selector order
};

/// Invalid posts are skipped. Sorted by rating descending, ties by lowest id.
std::vector<PostRating> rate_posts(const PostSelector& selector, std::span<const EvaluatedPost> posts,
                                   const SelectionContext& ctx,
                                   const CriterionRegistry& registry = CriterionRegistry::defaults());

/// Top post with a positive rating, skipping any excluded ids.
std::optional<int> select_post(std::span<const PostRating> ratings,
                               std::span<const int> excluded = {});

/// 1.0 when some shortest NPC->post path keeps every waypoint farther than
/// the exclusion radius from the player; 0.0 when no such path exists.
double criterion_static_pathfind_not_near_player(const EvaluatedPost& post, const SelectionContext& ctx);

/// Shortest path length from the NPC to a cell, using the cache when present.
double npc_path_length(const SelectionContext& ctx, Cell target);

}  // namespace stealth
