#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "stealth/sim.hpp"

namespace stealth {

using Json = nlohmann::json;

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ull);
std::string hex64(std::uint64_t v);

Json to_json(const PlayerInput& in);
PlayerInput input_from_json(const Json& j);  // throws std::invalid_argument on malformed input
Json to_json(const AgentRecord& r);
Json to_json(const TickRecord& r);
Json to_json(const SoundEvent& e);

/// Line-delimited JSON trace: a header line, one line per tick, a footer line
/// holding the hash over every tick line (bytes plus newline).
class TraceWriter {
 public:
  TraceWriter(std::ostream& out, const Scenario& scenario, std::uint64_t seed,
              const std::map<std::string, double>& overrides);
  void add(const TickRecord& record);
  /// Writes the footer and returns the trace hash.
  std::uint64_t finish();
  std::uint64_t hash() const { return hash_; }
  std::int64_t records() const { return count_; }

 private:
  std::ostream& out_;
  std::uint64_t hash_;
  std::int64_t count_ = 0;
};

Json trace_header(const Scenario& scenario, std::uint64_t seed, const std::map<std::string, double>& overrides);
std::string tick_line(const TickRecord& record);

struct TraceFile {
  Json header;
  std::vector<std::string> ticks;  // raw lines, as written
  std::optional<Json> footer;
};

TraceFile read_trace(std::istream& in);
TraceFile read_trace_file(const std::string& path);

/// Hash over the tick lines of a trace as written.
std::uint64_t trace_hash(const std::vector<std::string>& tick_lines);

struct ReplayResult {
  bool match = false;
  std::optional<std::int64_t> first_divergent_tick;
  std::string message;
  std::uint64_t recorded_hash = 0;
  std::uint64_t replayed_hash = 0;
};

/// Re-executes the header's scenario with the recorded inputs and compares
/// every tick line, then the footer hash.
ReplayResult replay_trace(const TraceFile& trace);

}  // namespace stealth
