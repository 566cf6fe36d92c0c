#include "stealth/harness/commands.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <iostream>

#include "stealth/harness/server.hpp"
#include "stealth/metrics.hpp"
#include "stealth/trace.hpp"

namespace stealth::harness {

namespace {

struct CommandError : std::runtime_error {
  CommandError(std::string c, const std::string& m) : std::runtime_error(m), code(std::move(c)) {}
  std::string code;
};

std::map<std::string, double> parse_overrides(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const std::string& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw CommandError("bad_value", "--config expects key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
      throw CommandError("bad_value", "--config " + key + ": '" + text + "' is not a number");
    out[key] = v;
  }
  return out;
}

Scenario load_checked(const std::string& path, const std::map<std::string, double>& overrides) {
  Scenario s = load_scenario_file(path);
  (void)resolve_config(s, overrides);  // reject unknown keys before doing any work
  return s;
}

}  // namespace

int execute_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deterministic stealth AI simulation", "stealthsim"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed;
  std::vector<std::string> config;
  app.add_option("--seed", seed, "override the scenario seed");
  app.add_option("--config", config, "override a config entry, key=value (repeatable)")->take_all();

  std::string scenario_path, script_path, trace_path, metrics_path, static_dir, address = "127.0.0.1";
  std::int64_t ticks = 0;
  std::uint16_t port = 8080;

  auto* run = app.add_subcommand("run", "run headless and write trace + metrics");
  run->fallthrough();
  run->add_option("--scenario", scenario_path)->required();
  run->add_option("--script", script_path, "player input script");
  run->add_option("--ticks", ticks, "ticks to simulate (default: script length)");
  run->add_option("--trace", trace_path, "trace output (JSON lines)");
  run->add_option("--metrics", metrics_path, "metrics output (JSON)");

  auto* replay = app.add_subcommand("replay", "re-execute a trace and verify its hash");
  replay->fallthrough();
  replay->add_option("--trace", trace_path)->required();

  auto* serve_cmd = app.add_subcommand("serve", "start the websocket session service");
  serve_cmd->fallthrough();
  serve_cmd->add_option("--scenario", scenario_path)->required();
  serve_cmd->add_option("--port", port);
  serve_cmd->add_option("--address", address);
  serve_cmd->add_option("--static", static_dir, "directory served to plain HTTP requests");

  auto* validate = app.add_subcommand("validate", "parse a scenario and report errors");
  validate->fallthrough();
  validate->add_option("--scenario", scenario_path)->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    return 2;
  }

  try {
    const auto overrides = parse_overrides(config);
    if (*run) {
      const Scenario scenario = load_checked(scenario_path, overrides);
      const auto script = script_path.empty() ? std::vector<PlayerInput>{} : load_script_file(script_path);
      if (ticks <= 0 && script.empty()) throw CommandError("usage", "run needs --ticks or a non-empty --script");
      const std::uint64_t s = seed.value_or(scenario.seed);
      const auto result = run_headless(scenario, script, ticks, s, overrides);
      std::uint64_t hash = 0;
      if (!trace_path.empty()) {
        std::ofstream f(trace_path);
        if (!f) throw CommandError("io", "cannot write " + trace_path);
        TraceWriter w(f, scenario, s, overrides);
        for (const auto& r : result.records) w.add(r);
        hash = w.finish();
      } else {
        std::vector<std::string> lines;
        for (const auto& r : result.records) lines.push_back(tick_line(r));
        hash = trace_hash(lines);
      }
      const Metrics m = compute_metrics(result.records);
      if (!metrics_path.empty()) {
        std::ofstream f(metrics_path);
        if (!f) throw CommandError("io", "cannot write " + metrics_path);
        f << to_json(m).dump(2) << '\n';
      }
      out << "ticks " << result.records.size() << " hash " << hex64(hash) << " teleports " << m.teleports
          << '\n';
      return 0;
    }
    if (*replay) {
      const TraceFile t = read_trace_file(trace_path);
      const ReplayResult r = replay_trace(t);
      if (!r.match) throw CommandError("divergence", r.message);
      out << r.message << '\n';
      return 0;
    }
    if (*validate) {
      const Scenario s = load_checked(scenario_path, overrides);
      out << "ok: " << s.map.width() << "x" << s.map.height() << ", " << s.agents.size() << " npc(s), seed "
          << seed.value_or(s.seed) << '\n';
      return 0;
    }
    if (*serve_cmd) {
      ServeOptions opts;
      opts.address = address;
      opts.port = port;
      opts.scenario = load_checked(scenario_path, overrides);
      opts.seed = seed;
      opts.overrides = overrides;
      if (!static_dir.empty()) opts.static_root = static_dir;
      opts.stop_on_signal = true;
      Server server(std::move(opts));
      out << "serving on " << address << ":" << server.port() << std::endl;
      server.run();
      return 0;
    }
  } catch (const CommandError& e) {
    err << "error: " << e.code << ": " << e.what() << '\n';
    return 1;
  } catch (const ScenarioError& e) {
    err << "error: " << e.code() << ": " << (e.line() > 0 ? "line " + std::to_string(e.line()) + ": " : "")
        << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: runtime: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace stealth::harness
