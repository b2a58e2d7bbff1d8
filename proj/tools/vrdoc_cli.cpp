// vrdoc: scenario generation, trace generation, offline runs, replay checks,
// mode comparison and the live session service.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>

#include "vrdoc/harness.hpp"
#include "vrdoc/json_io.hpp"
#include "vrdoc/reader.hpp"
#include "vrdoc/scenario.hpp"
#include "vrdoc/server.hpp"
#include "vrdoc/session.hpp"

namespace {

using namespace vrdoc;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigFlags {
  std::vector<std::string> sets;
  std::string mode;

  void add(CLI::App* app) {
    app->add_option("--set", sets, "Engine config override key=value (repeatable; beats the scenario file)");
    app->add_option("--mode", mode, "Interaction mode")->check(CLI::IsMember({"vrdoc", "baseline"}));
  }

  void apply(EngineConfig& c) const {
    try {
      for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + kv + "'");
        apply_override(c, kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (!mode.empty()) apply_override(c, "mode", mode);
      c.validate();
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  }
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

Scenario load_scenario(const std::string& path, const ConfigFlags& flags) {
  auto in = open_in(path);
  Scenario s;
  try {
    s = io::read_scenario(in);
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  flags.apply(s.config);
  return s;
}

std::vector<GazeSample> load_trace(const std::string& path) {
  auto in = open_in(path);
  try {
    return io::read_trace(in);
  } catch (const ParseError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const Json& j) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    open_out(path) << j.dump(2) << '\n';
  }
}

std::string events_text(const std::vector<InteractionEvent>& events) {
  std::ostringstream os;
  io::write_events(os, events);
  return os.str();
}

struct ReaderFlags {
  std::uint64_t seed = 1;
  double noise = 0.8;
  double blink_rate = 0.2;
  int rereads = 2;

  void add(CLI::App* app) {
    app->add_option("--reader-seed", seed, "Reader random seed");
    app->add_option("--noise", noise, "RMS gaze noise in degrees (0, or 0.5 to 1.1)");
    app->add_option("--blink-rate", blink_rate, "Blinks per second");
    app->add_option("--rereads", rereads, "Documents reread after the first pass");
  }

  ReaderModel model() const {
    ReaderModel r;
    r.seed = seed;
    r.noise_std_deg = noise;
    r.blink_rate_hz = blink_rate;
    r.rereads = rereads;
    try {
      r.validate();
    } catch (const GenerationError& e) {
      throw UsageError(e.what());
    }
    return r;
  }
};

int serve(int port, int http_port, const std::string& demo_dir) {
  SessionManager sessions;
  TcpServer tcp(sessions);
  const int bound = tcp.listen(port);
  std::cerr << "session service listening on 127.0.0.1:" << bound << " (tcp, ndjson)\n";
  if (http_port < 0) {
    tcp.serve();
    return kOk;
  }
  tcp.start();
  httplib::Server http;
  http.Post("/v1/messages", [&](const httplib::Request& req, httplib::Response& res) {
    std::istringstream in(req.body);
    std::string out;
    for (std::string line; std::getline(in, line);) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      for (const auto& m : sessions.handle(line)) out += m.dump() + "\n";
    }
    res.set_content(out, "application/x-ndjson");
  });
  if (!demo_dir.empty() && !http.set_mount_point("/", demo_dir)) {
    throw UsageError("demo directory '" + demo_dir + "' does not exist");
  }
  std::cerr << "http endpoint on 127.0.0.1:" << http_port << " (POST /v1/messages)\n";
  if (!http.listen("127.0.0.1", http_port)) throw std::runtime_error("cannot listen on http port");
  tcp.stop();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Headless gaze-interaction engine for reading documents in VR"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "vrdoc 1.0");

  // scenario
  auto* sc = app.add_subcommand("scenario", "Write a task scenario file");
  std::string task_name;
  std::uint64_t seed = 1;
  std::string out_path;
  ConfigFlags sc_flags;
  sc->add_option("--task", task_name, "Task layout")->required()->check(CLI::IsMember({"T1", "T2", "T3", "T4"}));
  sc->add_option("--seed", seed, "Passage seed");
  sc->add_option("-o,--output", out_path, "Output path (default stdout)");
  sc_flags.add(sc);

  // gen-trace
  auto* gt = app.add_subcommand("gen-trace", "Generate a synthetic reader gaze trace");
  std::string scenario_path;
  ConfigFlags gt_flags;
  ReaderFlags reader_flags;
  gt->add_option("-s,--scenario", scenario_path, "Scenario file")->required();
  gt->add_option("-o,--output", out_path, "Trace output (JSON lines)")->required();
  gt_flags.add(gt);
  reader_flags.add(gt);

  // run
  auto* rn = app.add_subcommand("run", "Run a trace through the engine");
  std::string trace_path;
  std::string metrics_path;
  ConfigFlags rn_flags;
  rn->add_option("-s,--scenario", scenario_path, "Scenario file")->required();
  rn->add_option("-t,--trace", trace_path, "Trace file")->required();
  rn->add_option("-o,--output", out_path, "Event log output")->required();
  rn->add_option("--metrics", metrics_path, "Metrics JSON output");
  rn_flags.add(rn);

  // replay
  auto* rp = app.add_subcommand("replay", "Re-run a trace and diff against an event log");
  std::string events_path;
  ConfigFlags rp_flags;
  rp->add_option("-s,--scenario", scenario_path, "Scenario file")->required();
  rp->add_option("-t,--trace", trace_path, "Trace file")->required();
  rp->add_option("-e,--events", events_path, "Event log to check")->required();
  rp_flags.add(rp);

  // metrics
  auto* mt = app.add_subcommand("metrics", "Compute run metrics for a trace");
  ConfigFlags mt_flags;
  mt->add_option("-s,--scenario", scenario_path, "Scenario file")->required();
  mt->add_option("-t,--trace", trace_path, "Trace file")->required();
  mt->add_option("-o,--output", out_path, "Metrics output (default stdout)");
  mt_flags.add(mt);

  // compare
  auto* cp = app.add_subcommand("compare", "Paired VRDoc and baseline metrics");
  std::vector<std::string> tasks;
  std::vector<std::string> scenario_paths;
  int jobs = 1;
  ConfigFlags cp_flags;
  ReaderFlags cp_reader;
  cp->add_option("--task", tasks, "Task layouts (repeatable)")->check(CLI::IsMember({"T1", "T2", "T3", "T4"}));
  cp->add_option("-s,--scenario", scenario_paths, "Scenario files (repeatable)");
  cp->add_option("--seed", seed, "Passage seed for --task");
  cp->add_option("-j,--jobs", jobs, "Parallel runs")->check(CLI::PositiveNumber);
  cp->add_option("-o,--output", out_path, "Output path (default stdout)");
  cp_flags.add(cp);
  cp_reader.add(cp);

  // serve
  auto* sv = app.add_subcommand("serve", "Start the live session service");
  int port = 7878;
  int http_port = -1;
  std::string demo_dir;
  sv->add_option("--port", port, "TCP port for newline-delimited JSON (0 picks one)");
  sv->add_option("--http-port", http_port, "Also accept POST /v1/messages on this port");
  sv->add_option("--demo", demo_dir, "Serve static files from this directory over HTTP");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*sc) {
      EngineConfig cfg;
      sc_flags.apply(cfg);
      const Scenario s = build_task_scenario(*parse_task(task_name), seed, cfg);
      write_json(out_path, io::to_json(s));
    } else if (*gt) {
      const Scenario s = load_scenario(scenario_path, gt_flags);
      const auto trace = generate_trace(s, reader_flags.model(), s.config.mode);
      auto out = open_out(out_path);
      io::write_trace(out, trace.samples);
    } else if (*rn) {
      const Scenario s = load_scenario(scenario_path, rn_flags);
      const auto result = run(s, load_trace(trace_path));
      open_out(out_path) << events_text(result.events);
      if (!metrics_path.empty()) write_json(metrics_path, io::to_json(result.metrics));
    } else if (*rp) {
      const Scenario s = load_scenario(scenario_path, rp_flags);
      const auto result = run(s, load_trace(trace_path));
      auto in = open_in(events_path);
      std::istringstream fresh(events_text(result.events));
      std::string a, b;
      for (std::size_t line = 1;; ++line) {
        const bool ha = static_cast<bool>(std::getline(in, a));
        const bool hb = static_cast<bool>(std::getline(fresh, b));
        if (!ha && !hb) break;
        if (ha != hb || a != b) {
          std::cerr << "replay diverges at line " << line << "\n  recorded: " << (ha ? a : "<end of log>")
                    << "\n  replayed: " << (hb ? b : "<end of log>") << '\n';
          return kFailure;
        }
      }
      std::cerr << "replay matches (" << result.events.size() << " events)\n";
    } else if (*mt) {
      const Scenario s = load_scenario(scenario_path, mt_flags);
      write_json(out_path, io::to_json(run(s, load_trace(trace_path)).metrics));
    } else if (*cp) {
      std::vector<Scenario> scenarios;
      for (const auto& p : scenario_paths) scenarios.push_back(load_scenario(p, cp_flags));
      for (const auto& t : tasks) {
        EngineConfig cfg;
        cp_flags.apply(cfg);
        scenarios.push_back(build_task_scenario(*parse_task(t), seed, cfg));
      }
      if (scenarios.empty()) throw UsageError("compare needs at least one --task or --scenario");
      const ReaderModel reader = cp_reader.model();
      std::vector<ModeComparison> results(scenarios.size());
      std::vector<std::string> errors(scenarios.size());
      std::atomic<std::size_t> next{0};
      auto worker = [&] {
        for (std::size_t i; (i = next++) < scenarios.size();) {
          try {
            results[i] = compare_modes(scenarios[i], reader);
          } catch (const std::exception& e) {
            errors[i] = e.what();
          }
        }
      };
      std::vector<std::thread> pool;
      for (int k = 1; k < std::min<int>(jobs, static_cast<int>(scenarios.size())); ++k) pool.emplace_back(worker);
      worker();
      for (auto& th : pool) th.join();
      Json arr = Json::array();
      for (std::size_t i = 0; i < scenarios.size(); ++i) {
        if (!errors[i].empty()) throw std::runtime_error(scenarios[i].name + ": " + errors[i]);
        arr.push_back(Json{{"scenario", scenarios[i].name},
                           {"vrdoc", io::to_json(results[i].vrdoc)},
                           {"baseline", io::to_json(results[i].baseline)}});
      }
      write_json(out_path, arr);
    } else if (*sv) {
      return serve(port, http_port, demo_dir);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
