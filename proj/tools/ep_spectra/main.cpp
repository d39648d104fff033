// ep-spectra: command-line front end for the epspectra library.
//
// Every subcommand writes <out>/<command>.json (the deterministic payload),
// zero or more <out>/<command>_<table>.csv files, and
// <out>/<command>.manifest.json with the configuration echo, versions, seed
// and wall time. Exit codes: 0 success, 2 invalid input, 3 numerical failure.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "commands.hpp"
#include "epspectra/errors.hpp"
#include "epspectra/parallel.hpp"
#include "report_io.hpp"

#ifndef EPSPECTRA_VERSION_STRING
#define EPSPECTRA_VERSION_STRING "unknown"
#endif

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitNumerical = 3;

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exceptional-point spectral experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", EPSPECTRA_VERSION_STRING);
  app.set_config("--config", "", "TOML or INI configuration file");

  std::string out_dir = ".";
  std::string format = "all";
  std::uint64_t seed = 0;
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  app.add_option("--format", format, "json, csv or all")
      ->check(CLI::IsMember({"json", "csv", "all"}))
      ->capture_default_str();
  app.add_option("--seed", seed, "Seed for random perturbations")->capture_default_str();
  app.option_defaults()->always_capture_default();

  const auto commands = ep_cli::register_commands(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  const ep_cli::Command* selected = nullptr;
  for (const auto& c : commands) {
    if (c.app->parsed()) selected = &c;
  }
  if (!selected) {
    std::cerr << "no subcommand given\n";
    return kExitInvalid;
  }

  const auto start = std::chrono::steady_clock::now();
  const std::string started_at = utc_now();
  ep_cli::CommandOutput result;
  try {
    result = selected->run(ep_cli::RunContext{seed});
  } catch (const epspectra::DomainError& e) {
    std::cerr << selected->name << ": invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const epspectra::NumericalError& e) {
    std::cerr << selected->name << ": numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << selected->name << ": " << e.what() << '\n';
    return kExitNumerical;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  ep_cli::json payload = {{"schema_version", ep_cli::kSchemaVersion}, {"command", selected->name}};
  payload.update(result.payload);

  const std::filesystem::path dir(out_dir);
  ep_cli::json outputs = ep_cli::json::array();
  try {
    if (format != "csv") {
      const auto path = dir / (selected->name + ".json");
      ep_cli::write_text(path, payload.dump(2) + "\n");
      outputs.push_back(path.filename().string());
    }
    if (format != "json") {
      for (const auto& table : result.tables) {
        const auto path = dir / (selected->name + "_" + table.name + ".csv");
        ep_cli::write_csv(path, table);
        outputs.push_back(path.filename().string());
      }
    }
    const ep_cli::json manifest = {
        {"schema_version", ep_cli::kSchemaVersion},
        {"command", selected->name},
        {"config", selected->app->config_to_str(true, false)},
        {"global", {{"out", out_dir}, {"format", format}, {"seed", seed}}},
        {"seed", seed},
        {"versions",
         {{"epspectra", EPSPECTRA_VERSION_STRING},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"compiler", __VERSION__}}},
        {"threads", epspectra::worker_count()},
        {"started_at", started_at},
        {"wall_time_seconds", wall},
        {"outputs", outputs}};
    ep_cli::write_text(dir / (selected->name + ".manifest.json"), manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << selected->name << ": " << e.what() << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}
