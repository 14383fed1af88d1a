#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rig/error.hpp"
#include "rig/experiment.hpp"

namespace {

constexpr const char* kSubcommands[] = {"analytic", "simulate", "compare", "oracle", "asymptote"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inhomogeneous random intersection graph laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> out;
  for (const char* name : kSubcommands) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub->add_option("--config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--threads", threads, "worker threads for replicas")->check(CLI::PositiveNumber);
    sub->add_option("--out", out, "output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors count as config errors; --help exits 0.
    return app.exit(e) == 0 ? 0 : 1;
  }
  const std::string experiment = app.get_subcommands().front()->get_name();

  try {
    std::ifstream in(config_path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw rig::Error(rig::ErrorCode::ConfigError, std::string("malformed JSON in '") + config_path + "': " + e.what());
    }
    if (!j.is_object()) throw rig::Error(rig::ErrorCode::ConfigError, "config root must be a JSON object");
    j["experiment"] = experiment;
    if (seed) j["seed"] = *seed;
    if (threads) j["threads"] = *threads;
    if (out) j["out"] = *out;

    const rig::ExperimentConfig config = rig::parse_config(j);
    const rig::RunResult result = rig::run(config, std::cerr);
    std::cerr << "wrote " << (config.out / "summary.json").string() << '\n';
    return result.exit_code;
  } catch (const rig::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
