// pvsde command-line tool. Every run prints one JSON object on stdout: the
// command summary on success, {"error": kind, "message": ...} on failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pvsde/config.hpp"
#include "pvsde/error.hpp"
#include "pvsde/parallel.hpp"
#include "pvsde/pipeline.hpp"

namespace {

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    std::map<std::string, std::string> inputs;  // config key -> path
    std::vector<std::string> set;
};

void print_error(std::string_view kind, const std::string& message) {
    std::cout << nlohmann::json{{"error", kind}, {"message", message}}.dump() << std::endl;
}

pvsde::RunConfig build_config(const Options& o) {
    pvsde::RunConfig config;
    if (!o.config.empty()) config = pvsde::load_config(o.config);
    for (const auto& assignment : o.set) {
        const auto eq = assignment.find('=');
        pvsde::require(eq != std::string::npos, pvsde::ErrorKind::Config,
                       "--set expects key=value, got '" + assignment + "'");
        pvsde::set_config_value(config, assignment.substr(0, eq), assignment.substr(eq + 1));
    }
    for (const auto& [key, path] : o.inputs)
        if (!path.empty()) pvsde::set_config_value(config, key, std::filesystem::absolute(path).string());
    if (o.seed) config.seed = *o.seed;
    config.validate();
    return config;
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "Key-value config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Master seed (overrides the config)");
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--set", o.set, "Override a config key, key=value (repeatable)");
}

void add_input(CLI::App* sub, Options& o, const std::string& name, const std::string& help) {
    sub->add_option("--" + name, o.inputs["input." + name], help);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Weather-driven Jacobi-diffusion PV forecasting"};
    app.require_subcommand(1);
    Options o;

    struct Command {
        const char* name;
        const char* help;
        std::vector<std::pair<const char*, const char*>> inputs;
    };
    const std::vector<Command> commands = {
        {"identify", "Identify hourly SDE parameters from PV telemetry", {{"pv", "PV CSV (timestamp,power_kw)"}}},
        {"train",
         "Train the weather-to-parameter ensemble",
         {{"params", "Identified parameters JSON"}, {"weather", "Hourly weather CSV"}}},
        {"predict",
         "Predict hourly parameters from weather",
         {{"model", "Trained model directory"}, {"weather", "Hourly weather CSV"}}},
        {"simulate", "Simulate forecast fans from parameters", {{"params", "Parameters JSON"}}},
        {"evaluate",
         "Score fans against measured PV",
         {{"fan", "Fan meta file or directory"}, {"pv", "PV CSV (timestamp,power_kw)"}}},
        {"synth", "Generate a synthetic dataset", {}},
        {"e2e", "Run identify, train, predict, simulate and evaluate on a dataset", {{"dataset", "Dataset directory"}}},
    };
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        add_common(sub, o);
        for (const auto& [name, help] : c.inputs) add_input(sub, o, name, help);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", e.what());
        return kExitUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const pvsde::RunConfig config = build_config(o);
        const pvsde::CommandResult result = pvsde::run_command(command, config, o.out);
        nlohmann::json report{{"command", command}, {"threads", pvsde::thread_count()}};
        report["outputs"] = nlohmann::json::array();
        for (const auto& p : result.outputs) report["outputs"].push_back(p.string());
        report["warnings"] = result.warnings;
        report["summary"] = result.summary;
        std::cout << report.dump(2) << std::endl;
        return EXIT_SUCCESS;
    } catch (const pvsde::Error& e) {
        print_error(pvsde::to_string(e.kind()), e.what());
        return kExitError;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return kExitInternal;
    }
}
