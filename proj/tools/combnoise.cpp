#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "combnoise/app/commands.hpp"
#include "combnoise/app/config.hpp"

int main(int argc, char** argv)
{
    using namespace combnoise::app;

    CLI::App cli{"Quantum noise floors of frequency-comb measurements"};
    cli.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;
    unsigned threads = 1;

    for (const char* name : {"ofd-sweep", "dcs-advantage", "cyclo-trace", "validate"}) {
        auto* sub = cli.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config or a previous manifest.json");
        sub->add_option("--out", out_dir, "Output directory");
        sub->add_option("--seed", seed, "Override the config seed");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
    }

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = cli.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    RunConfig cfg;
    try {
        if (!config_path.empty()) {
            cfg = load_config(config_path);
        }
    } catch (const UsageError& e) {
        std::cerr << "combnoise: " << e.what() << '\n';
        return exit_usage;
    }
    if (seed) cfg.seed = *seed;
    if (format) cfg.format = *format;

    CommandOptions options;
    options.out_dir = out_dir;
    options.threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    return run_command(cli.get_subcommands().front()->get_name(), cfg, options);
}
