#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "debond/config.hpp"
#include "debond/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"debond - quasistatic membrane debonding: cohesive and sharp evolutions "
                 "with a sharpening-limit study harness"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string plots = "default";

    const std::vector<std::string> verbs = {"run-cohesive", "run-brittle", "limit-study",
                                            "audit", "oracle"};
    for (const auto& verb : verbs) {
        CLI::App* sub = app.add_subcommand(verb);
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_dir, "output directory (default: config output.dir)");
        sub->add_option("--seed", seed, "seed override");
        sub->add_option("--threads", threads, "independent runs executed concurrently");
        sub->add_option("--plots", plots, "on/off (default: config output.plots)")
            ->check(CLI::IsMember({"on", "off", "default"}));
    }

    CLI11_PARSE(app, argc, argv);
    const std::string verb = app.get_subcommands().front()->get_name();

    try {
        const debond::RunConfig cfg = debond::parse_config_file(config_path);
        debond::RunOptions opts;
        opts.out_dir = out_dir;
        if (app.get_subcommands().front()->count("--seed") > 0) {
            opts.seed = seed;
            opts.seed_overridden = true;
        }
        opts.threads = threads;
        if (plots != "default") opts.plots = plots == "on";

        const debond::RunOutcome outcome = debond::run_command(verb, cfg, opts);
        for (const auto& f : outcome.failures) std::fprintf(stderr, "error: %s\n", f.c_str());
        std::fprintf(outcome.exit_code == 0 ? stdout : stderr, "%s: %s (outputs in %s)\n",
                     verb.c_str(), outcome.exit_code == 0 ? "ok" : "FAILED",
                     outcome.out_dir.c_str());
        return outcome.exit_code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
