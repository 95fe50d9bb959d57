#include "lab/runner.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <map>
#include <string>

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for holomorphic semiflows and weighted composition semigroups"};
    app.require_subcommand(1);

    const std::map<std::string, std::string> about{
        {"flow-trace", "Trajectory of one orbit with its z-derivative"},
        {"flow-check", "Semigroup identity, disc invariance and generator round-trip"},
        {"cocycle-check", "Cocycle identity and weight generator round-trip"},
        {"generator-check", "First-order decay of the generator consistency ladder"},
        {"coboundary-check", "Similarity of a coboundary semigroup to the composition semigroup"},
        {"transfer-check", "Conjugation of a semigroup through a conformal map"},
        {"gpv", "Pseudo-disc separation and derivative bound for a Blaschke product"},
        {"bloch-gap", "Case (1) Bloch-gap witness against strong continuity"},
        {"bloch-gap-auto", "Case (2) Bloch-gap witness for automorphism families"},
        {"separability", "Uniform Bloch gaps between rotations of a Blaschke product"},
    };

    std::string config, out;
    std::uint64_t seed = 0;
    for (const auto& name : semiflow::lab::subcommands()) {
        const auto it = about.find(name);
        auto* sub = app.add_subcommand(name, it == about.end() ? "" : it->second);
        sub->add_option("--config", config, "Experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "Output directory")->required();
        sub->add_option("--seed", seed, "Seed for random test points");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    const auto rep = semiflow::lab::run(name, config, out, seed);
    for (const auto& v : rep.verdicts)
        std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << ": " << v.detail << '\n';
    if (!rep.error_kind.empty()) std::cerr << rep.error_kind << ": " << rep.error_message << '\n';
    std::cout << (rep.passed() ? "passed" : "failed") << " (" << rep.wall_clock << " s)\n";
    return semiflow::lab::exit_code(rep);
}
