#include "schrodlab/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

const char* describe(const std::string& kind) {
    if (kind == "analyze") return "Type, convexity and curvature of the level set P = 1";
    if (kind == "exponents") return "Exponent tables and admissible intervals";
    if (kind == "kernel-decay") return "Kernel decay fit, evaluator comparison, scaling identity";
    if (kind == "dispersive") return "Lp-Lq decay of the free propagator on probe fields";
    if (kind == "resolvent") return "Resolvent identities and Lp-Lq bounds against Re lambda";
    if (kind == "integrated-group") return "Integrated group multipliers, Laplace identity, growth";
    if (kind == "potential") return "Born series, Strang evolution and growth with a potential";
    return "Run the full acceptance battery";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for higher-order Schrodinger operators"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "schrodlab 1.0");

    struct Sub {
        std::string kind;
        CLI::App* cmd;
        schrodlab::RunOptions opt;
        std::uint64_t seed = 0;
    };
    std::vector<Sub> subs;
    subs.reserve(schrodlab::experiment_kinds().size());
    for (const auto& kind : schrodlab::experiment_kinds()) {
        subs.push_back({kind, app.add_subcommand(kind, describe(kind)), {}, 0});
        auto& s = subs.back();
        auto* cfg = s.cmd->add_option("--config", s.opt.config_path, "TOML or JSON config")->check(CLI::ExistingFile);
        if (kind != "suite") cfg->required();
        s.cmd->add_option("--out", s.opt.out_dir, "output directory (default out/<subcommand>)");
        s.cmd->add_option("--seed", s.seed, "RNG seed, overrides the config");
        s.cmd->add_option("--threads", s.opt.threads, "worker threads (or SCHRODLAB_THREADS)")
            ->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : schrodlab::kExitRefused;
    }

    for (auto& s : subs) {
        if (!s.cmd->parsed()) continue;
        if (s.cmd->count("--seed")) s.opt.seed = s.seed;
        return schrodlab::run_command(s.kind, s.opt, std::cout, std::cerr);
    }
    return schrodlab::kExitRefused;
}
