// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "nfsec/experiments.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <regex>

namespace
{
    struct Flags
    {
        std::string config;
        std::string out;
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> slots;
        std::optional<std::size_t> trials;
        std::string grid;
        bool full_scale = false;
    };

    int run(const std::string &kind, const Flags &f)
    {
        nfsec::ConfigOverrides ov;
        ov.kind = kind;
        ov.seed = f.seed;
        ov.slots = f.slots;
        ov.trials = f.trials;
        ov.full_scale = f.full_scale;
        if (!f.out.empty())
            ov.output_dir = f.out;
        if (!f.grid.empty())
        {
            static const std::regex re(R"((\d+)[xX](\d+))");
            std::smatch m;
            if (!std::regex_match(f.grid, m, re))
                throw nfsec::ValidationError("--grid expects <nx>x<ny>, got '" + f.grid + "'");
            ov.grid = std::make_pair(std::stoi(m[1]), std::stoi(m[2]));
        }
        const nfsec::ExperimentConfig cfg = nfsec::load_config(f.config, ov);
        const nfsec::ExperimentResult res = nfsec::run_experiment(cfg);
        for (const auto &p : nfsec::write_artifacts(res, cfg, cfg.output_dir))
            std::cout << p.string() << "\n";
        if (!res.passed)
        {
            std::cerr << "validation failed; see validate.csv\n";
            return 1;
        }
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Near-field AN-aided hybrid precoding experiments"};
    app.require_subcommand(1);
    Flags flags;
    std::string chosen;
    for (const std::string &kind : nfsec::experiment_kind_names())
    {
        CLI::App *sub = app.add_subcommand(kind, "run the " + kind + " experiment");
        sub->add_option("--config", flags.config, "experiment config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", flags.out, "output directory (overrides output_dir)");
        sub->add_option("--seed", flags.seed, "root seed");
        sub->add_option("--slots", flags.slots, "slots per trial")->check(CLI::PositiveNumber);
        sub->add_option("--trials", flags.trials, "independent trials")->check(CLI::PositiveNumber);
        sub->add_option("--grid", flags.grid, "grid resolution <nx>x<ny>");
        sub->add_flag("--full-scale", flags.full_scale, "switch to the 40x40 array with 40 RF chains");
        sub->callback([&chosen, kind] { chosen = kind; });
    }
    CLI11_PARSE(app, argc, argv);
    try
    {
        return run(chosen, flags);
    }
    catch (const nfsec::ParseError &e)
    {
        std::cerr << "parse error: " << e.what() << "\n";
    }
    catch (const nfsec::ValidationError &e)
    {
        std::cerr << e.what() << "\n";
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
    }
    return 2;
}
