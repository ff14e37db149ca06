// SPDX-License-Identifier: Apache-2.0
//
// nfsec - near-field secure hybrid precoding simulator
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// ------------------------------------------------------------------------

#include "nfsec/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace nfsec
{
    using json = nlohmann::json;

    namespace
    {
        const std::vector<std::pair<ExperimentKind, std::string>> &kind_table()
        {
            static const std::vector<std::pair<ExperimentKind, std::string>> t = {
                {ExperimentKind::Beampattern, "beampattern"},
                {ExperimentKind::Constellation, "constellation"},
                {ExperimentKind::BerGrid, "ber-grid"},
                {ExperimentKind::BerSweep, "ber-sweep"},
                {ExperimentKind::SameDirection, "same-direction"},
                {ExperimentKind::SumrateMultipath, "sumrate-multipath"},
                {ExperimentKind::SecrecyRateSweep, "secrecy-rate-sweep"},
                {ExperimentKind::OutageCurve, "outage-curve"},
                {ExperimentKind::SecrecyMap, "secrecy-map"},
                {ExperimentKind::Validate, "validate"}};
            return t;
        }

        std::size_t line_of_offset(const std::string &text, std::size_t offset)
        {
            offset = std::min(offset, text.size());
            return std::size_t(std::count(text.begin(), text.begin() + std::ptrdiff_t(offset), '\n')) + 1;
        }

        // Typed access with key-path diagnostics. Lines are located by the first
        // occurrence of the quoted key, which is exact for the shipped presets.
        class Reader
        {
        public:
            explicit Reader(const std::string &text) : text_(text) {}

            std::size_t line_of(const std::string &key) const
            {
                const auto pos = text_.find("\"" + key + "\"");
                return pos == std::string::npos ? 0 : line_of_offset(text_, pos);
            }

            [[noreturn]] void fail(const std::string &path, const std::string &leaf, const std::string &msg) const
            {
                const std::size_t line = line_of(leaf);
                std::string where = line ? " (line " + std::to_string(line) + ")" : "";
                throw ParseError("config key '" + path + "'" + where + ": " + msg, line, path);
            }

            template <typename T>
            T as(const json &j, const std::string &path, const std::string &leaf) const
            {
                try
                {
                    return j.get<T>();
                }
                catch (const json::exception &e)
                {
                    fail(path, leaf, std::string("wrong type (") + j.type_name() + ")");
                }
            }

            template <typename T>
            std::optional<T> opt(const json &obj, const std::string &key, const std::string &prefix) const
            {
                if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null())
                    return std::nullopt;
                return as<T>(obj.at(key), prefix + key, key);
            }

            template <typename T>
            void read(const json &obj, const std::string &key, const std::string &prefix, T &dst) const
            {
                if (auto v = opt<T>(obj, key, prefix))
                    dst = *v;
            }

            Position3 position(const json &j, const std::string &path, const std::string &leaf) const
            {
                const auto v = as<std::vector<double>>(j, path, leaf);
                if (v.size() != 3)
                    fail(path, leaf, "position must have three coordinates");
                return {v[0], v[1], v[2]};
            }

            std::vector<Position3> positions(const json &obj, const std::string &key, const std::string &prefix) const
            {
                std::vector<Position3> out;
                if (!obj.is_object() || !obj.contains(key))
                    return out;
                const json &arr = obj.at(key);
                if (!arr.is_array())
                    fail(prefix + key, key, "expected a list of positions");
                for (std::size_t i = 0; i < arr.size(); ++i)
                    out.push_back(position(arr[i], prefix + key + "[" + std::to_string(i) + "]", key));
                return out;
            }

        private:
            const std::string &text_;
        };

        void apply_overrides(json &j, const ConfigOverrides &ov)
        {
            if (ov.seed)
                j["seed"] = *ov.seed;
            if (ov.output_dir)
                j["output_dir"] = *ov.output_dir;
            if (ov.slots)
                j["experiment"]["slots"] = *ov.slots;
            if (ov.trials)
                j["experiment"]["trials"] = *ov.trials;
            if (ov.kind)
                j["experiment"]["kind"] = *ov.kind;
            if (ov.grid)
            {
                j["experiment"]["grid"]["nx"] = ov.grid->first;
                j["experiment"]["grid"]["ny"] = ov.grid->second;
            }
            if (ov.full_scale)
            {
                j["geometry"]["rows"] = 40;
                j["geometry"]["cols"] = 40;
                j["geometry"].erase("spacing_m");
                j["n_rf"] = 40;
            }
        }
    }

    std::string to_string(ExperimentKind k)
    {
        for (const auto &[kind, name] : kind_table())
            if (kind == k)
                return name;
        return "unknown";
    }

    ExperimentKind parse_kind(const std::string &name)
    {
        for (const auto &[kind, n] : kind_table())
            if (n == name)
                return kind;
        throw ValidationError("unknown experiment kind '" + name + "'");
    }

    const std::vector<std::string> &experiment_kind_names()
    {
        static const std::vector<std::string> names = []
        {
            std::vector<std::string> v;
            for (const auto &p : kind_table())
                v.push_back(p.second);
            return v;
        }();
        return names;
    }

    ExperimentConfig parse_config(const std::string &text, const ConfigOverrides &ov)
    {
        json j;
        try
        {
            j = json::parse(text, nullptr, true, true);
        }
        catch (const json::parse_error &e)
        {
            const std::size_t line = line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1);
            throw ParseError("config syntax error at line " + std::to_string(line) + ": " + e.what(), line, "");
        }
        if (!j.is_object())
            throw ParseError("config root must be an object", 1, "");
        apply_overrides(j, ov);

        const Reader rd(text);
        ExperimentConfig cfg;
        std::vector<std::string> issues;
        static const json empty = json::object();
        auto section = [&](const char *key) -> const json &
        {
            if (!j.contains(key))
                return empty;
            if (!j.at(key).is_object())
                rd.fail(key, key, "expected an object");
            return j.at(key);
        };

        if (auto s = rd.opt<std::uint64_t>(j, "seed", ""))
            cfg.seed = *s;
        else
            issues.emplace_back("seed is required (no implicit entropy)");
        rd.read(j, "output_dir", "", cfg.output_dir);

        // geometry
        const json &g = section("geometry");
        int rows = 16, cols = 16;
        double carrier = 28e9;
        rd.read(g, "rows", "geometry.", rows);
        rd.read(g, "cols", "geometry.", cols);
        rd.read(g, "carrier_hz", "geometry.", carrier);
        cfg.scenario.geometry.n_rows = rows;
        cfg.scenario.geometry.n_cols = cols;
        cfg.scenario.geometry.carrier = carrier;
        cfg.scenario.geometry.spacing = carrier > 0.0 ? 0.5 * speed_of_light / carrier : 0.0;
        rd.read(g, "spacing_m", "geometry.", cfg.scenario.geometry.spacing);

        // position units
        std::string units = "dF";
        rd.read(j, "units", "", units);
        ArrayGeometry reference = cfg.scenario.geometry;
        if (j.contains("dF_reference"))
        {
            const json &r = j.at("dF_reference");
            rd.read(r, "rows", "dF_reference.", reference.n_rows);
            rd.read(r, "cols", "dF_reference.", reference.n_cols);
            reference.spacing = 0.5 * speed_of_light / reference.carrier;
            rd.read(r, "spacing_m", "dF_reference.", reference.spacing);
        }
        double dF = 1.0;
        try
        {
            dF = fraunhofer_distance(reference);
        }
        catch (const ValidationError &e)
        {
            issues.emplace_back(e.what());
        }
        if (units == "dF")
            cfg.length_unit = dF;
        else if (units == "m")
            cfg.length_unit = 1.0;
        else
            issues.emplace_back("units must be 'dF' or 'm'");
        cfg.dF_unit = dF;

        auto scaled = [&](std::vector<Position3> v)
        {
            for (auto &p : v)
                p *= cfg.length_unit;
            return v;
        };
        cfg.scenario.users = scaled(rd.positions(j, "users", ""));
        cfg.scenario.eavesdroppers = scaled(rd.positions(j, "eves", ""));
        if (j.contains("scatterers"))
        {
            const json &arr = j.at("scatterers");
            if (!arr.is_array())
                rd.fail("scatterers", "scatterers", "expected a list");
            for (std::size_t i = 0; i < arr.size(); ++i)
            {
                const std::string path = "scatterers[" + std::to_string(i) + "]";
                Scatterer s;
                if (!arr[i].contains("position"))
                    rd.fail(path + ".position", "scatterers", "missing");
                s.position = rd.position(arr[i].at("position"), path + ".position", "position") * cfg.length_unit;
                s.variance = 1.0;
                rd.read(arr[i], "variance", path + ".", s.variance);
                cfg.scenario.scatterers.push_back(s);
            }
        }
        int n_rf = int(cfg.scenario.users.size());
        rd.read(j, "n_rf", "", n_rf);
        cfg.scenario.n_rf = n_rf;
        rd.read(j, "fully_digital", "", cfg.fully_digital);
        if (cfg.fully_digital)
            cfg.scenario.n_rf = int(cfg.scenario.geometry.element_count());
        if (j.contains("modulations"))
        {
            for (const auto &name : rd.as<std::vector<std::string>>(j.at("modulations"), "modulations", "modulations"))
            {
                try
                {
                    cfg.scenario.modulations.push_back(ModulationScheme::parse(name));
                }
                catch (const ValidationError &e)
                {
                    issues.emplace_back(e.what());
                }
            }
        }

        // power
        const json &pw = section("power");
        PowerSpec &ps = cfg.power;
        rd.read(pw, "noise_dbm", "power.", ps.noise_dbm);
        ps.user_sinr_db = rd.opt<double>(pw, "user_sinr_db", "power.");
        rd.read(pw, "beta", "power.", ps.beta);
        ps.transmit_dbm = rd.opt<double>(pw, "transmit_dbm", "power.");
        ps.transmit_factor = rd.opt<double>(pw, "transmit_factor", "power.");
        ps.static_share = rd.opt<double>(pw, "static_share", "power.");
        rd.read(pw, "xi_rule", "power.", ps.xi_rule);
        rd.read(pw, "xi", "power.", ps.xi);

        cfg.scenario.noise_power = dbm_to_watts(ps.noise_dbm);
        if (ps.user_sinr_db && !ps.beta.empty())
            issues.emplace_back("give either power.user_sinr_db or power.beta, not both");
        if (ps.user_sinr_db)
            cfg.scenario.symbol_gains.assign(cfg.scenario.users.size(),
                                             std::sqrt(cfg.scenario.noise_power * db_to_linear(*ps.user_sinr_db)));
        else if (!ps.beta.empty())
            cfg.scenario.symbol_gains = ps.beta;
        else
            issues.emplace_back("power.user_sinr_db or power.beta is required");
        if (ps.transmit_factor && (ps.transmit_dbm || ps.static_share))
            issues.emplace_back("power.transmit_factor excludes power.transmit_dbm and power.static_share");
        if (ps.transmit_factor && !(*ps.transmit_factor > 1.0))
            issues.emplace_back("power.transmit_factor must exceed 1");
        if (ps.static_share && !(*ps.static_share > 0.0 && *ps.static_share < 1.0))
            issues.emplace_back("power.static_share must lie in (0, 1)");
        // resolved against the static ZF power once the precoder exists
        cfg.scenario.transmit_power = ps.transmit_dbm ? dbm_to_watts(*ps.transmit_dbm) : 1.0;
        static const std::vector<std::string> rules = {"bound", "mean", "exact", "fixed", "none"};
        if (std::find(rules.begin(), rules.end(), ps.xi_rule) == rules.end())
            issues.emplace_back("power.xi_rule must be one of bound, mean, exact, fixed, none");
        if (ps.xi_rule == "fixed" && !(ps.xi > 0.0))
            issues.emplace_back("power.xi must be positive with xi_rule 'fixed'");

        // experiment
        const json &ex = section("experiment");
        std::string kind;
        if (auto k = rd.opt<std::string>(ex, "kind", "experiment."))
        {
            try
            {
                cfg.kind = parse_kind(*k);
            }
            catch (const ValidationError &e)
            {
                issues.emplace_back(e.what());
            }
        }
        else
            issues.emplace_back("experiment.kind is required");
        long long slots = 1000, trials = 1, draws = 100;
        rd.read(ex, "slots", "experiment.", slots);
        rd.read(ex, "trials", "experiment.", trials);
        rd.read(ex, "draws", "experiment.", draws);
        if (slots < 1)
            issues.emplace_back("experiment.slots must be >= 1");
        if (trials < 1)
            issues.emplace_back("experiment.trials must be >= 1");
        if (draws < 1)
            issues.emplace_back("experiment.draws must be >= 1");
        cfg.slots = std::size_t(std::max(slots, 1LL));
        cfg.trials = std::size_t(std::max(trials, 1LL));
        cfg.draws = std::size_t(std::max(draws, 1LL));
        long long stream = 0, ray_user = 1;
        rd.read(ex, "stream", "experiment.", stream);
        rd.read(ex, "ray_user", "experiment.", ray_user);
        cfg.stream = Eigen::Index(stream);
        cfg.ray_user = Eigen::Index(ray_user);
        if (stream < 0 || std::size_t(stream) >= std::max<std::size_t>(cfg.scenario.users.size(), 1))
            issues.emplace_back("experiment.stream out of range");
        rd.read(ex, "rate_targets", "experiment.", cfg.rate_targets);
        for (double r : cfg.rate_targets)
            if (!(r >= 0.0))
            {
                issues.emplace_back("experiment.rate_targets must be non-negative");
                break;
            }
        rd.read(ex, "epsilon", "experiment.", cfg.epsilon);
        if (!(cfg.epsilon >= 0.0 && cfg.epsilon <= 1.0))
            issues.emplace_back("experiment.epsilon must lie in [0, 1]");
        rd.read(ex, "sinr_db", "experiment.", cfg.sinr_db);
        rd.read(ex, "ray_scales", "experiment.", cfg.ray_scales);
        rd.read(ex, "series_cap", "experiment.", cfg.series_cap);
        if (cfg.series_cap < 1)
            issues.emplace_back("experiment.series_cap must be >= 1");
        rd.read(ex, "path_counts", "experiment.", cfg.path_counts);
        cfg.probes = scaled(rd.positions(ex, "probes", "experiment."));
        if (ex.contains("grid"))
        {
            const json &gr = ex.at("grid");
            GridSpec &gs = cfg.grid;
            if (auto x = rd.opt<std::vector<double>>(gr, "x", "experiment.grid."))
            {
                if (x->size() != 2)
                    issues.emplace_back("experiment.grid.x must be [min, max]");
                else
                    std::tie(gs.x_min, gs.x_max) = std::pair((*x)[0], (*x)[1]);
            }
            if (auto y = rd.opt<std::vector<double>>(gr, "y", "experiment.grid."))
            {
                if (y->size() != 2)
                    issues.emplace_back("experiment.grid.y must be [min, max]");
                else
                    std::tie(gs.y_min, gs.y_max) = std::pair((*y)[0], (*y)[1]);
            }
            rd.read(gr, "z", "experiment.grid.", gs.z);
            rd.read(gr, "nx", "experiment.grid.", gs.nx);
            rd.read(gr, "ny", "experiment.grid.", gs.ny);
        }
        if (cfg.grid.nx < 1 || cfg.grid.ny < 1)
            issues.emplace_back("experiment.grid.nx and ny must be >= 1");
        if (ex.contains("sweep"))
        {
            const json &sw = ex.at("sweep");
            rd.read(sw, "variable", "experiment.sweep.", cfg.sweep.variable);
            rd.read(sw, "values", "experiment.sweep.", cfg.sweep.values);
            if (cfg.sweep.values.empty())
            {
                double from = 0, to = 0;
                int steps = 0;
                rd.read(sw, "from", "experiment.sweep.", from);
                rd.read(sw, "to", "experiment.sweep.", to);
                rd.read(sw, "steps", "experiment.sweep.", steps);
                for (int i = 0; i < steps; ++i)
                    cfg.sweep.values.push_back(steps == 1 ? from : from + (to - from) * i / (steps - 1));
            }
            if (cfg.sweep.variable != "pt_dbm" && cfg.sweep.variable != "delta_m")
                issues.emplace_back("experiment.sweep.variable must be 'pt_dbm' or 'delta_m'");
        }
        if (cfg.kind == ExperimentKind::SecrecyRateSweep && cfg.sweep.values.empty())
            issues.emplace_back("secrecy-rate-sweep needs experiment.sweep");
        if ((cfg.kind == ExperimentKind::BerSweep || cfg.kind == ExperimentKind::OutageCurve) && cfg.sinr_db.empty())
            issues.emplace_back(to_string(cfg.kind) + " needs experiment.sinr_db");
        if (cfg.kind == ExperimentKind::SameDirection)
        {
            if (cfg.ray_scales.empty())
                issues.emplace_back("same-direction needs experiment.ray_scales");
            if (cfg.ray_user < 0 || std::size_t(cfg.ray_user) >= cfg.scenario.users.size())
                issues.emplace_back("experiment.ray_user out of range");
        }

        try
        {
            cfg.scenario.validate();
        }
        catch (const ValidationError &e)
        {
            std::istringstream in(e.what());
            std::string line;
            std::getline(in, line); // header
            while (std::getline(in, line))
                issues.push_back(line.substr(line.find("- ") == std::string::npos ? 0 : line.find("- ") + 2));
        }
        if (!issues.empty())
        {
            std::string msg = "invalid configuration:";
            for (const auto &i : issues)
                msg += "\n  - " + i;
            throw ValidationError(msg);
        }
        cfg.canonical = j.dump();
        return cfg;
    }

    ExperimentConfig load_config(const std::string &path, const ConfigOverrides &ov)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw IoError("cannot read config file '" + path + "'");
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_config(ss.str(), ov);
    }

    std::vector<Position3> grid_points(const ExperimentConfig &cfg)
    {
        const GridSpec &g = cfg.grid;
        std::vector<Position3> pts;
        pts.reserve(std::size_t(g.nx) * std::size_t(g.ny));
        auto axis = [](double a, double b, int n, int i) { return n == 1 ? 0.5 * (a + b) : a + (b - a) * i / (n - 1); };
        for (int iy = 0; iy < g.ny; ++iy)
            for (int ix = 0; ix < g.nx; ++ix)
                pts.emplace_back(Position3(axis(g.x_min, g.x_max, g.nx, ix), axis(g.y_min, g.y_max, g.ny, iy), g.z) *
                                 cfg.length_unit);
        return pts;
    }
}
