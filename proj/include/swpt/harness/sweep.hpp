// SPDX-License-Identifier: Apache-2.0
//
// swpt - sensing-assisted wireless power transfer toolkit
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef SWPT_HARNESS_SWEEP_HPP
#define SWPT_HARNESS_SWEEP_HPP

// Parameter sweeps over the CRB threshold, the transmit power budget and the
// array size, and their CSV rendering.

#include "simulation.hpp"

#include <cstdio>
#include <ostream>
#include <string>

namespace swpt::harness
{
    enum class SweepParam
    {
        none, // single operating point
        gamma,
        p_max_dbm,
        n_antennas
    };

    inline const char *to_string(SweepParam p)
    {
        switch (p)
        {
        case SweepParam::none:
            return "none";
        case SweepParam::gamma:
            return "gamma";
        case SweepParam::p_max_dbm:
            return "p_max_dbm";
        default:
            return "n_antennas";
        }
    }

    struct SweepSpec
    {
        SweepParam param = SweepParam::gamma;
        std::vector<double> values;
        std::vector<Scheme> schemes = all_schemes();

        void validate() const
        {
            if (values.empty())
                throw ConfigError("sweep: empty value list");
            if (param == SweepParam::none)
                throw ConfigError("sweep: no parameter selected");
            if (schemes.empty())
                throw ConfigError("sweep: no schemes selected");
            for (double v : values)
            {
                if (!std::isfinite(v))
                    throw ConfigError("sweep: non-finite value");
                if (param == SweepParam::gamma && !(v > 0.0))
                    throw ConfigError("sweep: gamma values must be positive");
                if (param == SweepParam::n_antennas && (v < 1.0 || v != std::floor(v)))
                    throw ConfigError("sweep: antenna counts must be positive integers");
            }
        }
    };

    struct SweepRow
    {
        SweepParam param = SweepParam::gamma;
        double value = 0.0;
        int n_tx = 0;
        int n_rx = 0;
        double p_max_dbm = 0.0;
        RunSummary summary;
    };

    struct SweepOptions
    {
        int trials = 0;          // 0 = config.trials
        int auto_gamma_trials = 0; // 0 = same as trials
        sdp::Options solver;
        bool keep_blocks = false;
    };

    namespace detail
    {
        inline SweepRow make_row(SweepParam p, double value, const ScenarioConfig &c, RunSummary s, bool keep)
        {
            if (!keep)
                s.blocks.clear();
            return SweepRow{p, value, c.n_tx, c.n_rx, c.p_max_dbm, std::move(s)};
        }
    }

    /// Proposed scheme at the configured threshold, or at the auto-selected one if none is set.
    inline RunSummary run_proposed(const BlockSimulator &sim, int trials, int auto_gamma_trials)
    {
        const auto &c = sim.config();
        const double g = c.gamma ? *c.gamma : auto_gamma(sim, gamma_grid_for(sim), auto_gamma_trials).gamma;
        return run_monte_carlo(sim, Scheme::proposed, g, trials);
    }

    /// One row per (value, scheme), in value order then scheme order.
    inline std::vector<SweepRow> sweep(const ScenarioConfig &config, const SweepSpec &spec,
                                       const SweepOptions &opt = {})
    {
        spec.validate();
        config.validate();
        const int trials = opt.trials > 0 ? opt.trials : config.trials;
        const int ag_trials = opt.auto_gamma_trials > 0 ? opt.auto_gamma_trials : trials;
        std::vector<SweepRow> rows;

        if (spec.param == SweepParam::gamma)
        {
            const BlockSimulator sim(config, opt.solver);
            // Schemes other than the proposed one do not depend on the threshold
            std::vector<std::optional<RunSummary>> fixed(all_schemes().size());
            for (double g : spec.values)
                for (Scheme s : spec.schemes)
                {
                    if (s == Scheme::proposed)
                    {
                        rows.push_back(detail::make_row(spec.param, g, config,
                                                        run_monte_carlo(sim, s, g, trials), opt.keep_blocks));
                        continue;
                    }
                    auto &cache = fixed[static_cast<std::size_t>(s)];
                    if (!cache)
                        cache = run_monte_carlo(sim, s, std::nullopt, trials);
                    rows.push_back(detail::make_row(spec.param, g, config, *cache, opt.keep_blocks));
                }
            return rows;
        }

        for (double v : spec.values)
        {
            ScenarioConfig c = config;
            if (spec.param == SweepParam::p_max_dbm)
                c.p_max_dbm = v;
            else
                c.n_tx = c.n_rx = static_cast<int>(v);
            c.validate();
            const BlockSimulator sim(c, opt.solver);
            for (Scheme s : spec.schemes)
            {
                RunSummary r = s == Scheme::proposed ? run_proposed(sim, trials, ag_trials)
                                                     : run_monte_carlo(sim, s, std::nullopt, trials);
                rows.push_back(detail::make_row(spec.param, v, c, std::move(r), opt.keep_blocks));
            }
        }
        return rows;
    }

    inline const char *csv_header()
    {
        return "sweep_param,sweep_value,scheme,estimator,n_tx,n_rx,p_max_dbm,gamma,tau_star,crb_unit,trials,"
               "min_avg_harvested_uw_mean,min_avg_harvested_uw_std,infeasible_count";
    }

    inline std::string format_number(double v, int digits)
    {
        if (std::isnan(v))
            return "nan";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.*g", digits, v);
        return buf;
    }

    inline std::string csv_row(const SweepRow &r)
    {
        const RunSummary &s = r.summary;
        const bool uses_sensing = s.scheme == Scheme::proposed || s.scheme == Scheme::equal_time;
        std::string out;
        out += to_string(r.param);
        out += ',' + format_number(r.value, 10);
        out += ',' + std::string(to_string(s.scheme));
        out += ',' + std::string(uses_sensing ? to_string(s.estimator) : "none");
        out += ',' + std::to_string(r.n_tx);
        out += ',' + std::to_string(r.n_rx);
        out += ',' + format_number(r.p_max_dbm, 10);
        out += ',' + format_number(s.scheme == Scheme::proposed ? s.gamma : not_applicable, 10);
        out += ',' + std::to_string(s.tau_star);
        out += ',' + format_number(uses_sensing ? s.crb_unit : not_applicable, 10);
        out += ',' + std::to_string(s.trials);
        out += ',' + format_number(s.mean_w * 1e6, 6);
        out += ',' + format_number(s.std_w * 1e6, 6);
        out += ',' + std::to_string(s.infeasible_count);
        return out;
    }

    inline void write_csv(std::ostream &os, const std::vector<SweepRow> &rows)
    {
        os << csv_header() << '\n';
        for (const auto &r : rows)
            os << csv_row(r) << '\n';
    }

    /// Standalone matplotlib script plotting the mean column of `csv_path` per scheme.
    inline std::string plot_script(const std::string &csv_path, const std::string &png_path)
    {
        std::string s;
        s += "#!/usr/bin/env python3\n";
        s += "import csv\nimport math\nimport matplotlib\nmatplotlib.use(\"Agg\")\n";
        s += "import matplotlib.pyplot as plt\n\n";
        s += "CSV = \"" + csv_path + "\"\nPNG = \"" + png_path + "\"\n\n";
        s += "series = {}\nparam = None\n";
        s += "with open(CSV, newline=\"\") as f:\n";
        s += "    for row in csv.DictReader(f):\n";
        s += "        param = row[\"sweep_param\"]\n";
        s += "        mean = float(row[\"min_avg_harvested_uw_mean\"])\n";
        s += "        if math.isnan(mean):\n            continue\n";
        s += "        series.setdefault(row[\"scheme\"], []).append((float(row[\"sweep_value\"]), mean))\n\n";
        s += "fig, ax = plt.subplots()\n";
        s += "for scheme, pts in series.items():\n";
        s += "    pts.sort()\n";
        s += "    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker=\"o\", label=scheme)\n";
        s += "if param == \"gamma\":\n    ax.set_xscale(\"log\")\n";
        s += "ax.set_xlabel(param)\nax.set_ylabel(\"min average harvested power (uW)\")\n";
        s += "ax.grid(True, which=\"both\", alpha=0.3)\nax.legend()\nfig.tight_layout()\nfig.savefig(PNG, dpi=150)\n";
        return s;
    }
}

#endif
