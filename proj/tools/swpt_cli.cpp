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


// Command-line front end: Monte-Carlo runs, sweeps and CRB evaluation for a
// scenario config. CSV goes to --out (default stdout).

#include <swpt/swpt.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace
{
    using namespace swpt;
    using namespace swpt::harness;

    struct Common
    {
        std::string config_path;
        std::optional<std::uint64_t> seed;
        std::optional<int> trials;
        std::optional<std::string> scheme;
        std::optional<std::string> estimator;
        std::string out;
        bool emit_plot = false;
        std::vector<double> values;
    };

    ScenarioConfig load(const Common &c)
    {
        ScenarioConfig cfg = c.config_path.empty() ? ScenarioConfig{} : load_config(c.config_path);
        if (c.seed)
            cfg.seed = *c.seed;
        if (c.trials)
            cfg.trials = *c.trials;
        if (c.scheme)
            cfg.scheme = *c.scheme;
        if (c.estimator)
            cfg.estimator = parse_estimator(*c.estimator);
        cfg.validate();
        return cfg;
    }

    void emit(const Common &c, const std::string &text)
    {
        if (c.out.empty())
        {
            std::cout << text;
            return;
        }
        std::ofstream f(c.out, std::ios::binary);
        if (!f)
            throw ConfigError("cannot write '" + c.out + "'");
        f << text;
    }

    void emit_rows(const Common &c, const std::vector<SweepRow> &rows)
    {
        std::ostringstream os;
        write_csv(os, rows);
        emit(c, os.str());
        if (!c.emit_plot)
            return;
        if (c.out.empty())
            throw ConfigError("--emit-plot needs --out");
        std::string stem = c.out;
        if (const auto dot = stem.rfind('.'); dot != std::string::npos && stem.find('/', dot) == std::string::npos)
            stem.erase(dot);
        std::ofstream f(stem + "_plot.py");
        f << plot_script(c.out, stem + ".png");
    }

    void add_common(CLI::App *sub, Common &c, bool sweep_values)
    {
        sub->add_option("--config", c.config_path, "scenario config file (defaults apply if omitted)");
        sub->add_option("--seed", c.seed, "master seed");
        sub->add_option("--trials", c.trials, "Monte-Carlo trials per point")->check(CLI::PositiveNumber);
        sub->add_option("--scheme", c.scheme, "proposed|perfect|isotropic|equal-time|all");
        sub->add_option("--estimator", c.estimator, "ml|crb-sampled");
        sub->add_option("--out", c.out, "output CSV path");
        sub->add_flag("--emit-plot", c.emit_plot, "write a matplotlib script next to the CSV");
        if (sweep_values)
            sub->add_option("--values", c.values, "swept values (comma separated)")->delimiter(',');
    }

    int cmd_run(const Common &c)
    {
        const ScenarioConfig cfg = load(c);
        const BlockSimulator sim(cfg);
        std::vector<SweepRow> rows;
        for (Scheme s : parse_schemes(cfg.scheme))
        {
            RunSummary r = s == Scheme::proposed ? run_proposed(sim, cfg.trials, cfg.trials)
                                                 : run_monte_carlo(sim, s, std::nullopt, cfg.trials);
            r.blocks.clear();
            rows.push_back({SweepParam::none, not_applicable, cfg.n_tx, cfg.n_rx, cfg.p_max_dbm, std::move(r)});
        }
        emit_rows(c, rows);
        return 0;
    }

    int cmd_sweep(const Common &c, SweepParam param)
    {
        const ScenarioConfig cfg = load(c);
        SweepSpec spec;
        spec.param = param;
        spec.schemes = parse_schemes(cfg.scheme);
        spec.values = c.values;
        if (spec.values.empty())
        {
            if (param == SweepParam::gamma)
                spec.values = cfg.gamma_grid.empty()
                                  ? default_gamma_grid(BlockSimulator(cfg).crb_unit(), cfg.n_tx, cfg.horizon_symbols)
                                  : cfg.gamma_grid;
            else if (param == SweepParam::p_max_dbm)
                spec.values = {20.0, 25.0, 30.0, 35.0};
            else
                spec.values = {4.0, 8.0, 12.0, 16.0};
        }
        emit_rows(c, sweep(cfg, spec));
        return 0;
    }

    int cmd_auto_gamma(const Common &c)
    {
        const ScenarioConfig cfg = load(c);
        const BlockSimulator sim(cfg);
        const auto grid = c.values.empty() ? gamma_grid_for(sim) : c.values;
        const AutoGammaResult res = auto_gamma(sim, grid, cfg.trials);
        std::vector<SweepRow> rows;
        for (const auto &s : res.evaluated)
            rows.push_back({SweepParam::gamma, s.gamma, cfg.n_tx, cfg.n_rx, cfg.p_max_dbm, s});
        emit_rows(c, rows);
        std::cerr << "gamma_star = " << format_number(res.gamma, 10) << '\n';
        return 0;
    }

    // CRB at the prior estimates (what the design uses) and at one drawn truth
    int cmd_crb_eval(const Common &c)
    {
        const ScenarioConfig cfg = load(c);
        const BlockSimulator sim(cfg);
        const auto &sens = sim.sensing();
        std::ostringstream os;
        os << "quantity,value\n";
        os << "crb_unit," << format_number(sens.crb_unit, 10) << '\n';
        os << "sdp_objective," << format_number(sens.sdp_objective, 10) << '\n';
        os << "solver_iterations," << sens.solution.iterations << '\n';
        os << "isotropic_crb_unit,"
           << format_number(crb_trace(assemble_fim(sim.prior_target_set(), isotropic_covariance(cfg.n_tx, cfg.p_max()),
                                                   1.0, cfg.noise_var())),
                            10)
           << '\n';
        if (cfg.gamma)
        {
            const auto d = design_sensing(sens, *cfg.gamma, cfg.n_tx, cfg.horizon_symbols);
            os << "gamma," << format_number(*cfg.gamma, 10) << '\n';
            os << "tau_star," << (d ? d->tau : 0) << '\n';
            os << "feasible," << (d ? 1 : 0) << '\n';
            if (d)
            {
                os << "crb_at_tau_prior," << format_number(d->crb_at_tau, 10) << '\n';
                const TargetSet truth = sim.truth_targets(sim.draw_truth(sim.trial_seed(0)));
                const Fim fim = assemble_fim(truth, sens.s_x, d->tau, cfg.noise_var());
                os << "crb_at_tau_truth_trial0," << format_number(crb_trace(fim), 10) << '\n';
                const RealVector per = crb_per_parameter(fim);
                for (int i = 0; i < per.size(); ++i)
                    os << "crb_param_" << i << "," << format_number(per(i), 10) << '\n';
            }
        }
        emit(c, os.str());
        return 0;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"swpt: sensing-assisted wireless power transfer simulator"};
    app.require_subcommand(1);

    Common c;
    auto *run = app.add_subcommand("run", "Monte-Carlo run at the configured operating point");
    auto *sg = app.add_subcommand("sweep-gamma", "sweep the CRB threshold");
    auto *sp = app.add_subcommand("sweep-power", "sweep the transmit power budget (dBm)");
    auto *sa = app.add_subcommand("sweep-antennas", "sweep N = n_tx = n_rx");
    auto *ag = app.add_subcommand("auto-gamma", "pick the threshold maximizing the proposed scheme");
    auto *ce = app.add_subcommand("crb-eval", "report CRB quantities of the sensing design");
    add_common(run, c, false);
    add_common(sg, c, true);
    add_common(sp, c, true);
    add_common(sa, c, true);
    add_common(ag, c, true);
    add_common(ce, c, false);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (run->parsed())
            return cmd_run(c);
        if (sg->parsed())
            return cmd_sweep(c, SweepParam::gamma);
        if (sp->parsed())
            return cmd_sweep(c, SweepParam::p_max_dbm);
        if (sa->parsed())
            return cmd_sweep(c, SweepParam::n_antennas);
        if (ag->parsed())
            return cmd_auto_gamma(c);
        return cmd_crb_eval(c);
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
