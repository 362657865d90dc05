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

#ifndef SWPT_HARNESS_SIMULATION_HPP
#define SWPT_HARNESS_SIMULATION_HPP

// One transmission block of the two-stage protocol, per scheme, and Monte-Carlo
// aggregation over seeded trials.

#include "../energy_design.hpp"
#include "../sensing_design.hpp"
#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

namespace swpt::harness
{
    inline constexpr double not_applicable = std::numeric_limits<double>::quiet_NaN();

    struct BlockResult
    {
        Scheme scheme = Scheme::proposed;
        EstimatorKind estimator = EstimatorKind::crb_sampled;
        bool feasible = true;
        int tau = 0;
        double gamma = not_applicable;
        double crb_unit = not_applicable;
        double crb_at_tau = not_applicable;
        std::vector<double> harvested_w;   // per-ER h_k^H R h_k with true channels
        double min_avg_harvested_w = 0.0;  // ((T - tau) / T) min_k harvested_w
        std::vector<double> angle_error_rad;
        std::vector<Complex> gain_error;
        std::uint64_t trial = 0;
        std::uint64_t seed = 0;
    };

    class BlockSimulator
    {
    public:
        explicit BlockSimulator(ScenarioConfig cfg, const sdp::Options &solver = {})
            : cfg_(std::move(cfg)), geom_(cfg_.geometry()), priors_(cfg_.priors()), solver_(solver)
        {
            cfg_.validate();
            prior_targets_ = prior_targets(priors_, geom_, cfg_.rho0());
            sensing_ = optimize_sensing_covariance(prior_targets_, cfg_.p_max(), cfg_.noise_var(), solver_);
        }

        const ScenarioConfig &config() const { return cfg_; }
        const ArrayGeometry &geometry() const { return geom_; }
        const std::vector<PriorEstimate> &priors() const { return priors_; }
        const TargetSet &prior_target_set() const { return prior_targets_; }
        const SensingCovariance &sensing() const { return sensing_; }
        double crb_unit() const { return sensing_.crb_unit; }

        std::uint64_t trial_seed(std::uint64_t trial) const { return derive_seed(cfg_.seed, trial); }

        // Current-block ER positions drawn inside the prior error box
        std::vector<ErGroundTruth> draw_truth(std::uint64_t trial_seed) const
        {
            std::mt19937_64 rng(derive_seed(trial_seed, 1));
            auto draw = [&](double bound)
            {
                if (bound <= 0.0)
                    return 0.0;
                if (cfg_.error_distribution == ErrorDistribution::uniform)
                    return std::uniform_real_distribution<double>(-bound, bound)(rng);
                std::normal_distribution<double> n(0.0, bound / 2.0);
                for (;;)
                {
                    const double v = n(rng);
                    if (std::abs(v) <= bound)
                        return v;
                }
            };
            std::vector<ErGroundTruth> truth;
            for (const auto &p : priors_)
            {
                const double dtheta = draw(p.angle_bound_rad);
                const double dd = draw(p.distance_bound_m);
                truth.push_back({p.angle_bar_rad + dtheta, p.distance_bar_m + dd, p.rcs});
            }
            return truth;
        }

        TargetSet truth_targets(const std::vector<ErGroundTruth> &truth) const
        {
            TargetSet t;
            t.geometry = geom_;
            for (const auto &er : truth)
            {
                t.angles.push_back(er.angle_rad);
                t.gains.push_back(path_gain(geom_, er, cfg_.rho0()));
            }
            return t;
        }

        /// Simulate one block of `scheme`. gamma is required for the proposed scheme.
        BlockResult run_block(Scheme scheme, std::uint64_t trial, std::optional<double> gamma = std::nullopt) const
        {
            BlockResult r;
            r.scheme = scheme;
            r.estimator = cfg_.estimator;
            r.trial = trial;
            r.seed = trial_seed(trial);

            const auto truth = draw_truth(r.seed);
            std::vector<ComplexVector> channels;
            for (const auto &er : truth)
                channels.push_back(channel(geom_, er, cfg_.rho0()));
            const int horizon = cfg_.horizon_symbols;
            const double p_max = cfg_.p_max();

            auto score = [&](const HermitianMatrix &r_x, int tau)
            {
                r.tau = tau;
                r.harvested_w.clear();
                for (const auto &h : channels)
                    r.harvested_w.push_back(harvested_power(h, r_x));
                r.min_avg_harvested_w = min_avg_harvested(channels, r_x, tau, horizon);
            };

            switch (scheme)
            {
            case Scheme::perfect:
                score(optimize_energy_covariance(channels, p_max, solver_).r_x, 0);
                return r;
            case Scheme::isotropic:
                score(isotropic_covariance(geom_.n_tx, p_max), 0);
                return r;
            case Scheme::proposed:
            case Scheme::equal_time:
                break;
            }

            r.crb_unit = sensing_.crb_unit;
            int tau = 0;
            if (scheme == Scheme::proposed)
            {
                if (!gamma)
                    throw std::invalid_argument("run_block: the proposed scheme needs a CRB threshold");
                r.gamma = *gamma;
                const auto t = minimal_duration(sensing_.crb_unit, *gamma, geom_.n_tx, horizon);
                if (!t)
                {
                    r.feasible = false;
                    r.min_avg_harvested_w = 0.0;
                    return r;
                }
                tau = *t;
            }
            else
                tau = (horizon + 1) / 2;
            r.crb_at_tau = sensing_.crb_unit / tau;

            const TargetSet truth_set = truth_targets(truth);
            const std::uint64_t noise_seed = derive_seed(r.seed, 2);
            EstimationResult est;
            if (cfg_.estimator == EstimatorKind::ml)
            {
                const WaveformBlock x = synthesize_waveform(sensing_.s_x, tau);
                const EchoBlock y = generate_echo(x, truth_set, cfg_.noise_var(), noise_seed);
                est = estimate_ml(y, x, priors_, geom_);
            }
            else
            {
                const Fim fim = assemble_fim(truth_set, sensing_.s_x, tau, cfg_.noise_var());
                est = estimate_crb_sampled(truth_set, fim, noise_seed);
            }

            std::vector<ComplexVector> csi;
            for (std::size_t k = 0; k < truth.size(); ++k)
            {
                r.angle_error_rad.push_back(est.theta_hat[k] - truth[k].angle_rad);
                r.gain_error.push_back(est.alpha_hat[k] - truth_set.gains[k]);
                Complex a = est.alpha_hat[k];
                if (!(std::abs(a) > 0.0))
                    a = Complex(std::numeric_limits<double>::min(), 0.0);
                csi.push_back(construct_csi(geom_, a, est.theta_hat[k], truth[k].rcs, cfg_.rho0()));
            }
            score(optimize_energy_covariance(csi, p_max, solver_).r_x, tau);
            return r;
        }

    private:
        ScenarioConfig cfg_;
        ArrayGeometry geom_;
        std::vector<PriorEstimate> priors_;
        sdp::Options solver_;
        TargetSet prior_targets_;
        SensingCovariance sensing_;
    };

    struct RunSummary
    {
        Scheme scheme = Scheme::proposed;
        EstimatorKind estimator = EstimatorKind::crb_sampled;
        double gamma = not_applicable;
        int tau_star = 0;
        double crb_unit = not_applicable;
        int trials = 0;
        int infeasible_count = 0;
        // statistics of min_avg_harvested over feasible trials (watts); NaN if none
        double mean_w = not_applicable;
        double median_w = not_applicable;
        double std_w = not_applicable;
        std::vector<BlockResult> blocks;

        bool feasible() const { return infeasible_count < trials; }
    };

    // Statistics are computed over trials in index order, so results do not depend on execution order
    inline RunSummary summarize(Scheme scheme, std::vector<BlockResult> blocks)
    {
        RunSummary s;
        s.scheme = scheme;
        s.trials = static_cast<int>(blocks.size());
        std::sort(blocks.begin(), blocks.end(), [](const BlockResult &a, const BlockResult &b)
                  { return a.trial < b.trial; });
        std::vector<double> v;
        for (const auto &b : blocks)
        {
            if (!b.feasible)
                ++s.infeasible_count;
            else
                v.push_back(b.min_avg_harvested_w);
        }
        if (!blocks.empty())
        {
            const auto &b0 = blocks.front();
            s.estimator = b0.estimator;
            s.gamma = b0.gamma;
            s.crb_unit = b0.crb_unit;
            s.tau_star = b0.feasible ? b0.tau : 0;
        }
        if (!v.empty())
        {
            const double n = static_cast<double>(v.size());
            double sum = 0.0;
            for (double x : v)
                sum += x;
            s.mean_w = sum / n;
            double ss = 0.0;
            for (double x : v)
                ss += (x - s.mean_w) * (x - s.mean_w);
            s.std_w = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
            std::vector<double> sorted = v;
            std::sort(sorted.begin(), sorted.end());
            const std::size_t m = sorted.size() / 2;
            s.median_w = sorted.size() % 2 ? sorted[m] : 0.5 * (sorted[m - 1] + sorted[m]);
        }
        s.blocks = std::move(blocks);
        return s;
    }

    inline RunSummary run_monte_carlo(const BlockSimulator &sim, Scheme scheme, std::optional<double> gamma,
                                      int trials)
    {
        std::vector<BlockResult> blocks;
        blocks.reserve(trials);
        for (int t = 0; t < trials; ++t)
            blocks.push_back(sim.run_block(scheme, static_cast<std::uint64_t>(t), gamma));
        return summarize(scheme, std::move(blocks));
    }

    /// Log-spaced thresholds whose minimal durations span [N_t, T].
    inline std::vector<double> default_gamma_grid(double crb_unit, int n_tx, int horizon, int points = 12)
    {
        const double lo = crb_unit / horizon;
        const double hi = crb_unit / n_tx;
        std::vector<double> g;
        if (points <= 1)
            return {hi};
        for (int i = 0; i < points; ++i)
            g.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1)));
        return g;
    }

    struct AutoGammaResult
    {
        double gamma = not_applicable;
        std::vector<RunSummary> evaluated; // one per grid point, grid order
    };

    /// Threshold maximizing the mean min-average harvested power of the proposed
    /// scheme; ties go to the smaller threshold.
    inline AutoGammaResult auto_gamma(const BlockSimulator &sim, std::vector<double> grid, int trials)
    {
        if (grid.empty())
            throw std::invalid_argument("auto_gamma: empty grid");
        std::sort(grid.begin(), grid.end());
        AutoGammaResult out;
        double best = -std::numeric_limits<double>::infinity();
        for (double g : grid)
        {
            RunSummary s = run_monte_carlo(sim, Scheme::proposed, g, trials);
            if (s.feasible() && s.mean_w > best)
            {
                best = s.mean_w;
                out.gamma = g;
            }
            s.blocks.clear();
            out.evaluated.push_back(std::move(s));
        }
        if (!(best > -std::numeric_limits<double>::infinity()))
            throw InfeasibleError("auto_gamma: no threshold in the grid is feasible");
        return out;
    }

    inline std::vector<double> gamma_grid_for(const BlockSimulator &sim)
    {
        const auto &c = sim.config();
        return c.gamma_grid.empty() ? default_gamma_grid(sim.crb_unit(), c.n_tx, c.horizon_symbols) : c.gamma_grid;
    }
}

#endif
