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

#ifndef SWPT_HARNESS_CONFIG_HPP
#define SWPT_HARNESS_CONFIG_HPP

// Scenario configuration: a flat "key = value" text file.
//
//   # comment
//   n_tx = 8
//   er_angle_deg = 0, 30, 60
//   gamma = auto
//
// Every key is a ScenarioConfig field; unknown or repeated keys are errors.
// Powers are given in dB/dBm and angles in degrees; the accessors convert to
// linear watts and radians.

#include "../array_channel.hpp"
#include "../echo_estimation.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace swpt::harness
{
    struct ConfigError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    enum class Scheme
    {
        proposed,
        perfect,
        isotropic,
        equal_time
    };

    inline const char *to_string(Scheme s)
    {
        switch (s)
        {
        case Scheme::proposed:
            return "proposed";
        case Scheme::perfect:
            return "perfect";
        case Scheme::isotropic:
            return "isotropic";
        default:
            return "equal-time";
        }
    }

    inline const std::vector<Scheme> &all_schemes()
    {
        static const std::vector<Scheme> s{Scheme::proposed, Scheme::perfect, Scheme::isotropic, Scheme::equal_time};
        return s;
    }

    // "all" expands to every scheme
    inline std::vector<Scheme> parse_schemes(const std::string &name)
    {
        if (name == "all")
            return all_schemes();
        for (Scheme s : all_schemes())
            if (name == to_string(s))
                return {s};
        throw ConfigError("unknown scheme '" + name + "' (expected proposed|perfect|isotropic|equal-time|all)");
    }

    inline EstimatorKind parse_estimator(const std::string &name)
    {
        if (name == "ml")
            return EstimatorKind::ml;
        if (name == "crb-sampled")
            return EstimatorKind::crb_sampled;
        throw ConfigError("unknown estimator '" + name + "' (expected ml|crb-sampled)");
    }

    enum class ErrorDistribution
    {
        uniform,
        truncated_gaussian
    };

    struct ScenarioConfig
    {
        int n_tx = 8;
        int n_rx = 8;
        double spacing_over_wavelength = 0.5;
        double wavelength_m = 0.125;

        std::vector<double> er_angle_deg{0.0, 30.0, 60.0};
        std::vector<double> er_distance_m{5.0, 8.0, 10.0};
        std::vector<double> er_rcs{1.0, 1.0, 1.0};

        double angle_bound_deg = 5.0;
        double distance_bound_m = 2.0;

        double rho0_db = -40.0;
        double noise_dbm = -50.0;
        double p_max_dbm = 30.0;
        int horizon_symbols = 200;

        std::optional<double> gamma; // nullopt = choose by auto-gamma
        std::vector<double> gamma_grid; // empty = default log grid
        std::string scheme = "all";
        EstimatorKind estimator = EstimatorKind::crb_sampled;
        ErrorDistribution error_distribution = ErrorDistribution::uniform;
        int trials = 200;
        std::uint64_t seed = 1;

        int er_count() const { return static_cast<int>(er_angle_deg.size()); }
        double rho0() const { return db_to_linear(rho0_db); }
        double noise_var() const { return dbm_to_watts(noise_dbm); }
        double p_max() const { return dbm_to_watts(p_max_dbm); }

        ArrayGeometry geometry() const { return ArrayGeometry{n_tx, n_rx, spacing_over_wavelength, wavelength_m}; }

        std::vector<PriorEstimate> priors() const
        {
            std::vector<PriorEstimate> p;
            for (int k = 0; k < er_count(); ++k)
                p.push_back({deg_to_rad(er_angle_deg[k]), er_distance_m[k], deg_to_rad(angle_bound_deg),
                             distance_bound_m, er_rcs[k]});
            return p;
        }

        void validate() const
        {
            auto fail = [](const std::string &m) { throw ConfigError(m); };
            if (n_tx < 1 || n_rx < 1)
                fail("n_tx and n_rx must be >= 1");
            if (!(spacing_over_wavelength > 0.0) || !(wavelength_m > 0.0))
                fail("spacing_over_wavelength and wavelength_m must be positive");
            const int k = er_count();
            if (k < 1)
                fail("at least one ER is required");
            if (static_cast<int>(er_distance_m.size()) != k || static_cast<int>(er_rcs.size()) != k)
                fail("er_angle_deg, er_distance_m and er_rcs must have the same length");
            if (k > n_tx || n_tx > n_rx)
                fail("requires K <= n_tx <= n_rx");
            if (horizon_symbols < n_tx)
                fail("horizon_symbols must be >= n_tx");
            if (angle_bound_deg < 0.0 || distance_bound_m < 0.0)
                fail("error bounds must be >= 0");
            for (int i = 0; i < k; ++i)
            {
                if (!(er_rcs[i] > 0.0))
                    fail("er_rcs entries must be positive");
                if (er_distance_m[i] - distance_bound_m <= 0.0)
                    fail("er_distance_m - distance_bound_m must stay positive");
                if (std::abs(er_angle_deg[i]) + angle_bound_deg >= 90.0)
                    fail("ER angle box must stay inside (-90, 90) degrees");
            }
            if (gamma && !(*gamma > 0.0))
                fail("gamma must be positive");
            for (double g : gamma_grid)
                if (!(g > 0.0))
                    fail("gamma_grid entries must be positive");
            if (trials < 1)
                fail("trials must be >= 1");
            parse_schemes(scheme);
        }
    };

    namespace detail
    {
        inline std::string trim(const std::string &s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos)
                return {};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        inline double to_double(const std::string &key, const std::string &v)
        {
            try
            {
                std::size_t used = 0;
                const double d = std::stod(v, &used);
                if (used != v.size())
                    throw std::invalid_argument(v);
                return d;
            }
            catch (const std::exception &)
            {
                throw ConfigError("key '" + key + "': not a number: '" + v + "'");
            }
        }

        inline long long to_integer(const std::string &key, const std::string &v)
        {
            try
            {
                std::size_t used = 0;
                const long long d = std::stoll(v, &used);
                if (used != v.size())
                    throw std::invalid_argument(v);
                return d;
            }
            catch (const std::exception &)
            {
                throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
            }
        }

        inline std::vector<double> to_list(const std::string &key, const std::string &v)
        {
            std::vector<double> out;
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ','))
                out.push_back(to_double(key, trim(item)));
            return out;
        }
    }

    inline ScenarioConfig parse_config(std::istream &in)
    {
        using namespace detail;
        ScenarioConfig c;
        std::map<std::string, std::string> seen;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line))
        {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos)
                line.erase(hash);
            line = trim(line);
            if (line.empty())
                continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
            const std::string key = trim(line.substr(0, eq));
            const std::string val = trim(line.substr(eq + 1));
            if (seen.count(key))
                throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
            seen[key] = val;

            if (key == "n_tx")
                c.n_tx = static_cast<int>(to_integer(key, val));
            else if (key == "n_rx")
                c.n_rx = static_cast<int>(to_integer(key, val));
            else if (key == "spacing_over_wavelength")
                c.spacing_over_wavelength = to_double(key, val);
            else if (key == "wavelength_m")
                c.wavelength_m = to_double(key, val);
            else if (key == "er_angle_deg")
                c.er_angle_deg = to_list(key, val);
            else if (key == "er_distance_m")
                c.er_distance_m = to_list(key, val);
            else if (key == "er_rcs")
                c.er_rcs = to_list(key, val);
            else if (key == "angle_bound_deg")
                c.angle_bound_deg = to_double(key, val);
            else if (key == "distance_bound_m")
                c.distance_bound_m = to_double(key, val);
            else if (key == "rho0_db")
                c.rho0_db = to_double(key, val);
            else if (key == "noise_dbm")
                c.noise_dbm = to_double(key, val);
            else if (key == "p_max_dbm")
                c.p_max_dbm = to_double(key, val);
            else if (key == "horizon_symbols")
                c.horizon_symbols = static_cast<int>(to_integer(key, val));
            else if (key == "gamma")
                c.gamma = (val == "auto") ? std::nullopt : std::optional<double>(to_double(key, val));
            else if (key == "gamma_grid")
                c.gamma_grid = to_list(key, val);
            else if (key == "scheme")
                c.scheme = val;
            else if (key == "estimator")
                c.estimator = parse_estimator(val);
            else if (key == "error_distribution")
            {
                if (val == "uniform")
                    c.error_distribution = ErrorDistribution::uniform;
                else if (val == "truncated-gaussian")
                    c.error_distribution = ErrorDistribution::truncated_gaussian;
                else
                    throw ConfigError("error_distribution must be uniform|truncated-gaussian");
            }
            else if (key == "trials")
                c.trials = static_cast<int>(to_integer(key, val));
            else if (key == "seed")
            {
                if (val.empty() || val.find_first_not_of("0123456789") != std::string::npos)
                    throw ConfigError("seed must be a non-negative integer");
                try
                {
                    c.seed = std::stoull(val);
                }
                catch (const std::exception &)
                {
                    throw ConfigError("seed out of range");
                }
            }
            else
                throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        }
        // A config that lists ERs without RCS values gets the neutral default for each
        if (seen.count("er_angle_deg") && !seen.count("er_rcs"))
            c.er_rcs.assign(c.er_angle_deg.size(), 1.0);
        c.validate();
        return c;
    }

    inline ScenarioConfig load_config(const std::string &path)
    {
        std::ifstream f(path);
        if (!f)
            throw ConfigError("cannot open config file '" + path + "'");
        return parse_config(f);
    }
}

#endif
