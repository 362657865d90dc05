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

#ifndef SWPT_SENSING_DESIGN_HPP
#define SWPT_SENSING_DESIGN_HPP

// Stage 1: CRB-minimizing sample covariance and the shortest sensing window
// that meets a CRB threshold.

#include "fisher_crb.hpp"
#include "sdp.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace swpt
{
    /// Targets as predicted from the previous block: angles theta_bar and gains
    /// built from (d_bar, beta) with the round-trip path-gain model.
    inline TargetSet prior_targets(const std::vector<PriorEstimate> &priors, const ArrayGeometry &geom, double rho0)
    {
        TargetSet t;
        t.geometry = geom;
        for (const auto &p : priors)
        {
            t.angles.push_back(p.angle_bar_rad);
            t.gains.push_back(path_gain(geom, ErGroundTruth{p.angle_bar_rad, p.distance_bar_m, p.rcs}, rho0));
        }
        return t;
    }

    // Sensing-covariance SDP with handles to its variables.
    //
    // Variables: S (N_t x N_t Hermitian PSD) and t_1..t_3K. Each CRB epigraph
    // constraint e_i^T F^-1 e_i <= t_i is posed as the LMI
    //     [[D F(S) D, e_i], [e_i^T, t_i / d_i^2]] >= 0,
    // a congruence of [[F, e_i], [e_i^T, t_i]] >= 0 with D = diag(d) taken from
    // the isotropic FIM so every block is O(1).
    struct SensingSdp
    {
        sdp::Problem problem;
        int covariance_var = -1;
        std::vector<int> t_vars;
        RealVector equilibration; // d_i
        int lmi_count() const { return static_cast<int>(t_vars.size()); }
    };

    inline SensingSdp build_p22(const TargetSet &priors, double p_max, double noise_var)
    {
        priors.validate();
        const auto &g = priors.geometry;
        if (!(p_max > 0.0))
            throw std::invalid_argument("build_p22: p_max must be positive");
        const int n = g.n_tx;
        const int k3 = 3 * priors.size();

        const Fim iso = assemble_fim(priors, (p_max / n) * ComplexMatrix::Identity(n, n), 1.0, noise_var);
        RealVector d = iso.matrix.diagonal().cwiseMax(0.0).cwiseSqrt();
        for (int i = 0; i < k3; ++i)
            d(i) = d(i) > 0.0 ? 1.0 / d(i) : 1.0;

        SensingSdp out;
        out.equilibration = d;
        auto &prob = out.problem;
        out.covariance_var = prob.add_matrix_variable("S_x", n, true);
        for (int i = 0; i < k3; ++i)
            out.t_vars.push_back(prob.add_scalar_variable("t" + std::to_string(i + 1)));

        // FIM image of every Hermitian basis element, equilibrated
        const auto &sv = prob.matrix_variables()[out.covariance_var];
        std::vector<RealMatrix> images;
        for (int c = 0; c < sv.n_coords; ++c)
        {
            const Fim f = assemble_fim(priors, prob.basis_element(out.covariance_var, c), 1.0, noise_var);
            images.push_back(d.asDiagonal() * f.matrix * d.asDiagonal());
        }

        sdp::LinearForm objective;
        for (int i = 0; i < k3; ++i)
        {
            sdp::MatrixForm lmi(k3 + 1);
            lmi.constant(i, k3) = 1.0;
            lmi.constant(k3, i) = 1.0;
            for (int c = 0; c < sv.n_coords; ++c)
            {
                ComplexMatrix term = ComplexMatrix::Zero(k3 + 1, k3 + 1);
                term.topLeftCorner(k3, k3) = images[c].cast<Complex>();
                lmi.add(sv.first_coord + c, std::move(term));
            }
            ComplexMatrix t_term = ComplexMatrix::Zero(k3 + 1, k3 + 1);
            t_term(k3, k3) = 1.0 / (d(i) * d(i));
            lmi.add(prob.scalar_variables()[out.t_vars[i]].coord, std::move(t_term));
            prob.add_lmi(std::move(lmi), "crb_" + std::to_string(i + 1));
            objective += prob.scalar(out.t_vars[i]);
        }
        prob.set_objective(sdp::Sense::minimize, objective);
        prob.add_equality(prob.trace(out.covariance_var), p_max);
        return out;
    }

    struct SensingCovariance
    {
        HermitianMatrix s_x;
        double crb_unit = 0.0;      // tr(F^-1) at tau = 1
        double sdp_objective = 0.0; // sum of t_i at the solver optimum
        sdp::Solution solution;
    };

    // Nearest PSD matrix with the same trace (clips solver round-off)
    inline HermitianMatrix project_psd_trace(const HermitianMatrix &m, double trace)
    {
        const HermitianMatrix h = 0.5 * (m + m.adjoint());
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
        const RealVector ev = es.eigenvalues().cwiseMax(0.0);
        HermitianMatrix p = es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
        p *= trace / p.trace().real();
        return 0.5 * (p + p.adjoint());
    }

    inline SensingCovariance optimize_sensing_covariance(const TargetSet &priors, double p_max, double noise_var,
                                                         const sdp::Options &opt = {})
    {
        SensingSdp sp = build_p22(priors, p_max, noise_var);
        sdp::Solution sol = sdp::solve(sp.problem, opt);
        if (!sol.ok())
            throw SolverError(std::string("sensing covariance SDP: ") + sdp::to_string(sol.status) + ": " +
                              sol.diagnostic);
        SensingCovariance out;
        out.s_x = project_psd_trace(sol.matrix_values[sp.covariance_var], p_max);
        out.sdp_objective = sol.objective_value;
        out.crb_unit = crb_trace(assemble_fim(priors, out.s_x, 1.0, noise_var));
        out.solution = std::move(sol);
        return out;
    }

    /// Smallest integer tau in [n_tx, horizon] with crb_unit / tau <= gamma.
    inline std::optional<int> minimal_duration(double crb_unit, double gamma, int n_tx, int horizon)
    {
        if (!(crb_unit > 0.0) || !(gamma > 0.0))
            throw std::invalid_argument("minimal_duration: crb_unit and gamma must be positive");
        const double q = crb_unit / gamma;
        if (!std::isfinite(q) || q > static_cast<double>(horizon) + 1.0)
            return std::nullopt;
        long tau = static_cast<long>(std::ceil(q));
        // guard the ceiling against round-off in the division
        while (tau > 1 && static_cast<double>(tau - 1) * gamma >= crb_unit)
            --tau;
        while (static_cast<double>(tau) * gamma < crb_unit)
            ++tau;
        tau = std::max<long>(tau, n_tx);
        if (tau > horizon)
            return std::nullopt;
        return static_cast<int>(tau);
    }

    struct SensingDesign
    {
        HermitianMatrix s_x;
        int tau = 0;
        double crb_unit = 0.0;
        double crb_at_tau = 0.0;
    };

    // Joint covariance/duration design; nullopt when no tau <= horizon meets gamma
    inline std::optional<SensingDesign> design_sensing(const SensingCovariance &cov, double gamma, int n_tx,
                                                       int horizon)
    {
        auto tau = minimal_duration(cov.crb_unit, gamma, n_tx, horizon);
        if (!tau)
            return std::nullopt;
        return SensingDesign{cov.s_x, *tau, cov.crb_unit, cov.crb_unit / *tau};
    }
}

#endif
