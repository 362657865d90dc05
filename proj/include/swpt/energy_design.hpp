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

#ifndef SWPT_ENERGY_DESIGN_HPP
#define SWPT_ENERGY_DESIGN_HPP

// Stage 2: max-min received RF power beamforming and its evaluation.

#include "sdp.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace swpt
{
    struct EnergyDesign
    {
        HermitianMatrix r_x;
        double e_star = 0.0; // min_k h_k^H R h_k over the design channels
        int rank = 0;
    };

    struct EnergyBeam
    {
        ComplexVector direction; // unit norm
        double power = 0.0;
    };

    /// Received RF power h^H R h (noise-free, clipped at zero).
    inline double harvested_power(const ComplexVector &h, const HermitianMatrix &r_x)
    {
        if (h.size() != r_x.rows() || r_x.rows() != r_x.cols())
            throw DimensionError("harvested_power: channel and covariance dimensions differ");
        return std::max(0.0, (h.adjoint() * r_x * h)(0, 0).real());
    }

    inline double min_harvested(const std::vector<ComplexVector> &channels, const HermitianMatrix &r_x)
    {
        double m = std::numeric_limits<double>::infinity();
        for (const auto &h : channels)
            m = std::min(m, harvested_power(h, r_x));
        return m;
    }

    /// ((T - tau) / T) min_k h_k^H R h_k, with h_k the true channels.
    inline double min_avg_harvested(const std::vector<ComplexVector> &true_channels, const HermitianMatrix &r_x,
                                    int tau, int horizon)
    {
        if (horizon <= 0 || tau < 0 || tau > horizon)
            throw std::invalid_argument("min_avg_harvested: need 0 <= tau <= T");
        return static_cast<double>(horizon - tau) / horizon * min_harvested(true_channels, r_x);
    }

    inline HermitianMatrix isotropic_covariance(int n_tx, double p_max)
    {
        return (p_max / n_tx) * ComplexMatrix::Identity(n_tx, n_tx);
    }

    // Maximum ratio transmission toward one channel
    inline HermitianMatrix mrt_covariance(const ComplexVector &h, double p_max)
    {
        const ComplexVector u = h.normalized();
        return p_max * u * u.adjoint();
    }

    inline int numerical_rank(const HermitianMatrix &r_x, double rel = 1e-8)
    {
        const RealVector ev = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(r_x, Eigen::EigenvaluesOnly).eigenvalues();
        const double thr = rel * std::max(0.0, r_x.trace().real());
        return static_cast<int>((ev.array() > thr).count());
    }

    /// Energy beams from the eigendecomposition of R, strongest first.
    /// Beam powers sum to tr(R) for PSD R.
    inline std::vector<EnergyBeam> eigen_beams(const HermitianMatrix &r_x)
    {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (r_x + r_x.adjoint()));
        std::vector<EnergyBeam> beams;
        for (Eigen::Index i = es.eigenvalues().size() - 1; i >= 0; --i)
        {
            const double w = es.eigenvalues()(i);
            if (w > 0.0)
                beams.push_back({es.eigenvectors().col(i), w});
        }
        return beams;
    }

    namespace detail
    {
        inline EnergyDesign finish_energy_design(HermitianMatrix r, const std::vector<ComplexVector> &csi,
                                                 double p_max)
        {
            r = 0.5 * (r + r.adjoint());
            Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(r);
            r = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cast<Complex>().asDiagonal() *
                es.eigenvectors().adjoint();
            const double tr = r.trace().real();
            if (tr > p_max)
                r *= p_max / tr;
            r = 0.5 * (r + r.adjoint());
            EnergyDesign d;
            d.e_star = min_harvested(csi, r);
            d.rank = numerical_rank(r);
            d.r_x = std::move(r);
            return d;
        }
    }

    /// max E  s.t. h_k^H R h_k >= E for all k,  tr(R) <= p_max,  R >= 0,
    /// always through the SDP solver.
    inline EnergyDesign solve_energy_sdp(const std::vector<ComplexVector> &csi, double p_max,
                                         const sdp::Options &opt = {})
    {
        if (csi.empty())
            throw DimensionError("energy design: need at least one channel");
        const auto n = csi.front().size();
        double scale = 0.0;
        for (const auto &h : csi)
        {
            if (h.size() != n)
                throw DimensionError("energy design: channels have different lengths");
            scale = std::max(scale, h.norm());
        }
        if (!(scale > 0.0) || !(p_max > 0.0))
            throw std::invalid_argument("energy design: channels must be nonzero and p_max positive");
        for (const auto &h : csi)
            if (!(h.norm() > 0.0))
                throw std::invalid_argument("energy design: zero channel");

        // Solve the unit-power, unit-channel-scale instance; E scales by p_max * scale^2
        sdp::Problem prob;
        const int r = prob.add_matrix_variable("R_x", static_cast<int>(n), true);
        const int e = prob.add_scalar_variable("E");
        for (std::size_t k = 0; k < csi.size(); ++k)
        {
            const ComplexVector hk = csi[k] / scale;
            const ComplexMatrix hh = hk * hk.adjoint();
            prob.add_lmi(sdp::as_matrix_form(prob.inner(r, hh) - prob.scalar(e)), "power_" + std::to_string(k + 1));
        }
        sdp::LinearForm budget;
        budget.constant = 1.0;
        prob.add_lmi(sdp::as_matrix_form(budget - prob.trace(r)), "trace");
        prob.set_objective(sdp::Sense::maximize, prob.scalar(e));

        const sdp::Solution sol = sdp::solve(prob, opt);
        if (!sol.ok())
            throw SolverError(std::string("energy beamforming SDP: ") + sdp::to_string(sol.status) + ": " +
                              sol.diagnostic);
        return detail::finish_energy_design(p_max * sol.matrix_values[r], csi, p_max);
    }

    /// Max-min energy covariance. A single receiver is served by MRT, which is the exact optimum.
    inline EnergyDesign optimize_energy_covariance(const std::vector<ComplexVector> &csi, double p_max,
                                                   const sdp::Options &opt = {})
    {
        if (csi.size() == 1)
        {
            if (!(csi.front().norm() > 0.0) || !(p_max > 0.0))
                throw std::invalid_argument("energy design: channels must be nonzero and p_max positive");
            return detail::finish_energy_design(mrt_covariance(csi.front(), p_max), csi, p_max);
        }
        return solve_energy_sdp(csi, p_max, opt);
    }
}

#endif
