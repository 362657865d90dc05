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

#ifndef SWPT_FISHER_CRB_HPP
#define SWPT_FISHER_CRB_HPP

#include "array_channel.hpp"

#include <vector>

namespace swpt
{
    // Angles and complex echo gains of the K reflectors seen by the radar
    struct TargetSet
    {
        std::vector<double> angles;
        std::vector<Complex> gains;
        ArrayGeometry geometry;

        int size() const { return static_cast<int>(angles.size()); }

        void validate() const
        {
            geometry.validate();
            if (angles.empty() || angles.size() != gains.size())
                throw DimensionError("TargetSet: need K >= 1 angles and as many gains");
            if (size() > geometry.n_tx || geometry.n_tx > geometry.n_rx)
                throw DimensionError("TargetSet: requires K <= N_t <= N_r");
        }
    };

    // Real 3K x 3K Fisher information for [theta; Re b; Im b]
    struct Fim
    {
        RealMatrix matrix;
        double noise_var = 1.0;
        double duration = 1.0;
    };

    /// Fisher information of (theta, Re b, Im b) from tau echo snapshots with sample
    /// covariance s_x and per-entry complex noise variance noise_var.
    ///
    /// Blocks are assembled from the Hadamard-product closed forms with S_x^* and
    /// scale exactly linearly in tau and s_x. s_x must be Hermitian; it is not
    /// checked for PSD so the map can also be evaluated on Hermitian basis elements.
    inline Fim assemble_fim(const TargetSet &targets, const HermitianMatrix &s_x, double tau, double noise_var)
    {
        targets.validate();
        const auto &g = targets.geometry;
        require_square(s_x, g.n_tx, "assemble_fim");
        if (hermitian_defect(s_x) > 1e-9)
            throw DimensionError("assemble_fim: s_x is not Hermitian");
        if (!(noise_var > 0.0))
            throw std::invalid_argument("assemble_fim: noise variance must be positive");

        const int k = targets.size();
        ComplexMatrix at(g.n_tx, k), ar(g.n_rx, k), dat(g.n_tx, k), dar(g.n_rx, k);
        for (int i = 0; i < k; ++i)
        {
            at.col(i) = steering_tx(g, targets.angles[i]);
            ar.col(i) = steering_rx(g, targets.angles[i]);
            dat.col(i) = steering_derivative_tx(g, targets.angles[i]);
            dar.col(i) = steering_derivative_rx(g, targets.angles[i]);
        }
        ComplexVector bvec(k);
        for (int i = 0; i < k; ++i)
            bvec(i) = targets.gains[i];
        const auto b = bvec.asDiagonal();
        const auto bh = bvec.conjugate().asDiagonal();
        const ComplexMatrix sc = s_x.conjugate();

        const ComplexMatrix ar_ar = ar.adjoint() * ar;
        const ComplexMatrix dar_dar = dar.adjoint() * dar;
        const ComplexMatrix dar_ar = dar.adjoint() * ar;
        const ComplexMatrix ar_dar = ar.adjoint() * dar;

        const ComplexMatrix at_s_at = at.adjoint() * sc * at;
        const ComplexMatrix at_s_dat = at.adjoint() * sc * dat;
        const ComplexMatrix dat_s_at = dat.adjoint() * sc * at;
        const ComplexMatrix dat_s_dat = dat.adjoint() * sc * dat;

        const ComplexMatrix f11 =
            tau * (dar_dar.cwiseProduct(bh * at_s_at * b) + dar_ar.cwiseProduct(bh * at_s_dat * b) +
                   ar_dar.cwiseProduct(bh * dat_s_at * b) + ar_ar.cwiseProduct(bh * dat_s_dat * b));
        const ComplexMatrix f12 =
            tau * (dar_ar.cwiseProduct(bh * at_s_at) + ar_ar.cwiseProduct(bh * dat_s_at));
        const ComplexMatrix f22 = tau * ar_ar.cwiseProduct(at_s_at);

        RealMatrix f(3 * k, 3 * k);
        f.block(0, 0, k, k) = f11.real();
        f.block(0, k, k, k) = f12.real();
        f.block(0, 2 * k, k, k) = -f12.imag();
        f.block(k, 0, k, k) = f12.real().transpose();
        f.block(k, k, k, k) = f22.real();
        f.block(k, 2 * k, k, k) = -f22.imag();
        f.block(2 * k, 0, k, k) = -f12.imag().transpose();
        f.block(2 * k, k, k, k) = -f22.imag().transpose();
        f.block(2 * k, 2 * k, k, k) = f22.real();
        f *= 2.0 / noise_var;

        return Fim{0.5 * (f + f.transpose()), noise_var, tau};
    }

    // Reciprocal condition number below which the FIM is treated as singular
    inline constexpr double fim_rcond_floor = 1e-12;

    /// Reciprocal condition number of the diagonally equilibrated FIM, so that the
    /// different units of angle and gain parameters do not count as ill-conditioning.
    inline double fim_rcond(const RealMatrix &f)
    {
        const RealVector diag = f.diagonal();
        if (!(diag.minCoeff() > 0.0))
            return 0.0;
        const RealVector d = diag.cwiseSqrt().cwiseInverse();
        const RealMatrix fs = d.asDiagonal() * f * d.asDiagonal();
        const RealVector ev = Eigen::SelfAdjointEigenSolver<RealMatrix>(fs, Eigen::EigenvaluesOnly).eigenvalues();
        const double top = ev.cwiseAbs().maxCoeff();
        if (!(top > 0.0))
            return 0.0;
        return ev(0) / top;
    }

    /// Full CRB matrix F^-1 (solved column-by-column against the identity).
    inline RealMatrix crb_matrix(const Fim &fim, double rcond_floor = fim_rcond_floor)
    {
        const RealMatrix &f = fim.matrix;
        if (f.rows() == 0 || f.rows() != f.cols())
            throw DimensionError("crb: FIM must be square and nonempty");
        const double rc = fim_rcond(f);
        if (!(rc >= rcond_floor))
            throw UnidentifiableError("unidentifiable parameters: FIM reciprocal condition number " +
                                      std::to_string(rc));
        // Diagonal equilibration keeps the Cholesky well scaled (angle and gain entries differ by orders of magnitude)
        const RealVector d = f.diagonal().cwiseSqrt().cwiseInverse();
        const RealMatrix fs = d.asDiagonal() * f * d.asDiagonal();
        Eigen::LLT<RealMatrix> llt(fs);
        if (llt.info() != Eigen::Success)
            throw UnidentifiableError("unidentifiable parameters: FIM is not positive definite");
        RealMatrix inv = llt.solve(RealMatrix::Identity(f.rows(), f.cols()));
        inv = d.asDiagonal() * inv * d.asDiagonal();
        return 0.5 * (inv + inv.transpose());
    }

    /// tr(F^-1): the scalar CRB metric.
    inline double crb_trace(const Fim &fim, double rcond_floor = fim_rcond_floor)
    {
        return crb_matrix(fim, rcond_floor).trace();
    }

    inline RealVector crb_per_parameter(const Fim &fim, double rcond_floor = fim_rcond_floor)
    {
        return crb_matrix(fim, rcond_floor).diagonal();
    }
}

#endif
