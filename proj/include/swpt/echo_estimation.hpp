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

#ifndef SWPT_ECHO_ESTIMATION_HPP
#define SWPT_ECHO_ESTIMATION_HPP

// Sensing waveforms, radar echoes and (angle, gain) estimation.

#include "fisher_crb.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <vector>

namespace swpt
{
    struct WaveformBlock
    {
        ComplexMatrix samples; // N_t x tau

        int duration() const { return static_cast<int>(samples.cols()); }
        HermitianMatrix sample_covariance() const { return samples * samples.adjoint() / duration(); }
    };

    struct EchoBlock
    {
        ComplexMatrix samples; // N_r x tau
        double noise_var = 0.0;
    };

    enum class EstimatorKind
    {
        ml,
        crb_sampled
    };

    inline const char *to_string(EstimatorKind k) { return k == EstimatorKind::ml ? "ml" : "crb-sampled"; }

    struct EstimationResult
    {
        std::vector<double> theta_hat;
        std::vector<Complex> alpha_hat;
        double residual = 0.0;
        EstimatorKind method = EstimatorKind::ml;
    };

    /// Waveform X = sqrt(tau) V Lambda^(1/2) Q with (1/tau) X X^H = s_x.
    ///
    /// V Lambda V^H is the eigendecomposition of s_x and Q holds the first N_t rows
    /// of the tau-point unitary DFT, so Q Q^H = I. Negative round-off eigenvalues are clipped.
    inline WaveformBlock synthesize_waveform(const HermitianMatrix &s_x, int tau)
    {
        const auto n = s_x.rows();
        if (s_x.cols() != n || n < 1)
            throw DimensionError("synthesize_waveform: s_x must be square");
        if (tau < n)
            throw std::invalid_argument("synthesize_waveform: tau must be >= N_t");
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (s_x + s_x.adjoint()));
        const RealVector root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
        ComplexMatrix q(n, tau);
        const double norm = 1.0 / std::sqrt(static_cast<double>(tau));
        for (Eigen::Index r = 0; r < n; ++r)
            for (int t = 0; t < tau; ++t)
                q(r, t) = std::polar(norm, -2.0 * pi * static_cast<double>((r * t) % tau) / tau);
        WaveformBlock w;
        w.samples = std::sqrt(static_cast<double>(tau)) * es.eigenvectors() * root.cast<Complex>().asDiagonal() * q;
        return w;
    }

    // Noise-free echo A_r diag(b) A_t^T X
    inline ComplexMatrix echo_mean(const TargetSet &targets, const WaveformBlock &x)
    {
        const auto &g = targets.geometry;
        if (x.samples.rows() != g.n_tx)
            throw DimensionError("echo: waveform rows must equal N_t");
        ComplexMatrix y = ComplexMatrix::Zero(g.n_rx, x.samples.cols());
        for (int k = 0; k < targets.size(); ++k)
        {
            const ComplexVector ar = steering_rx(g, targets.angles[k]);
            const Eigen::RowVectorXcd w = steering_tx(g, targets.angles[k]).transpose() * x.samples;
            y += targets.gains[k] * ar * w;
        }
        return y;
    }

    /// Y = sum_k alpha_k a_r(theta_k) a_t^T(theta_k) X + Z with Z i.i.d. CN(0, noise_var).
    inline EchoBlock generate_echo(const WaveformBlock &x, const TargetSet &targets, double noise_var,
                                   std::uint64_t seed)
    {
        if (noise_var < 0.0)
            throw std::invalid_argument("generate_echo: noise variance must be >= 0");
        EchoBlock e;
        e.noise_var = noise_var;
        e.samples = echo_mean(targets, x);
        if (noise_var > 0.0)
        {
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> normal(0.0, std::sqrt(noise_var / 2.0));
            for (Eigen::Index c = 0; c < e.samples.cols(); ++c)
                for (Eigen::Index r = 0; r < e.samples.rows(); ++r)
                {
                    const double re = normal(rng);
                    const double im = normal(rng);
                    e.samples(r, c) += Complex(re, im);
                }
        }
        return e;
    }

    inline EchoBlock generate_echo(const WaveformBlock &x, const std::vector<ErGroundTruth> &truth,
                                   const ArrayGeometry &geom, double rho0, double noise_var, std::uint64_t seed)
    {
        TargetSet t;
        t.geometry = geom;
        for (const auto &er : truth)
        {
            t.angles.push_back(er.angle_rad);
            t.gains.push_back(path_gain(geom, er, rho0));
        }
        return generate_echo(x, t, noise_var, seed);
    }

    struct MlOptions
    {
        int grid_half_points = 25;      // grid step = bound / grid_half_points
        long max_joint_grid = 200000;   // larger boxes fall back to cyclic per-angle search
        double refine_tol = 1e-9;       // golden-section bracket width (rad)
        int refine_passes = 4;
    };

    namespace detail
    {
        // Least-squares gains and residual for fixed angles, evaluated exactly
        struct LsFit
        {
            std::vector<Complex> gains;
            double residual = std::numeric_limits<double>::infinity();
        };

        // Solve G b = c for small Hermitian PD G (in place Cholesky); false if singular
        inline bool solve_hermitian(std::vector<Complex> &g, std::vector<Complex> &c, int k)
        {
            for (int j = 0; j < k; ++j)
            {
                double d = g[j * k + j].real();
                for (int p = 0; p < j; ++p)
                    d -= std::norm(g[j * k + p]);
                if (!(d > 0.0))
                    return false;
                d = std::sqrt(d);
                g[j * k + j] = d;
                for (int i = j + 1; i < k; ++i)
                {
                    Complex s = g[i * k + j];
                    for (int p = 0; p < j; ++p)
                        s -= g[i * k + p] * std::conj(g[j * k + p]);
                    g[i * k + j] = s / d;
                }
            }
            for (int i = 0; i < k; ++i)
            {
                Complex s = c[i];
                for (int p = 0; p < i; ++p)
                    s -= g[i * k + p] * c[p];
                c[i] = s / g[i * k + i].real();
            }
            for (int i = k - 1; i >= 0; --i)
            {
                Complex s = c[i];
                for (int p = i + 1; p < k; ++p)
                    s -= std::conj(g[p * k + i]) * c[p];
                c[i] = s / g[i * k + i].real();
            }
            return true;
        }

        class MlObjective
        {
        public:
            MlObjective(const EchoBlock &y, const WaveformBlock &x, const ArrayGeometry &geom)
                : y_(y.samples), x_(x.samples), geom_(geom), y_energy_(y.samples.squaredNorm())
            {
            }

            LsFit fit(const std::vector<double> &angles) const
            {
                const int k = static_cast<int>(angles.size());
                std::vector<ComplexVector> r(k);
                std::vector<Eigen::RowVectorXcd> w(k);
                for (int i = 0; i < k; ++i)
                {
                    r[i] = steering_rx(geom_, angles[i]);
                    w[i] = steering_tx(geom_, angles[i]).transpose() * x_;
                }
                std::vector<Complex> gram(k * k), c(k);
                for (int i = 0; i < k; ++i)
                {
                    c[i] = r[i].dot(y_ * w[i].adjoint()); // r^H Y w^H
                    for (int j = 0; j <= i; ++j)
                    {
                        const Complex v = r[i].dot(r[j]) * w[i].dot(w[j]);
                        gram[i * k + j] = v;
                        gram[j * k + i] = std::conj(v);
                    }
                }
                LsFit out;
                if (!solve_hermitian(gram, c, k))
                    return out;
                out.gains = c;
                ComplexMatrix res = y_;
                for (int i = 0; i < k; ++i)
                    res -= c[i] * r[i] * w[i];
                out.residual = res.squaredNorm();
                return out;
            }

            double y_energy() const { return y_energy_; }
            const ComplexMatrix &y() const { return y_; }
            const ComplexMatrix &x() const { return x_; }
            const ArrayGeometry &geometry() const { return geom_; }

        private:
            ComplexMatrix y_;
            ComplexMatrix x_;
            ArrayGeometry geom_;
            double y_energy_;
        };

        // Exhaustive search over the product grid using precomputed Gram tables
        inline std::vector<int> joint_grid_search(const MlObjective &obj, const std::vector<std::vector<double>> &grids)
        {
            const int k = static_cast<int>(grids.size());
            const auto &geom = obj.geometry();
            std::vector<ComplexMatrix> rmat(k), wmat(k);
            std::vector<ComplexVector> cvec(k);
            for (int i = 0; i < k; ++i)
            {
                const int n = static_cast<int>(grids[i].size());
                rmat[i].resize(geom.n_rx, n);
                wmat[i].resize(obj.x().cols(), n);
                cvec[i].resize(n);
                for (int g = 0; g < n; ++g)
                {
                    rmat[i].col(g) = steering_rx(geom, grids[i][g]);
                    wmat[i].col(g) = (steering_tx(geom, grids[i][g]).transpose() * obj.x()).transpose();
                }
                // c(g) = r^H Y conj(w)
                const ComplexMatrix yw = obj.y() * wmat[i].conjugate();
                for (int g = 0; g < n; ++g)
                    cvec[i](g) = rmat[i].col(g).dot(yw.col(g));
            }
            // tables[i][j](gi, gj) = (r_i^H r_j)(w_j . conj(w_i))
            std::vector<std::vector<ComplexMatrix>> tables(k, std::vector<ComplexMatrix>(k));
            for (int i = 0; i < k; ++i)
                for (int j = 0; j <= i; ++j)
                    tables[i][j] = (rmat[i].adjoint() * rmat[j]).cwiseProduct(wmat[i].adjoint() * wmat[j]);

            std::vector<int> idx(k, 0), best(k, 0);
            double best_proj = -std::numeric_limits<double>::infinity();
            std::vector<Complex> gram(k * k), c(k), c0(k);
            while (true)
            {
                for (int i = 0; i < k; ++i)
                {
                    c0[i] = cvec[i](idx[i]);
                    for (int j = 0; j <= i; ++j)
                    {
                        const Complex v = tables[i][j](idx[i], idx[j]);
                        gram[i * k + j] = v;
                        gram[j * k + i] = std::conj(v);
                    }
                }
                c = c0;
                if (solve_hermitian(gram, c, k))
                {
                    double proj = 0.0; // c^H G^-1 c
                    for (int i = 0; i < k; ++i)
                        proj += (std::conj(c0[i]) * c[i]).real();
                    if (proj > best_proj)
                    {
                        best_proj = proj;
                        best = idx;
                    }
                }
                int d = 0;
                while (d < k && ++idx[d] == static_cast<int>(grids[d].size()))
                    idx[d++] = 0;
                if (d == k)
                    break;
            }
            return best;
        }

        template <typename F>
        double golden_section(F &&f, double lo, double hi, double tol)
        {
            const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
            double a = lo, b = hi;
            double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
            double fc = f(c), fd = f(d);
            while (b - a > tol)
            {
                if (fc <= fd)
                {
                    b = d;
                    d = c;
                    fd = fc;
                    c = b - inv_phi * (b - a);
                    fc = f(c);
                }
                else
                {
                    a = c;
                    c = d;
                    fc = fd;
                    d = a + inv_phi * (b - a);
                    fd = f(d);
                }
            }
            return 0.5 * (a + b);
        }
    }

    /// Box-constrained concentrated maximum likelihood.
    ///
    /// Minimizes ||Y - A_r(theta) diag(b) A_t^T(theta) X||_F^2 over theta in
    /// prod_k [theta_bar_k - phi_k, theta_bar_k + phi_k], with b the closed-form
    /// least-squares gains. Coarse grid (step phi/25), then cyclic golden-section
    /// refinement of each angle within one grid cell.
    inline EstimationResult estimate_ml(const EchoBlock &y, const WaveformBlock &x,
                                        const std::vector<PriorEstimate> &priors, const ArrayGeometry &geom,
                                        const MlOptions &opt = {})
    {
        const int k = static_cast<int>(priors.size());
        if (k < 1 || k > geom.n_tx || geom.n_tx > geom.n_rx)
            throw DimensionError("estimate_ml: requires 1 <= K <= N_t <= N_r");
        if (y.samples.rows() != geom.n_rx || x.samples.rows() != geom.n_tx || y.samples.cols() != x.samples.cols())
            throw DimensionError("estimate_ml: echo/waveform dimensions inconsistent with geometry");

        detail::MlObjective obj(y, x, geom);
        std::vector<double> lo(k), hi(k), step(k);
        std::vector<std::vector<double>> grids(k);
        long joint = 1;
        for (int i = 0; i < k; ++i)
        {
            const double phi = std::max(0.0, priors[i].angle_bound_rad);
            lo[i] = priors[i].angle_bar_rad - phi;
            hi[i] = priors[i].angle_bar_rad + phi;
            if (phi == 0.0)
            {
                grids[i] = {priors[i].angle_bar_rad};
                step[i] = 0.0;
            }
            else
            {
                step[i] = phi / opt.grid_half_points;
                for (int g = -opt.grid_half_points; g <= opt.grid_half_points; ++g)
                    grids[i].push_back(priors[i].angle_bar_rad + g * step[i]);
            }
            joint *= static_cast<long>(grids[i].size());
        }

        std::vector<double> theta(k);
        if (joint <= opt.max_joint_grid)
        {
            const std::vector<int> best = detail::joint_grid_search(obj, grids);
            for (int i = 0; i < k; ++i)
                theta[i] = grids[i][best[i]];
        }
        else
        {
            // cyclic per-angle grid search from the prior point
            for (int i = 0; i < k; ++i)
                theta[i] = priors[i].angle_bar_rad;
            for (int pass = 0; pass < 3; ++pass)
                for (int i = 0; i < k; ++i)
                {
                    double best_r = std::numeric_limits<double>::infinity();
                    double best_t = theta[i];
                    for (double cand : grids[i])
                    {
                        auto trial = theta;
                        trial[i] = cand;
                        const double r = obj.fit(trial).residual;
                        if (r < best_r)
                        {
                            best_r = r;
                            best_t = cand;
                        }
                    }
                    theta[i] = best_t;
                }
        }

        // Refinement: each angle within +-1 grid step of its current value, clipped to the box
        for (int pass = 0; pass < opt.refine_passes; ++pass)
        {
            for (int i = 0; i < k; ++i)
            {
                if (step[i] == 0.0)
                    continue;
                const double a = std::max(lo[i], theta[i] - step[i]);
                const double b = std::min(hi[i], theta[i] + step[i]);
                auto f = [&](double t)
                {
                    auto trial = theta;
                    trial[i] = t;
                    return obj.fit(trial).residual;
                };
                const double cand = detail::golden_section(f, a, b, opt.refine_tol);
                if (f(cand) <= f(theta[i]))
                    theta[i] = cand;
            }
        }

        const detail::LsFit fit = obj.fit(theta);
        EstimationResult out;
        out.theta_hat = theta;
        out.alpha_hat = fit.gains.empty() ? std::vector<Complex>(k, Complex(0.0)) : fit.gains;
        out.residual = fit.residual;
        out.method = EstimatorKind::ml;
        return out;
    }

    /// Surrogate estimator: truth plus a Gaussian error with covariance F^-1.
    inline EstimationResult estimate_crb_sampled(const TargetSet &truth, const Fim &fim, std::uint64_t seed)
    {
        const int k = truth.size();
        if (fim.matrix.rows() != 3 * k)
            throw DimensionError("estimate_crb_sampled: FIM size does not match the target count");
        const RealMatrix cov = crb_matrix(fim);
        Eigen::LLT<RealMatrix> llt(cov);
        if (llt.info() != Eigen::Success)
            throw UnidentifiableError("estimate_crb_sampled: CRB matrix not positive definite");
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        RealVector z(3 * k);
        for (int i = 0; i < 3 * k; ++i)
            z(i) = normal(rng);
        const RealVector delta = llt.matrixL() * z;
        EstimationResult out;
        out.method = EstimatorKind::crb_sampled;
        for (int i = 0; i < k; ++i)
        {
            out.theta_hat.push_back(truth.angles[i] + delta(i));
            out.alpha_hat.push_back(truth.gains[i] + Complex(delta(k + i), delta(2 * k + i)));
        }
        return out;
    }
}

#endif
