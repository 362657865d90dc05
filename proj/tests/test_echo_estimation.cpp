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


#include "oracles.hpp"

#include <swpt/echo_estimation.hpp>
#include <swpt/sensing_design.hpp>

#include <catch_amalgamated.hpp>

using namespace swpt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    const ArrayGeometry geom{8, 8, 0.5, 0.125};

    std::vector<PriorEstimate> priors()
    {
        return {{0.0, 5.0, deg_to_rad(5.0), 2.0, 1.0},
                {deg_to_rad(30.0), 8.0, deg_to_rad(5.0), 2.0, 1.0},
                {deg_to_rad(60.0), 10.0, deg_to_rad(5.0), 2.0, 1.0}};
    }

    TargetSet truth()
    {
        TargetSet t;
        t.geometry = geom;
        t.angles = {0.031, deg_to_rad(27.3), deg_to_rad(62.9)};
        t.gains = {Complex(2e-4, -3e-4), Complex(-1e-4, 0.5e-4), Complex(0.3e-4, 0.9e-4)};
        return t;
    }
}

TEST_CASE("waveform realizes the sample covariance exactly", "[echo]")
{
    std::mt19937_64 rng(1);
    for (int tau : {8, 9, 17, 64})
    {
        const HermitianMatrix s = oracle::random_covariance(8, 1.0, rng);
        const WaveformBlock x = synthesize_waveform(s, tau);
        CHECK(x.duration() == tau);
        CHECK((x.sample_covariance() - s).norm() < 1e-12 * s.norm());
    }
    CHECK_THROWS(synthesize_waveform(ComplexMatrix::Identity(8, 8), 7));
}

TEST_CASE("echo noise has the configured variance and is seed-determined", "[echo]")
{
    const TargetSet t = truth();
    const WaveformBlock x = synthesize_waveform((1.0 / 8) * ComplexMatrix::Identity(8, 8), 2000);
    const double nv = 0.04;
    const EchoBlock y = generate_echo(x, t, nv, 99);
    const ComplexMatrix z = y.samples - echo_mean(t, x);
    const double count = static_cast<double>(z.size());
    const double re_var = z.real().squaredNorm() / count;
    const double im_var = z.imag().squaredNorm() / count;
    CHECK_THAT(re_var, WithinRel(nv / 2.0, 0.03));
    CHECK_THAT(im_var, WithinRel(nv / 2.0, 0.03));
    CHECK(std::abs(z.mean()) < 5.0 * std::sqrt(nv / count));

    CHECK((generate_echo(x, t, nv, 99).samples - y.samples).norm() == 0.0);
    CHECK((generate_echo(x, t, nv, 100).samples - y.samples).norm() > 0.0);
    CHECK((generate_echo(x, t, 0.0, 5).samples - echo_mean(t, x)).norm() == 0.0);
}

TEST_CASE("ML recovers noiseless off-grid parameters", "[echo][ml]")
{
    const TargetSet t = truth();
    const TargetSet pri = prior_targets(priors(), geom, 1e-4);
    const SensingCovariance cov = optimize_sensing_covariance(pri, 1.0, 1e-8);
    const WaveformBlock x = synthesize_waveform(cov.s_x, 16);
    const EchoBlock y = generate_echo(x, t, 0.0, 0);
    const EstimationResult est = estimate_ml(y, x, priors(), geom);
    REQUIRE(est.theta_hat.size() == 3);
    for (int k = 0; k < 3; ++k)
    {
        CHECK_THAT(est.theta_hat[k], WithinAbs(t.angles[k], 1e-7));
        CHECK(std::abs(est.alpha_hat[k] - t.gains[k]) < 1e-5 * std::abs(t.gains[k]));
    }
    CHECK(est.method == EstimatorKind::ml);
}

TEST_CASE("ML gains are the least-squares solution at the estimated angles", "[echo][ml]")
{
    const TargetSet t = truth();
    const WaveformBlock x = synthesize_waveform((1.0 / 8) * ComplexMatrix::Identity(8, 8), 12);
    const EchoBlock y = generate_echo(x, t, 1e-8, 3);
    const EstimationResult est = estimate_ml(y, x, priors(), geom);

    const Eigen::Index rows = y.samples.size();
    ComplexMatrix design(rows, 3);
    for (int k = 0; k < 3; ++k)
    {
        const ComplexMatrix m = steering_rx(geom, est.theta_hat[k]) *
                                (steering_tx(geom, est.theta_hat[k]).transpose() * x.samples);
        design.col(k) = Eigen::Map<const ComplexVector>(m.data(), rows);
    }
    const ComplexVector ls =
        design.completeOrthogonalDecomposition().solve(Eigen::Map<const ComplexVector>(y.samples.data(), rows));
    for (int k = 0; k < 3; ++k)
        CHECK(std::abs(est.alpha_hat[k] - ls(k)) < 1e-8 * ls.norm());
    const ComplexVector resid = Eigen::Map<const ComplexVector>(y.samples.data(), rows) - design * ls;
    CHECK_THAT(est.residual, WithinRel(resid.squaredNorm(), 1e-8));
}

TEST_CASE("ML estimates stay inside the prior box", "[echo][ml]")
{
    const TargetSet t = truth();
    const WaveformBlock x = synthesize_waveform((1.0 / 8) * ComplexMatrix::Identity(8, 8), 8);
    const auto p = priors();
    for (std::uint64_t seed = 0; seed < 5; ++seed)
    {
        // very noisy: estimates may hit the box edge but not leave it
        const EstimationResult est = estimate_ml(generate_echo(x, t, 1e-4, seed), x, p, geom);
        for (int k = 0; k < 3; ++k)
        {
            CHECK(est.theta_hat[k] >= p[k].angle_bar_rad - p[k].angle_bound_rad - 1e-12);
            CHECK(est.theta_hat[k] <= p[k].angle_bar_rad + p[k].angle_bound_rad + 1e-12);
        }
    }
}

TEST_CASE("ML input validation", "[echo][ml]")
{
    const WaveformBlock x = synthesize_waveform(ComplexMatrix::Identity(8, 8), 8);
    EchoBlock wrong;
    wrong.samples = ComplexMatrix::Zero(7, 8);
    CHECK_THROWS_AS(estimate_ml(wrong, x, priors(), geom), DimensionError);
}

TEST_CASE("CRB-sampled estimator has the CRB as its error covariance", "[echo]")
{
    const TargetSet t = truth();
    const Fim f = assemble_fim(t, (1.0 / 8) * ComplexMatrix::Identity(8, 8), 20.0, 1e-8);
    const RealMatrix crb = crb_matrix(f);
    const int n = 6000;
    RealMatrix acc = RealMatrix::Zero(9, 9);
    RealVector mean = RealVector::Zero(9);
    for (int i = 0; i < n; ++i)
    {
        const EstimationResult e = estimate_crb_sampled(t, f, derive_seed(17, i));
        RealVector d(9);
        for (int k = 0; k < 3; ++k)
        {
            d(k) = e.theta_hat[k] - t.angles[k];
            d(3 + k) = (e.alpha_hat[k] - t.gains[k]).real();
            d(6 + k) = (e.alpha_hat[k] - t.gains[k]).imag();
        }
        mean += d;
        acc += d * d.transpose();
    }
    mean /= n;
    acc /= n;
    for (int p = 0; p < 9; ++p)
    {
        CHECK_THAT(acc(p, p), WithinRel(crb(p, p), 0.06));
        CHECK(std::abs(mean(p)) < 4.0 * std::sqrt(crb(p, p) / n));
    }
    const EstimationResult a = estimate_crb_sampled(t, f, 5), b = estimate_crb_sampled(t, f, 5);
    CHECK(a.theta_hat == b.theta_hat);
    CHECK(a.method == EstimatorKind::crb_sampled);
}
