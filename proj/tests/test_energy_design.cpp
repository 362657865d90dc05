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


#include <swpt/array_channel.hpp>
#include <swpt/energy_design.hpp>

#include <catch_amalgamated.hpp>

#include <random>

using namespace swpt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    std::vector<ComplexVector> random_channels(int n, int k, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> nd;
        std::vector<ComplexVector> hs;
        for (int i = 0; i < k; ++i)
        {
            ComplexVector h(n);
            for (int j = 0; j < n; ++j)
                h(j) = Complex(nd(rng), nd(rng)) * 1e-2;
            hs.push_back(h);
        }
        return hs;
    }
}

TEST_CASE("orthogonal equal-norm channels split the power evenly", "[energy]")
{
    const ArrayGeometry g{4, 4, 0.5, 0.125};
    const ComplexVector h1 = 0.01 * steering_tx(g, 0.0);
    const ComplexVector h2 = 0.01 * steering_tx(g, deg_to_rad(30.0));
    REQUIRE(std::abs(h1.dot(h2)) < 1e-15);
    for (double p : {0.1, 1.0, 3.16})
    {
        const EnergyDesign d = solve_energy_sdp({h1, h2}, p);
        CHECK_THAT(d.e_star, WithinRel(p * h1.squaredNorm() / 2.0, 1e-6));
        CHECK(d.rank == 2);
    }
}

TEST_CASE("single receiver: MRT closed form, with and without the solver", "[energy]")
{
    const ArrayGeometry g{8, 8, 0.5, 0.125};
    const ComplexVector h = channel(g, ErGroundTruth{0.3, 6.0, 1.0}, 1e-4);
    const EnergyDesign closed = optimize_energy_covariance({h}, 2.0);
    CHECK_THAT(closed.e_star, WithinRel(2.0 * 1e-4 * 8 / 36.0, 1e-12));
    CHECK(closed.rank == 1);
    const EnergyDesign solved = solve_energy_sdp({h}, 2.0);
    CHECK_THAT(solved.e_star, WithinRel(closed.e_star, 1e-6));
}

TEST_CASE("max-min design is feasible and dominates simple beamformers", "[energy]")
{
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 5; ++trial)
    {
        const int n = 4 + 2 * trial;
        const auto hs = random_channels(n, 3, rng);
        const EnergyDesign d = optimize_energy_covariance(hs, 1.0);
        CHECK(d.r_x.trace().real() <= 1.0 + 1e-12);
        CHECK(Eigen::SelfAdjointEigenSolver<ComplexMatrix>(d.r_x).eigenvalues()(0) >= -1e-12);
        CHECK(d.e_star > 0.0);
        CHECK(d.e_star >= min_harvested(hs, isotropic_covariance(n, 1.0)) * (1 - 1e-7));
        for (const auto &h : hs)
            CHECK(d.e_star >= min_harvested(hs, mrt_covariance(h, 1.0)) * (1 - 1e-7));
        // upper bound: no receiver can get more than its own MRT power
        for (const auto &h : hs)
            CHECK(d.e_star <= h.squaredNorm() * (1 + 1e-9));
    }
}

TEST_CASE("design power scales with the budget", "[energy]")
{
    std::mt19937_64 rng(8);
    const auto hs = random_channels(6, 3, rng);
    const double e1 = optimize_energy_covariance(hs, 1.0).e_star;
    const double e10 = optimize_energy_covariance(hs, 10.0).e_star;
    CHECK_THAT(e10, WithinRel(10.0 * e1, 1e-6));
}

TEST_CASE("received power evaluation", "[energy]")
{
    const ComplexVector h = ComplexVector::Constant(4, Complex(0.0, 0.5));
    const HermitianMatrix iso = isotropic_covariance(4, 2.0);
    CHECK_THAT(harvested_power(h, iso), WithinRel(0.5 * h.squaredNorm(), 1e-15));
    CHECK_THAT(min_avg_harvested({h}, iso, 50, 200), WithinRel(0.75 * 0.5, 1e-15));
    CHECK_THAT(min_avg_harvested({h}, iso, 200, 200), WithinAbs(0.0, 0.0));
    CHECK_THROWS(min_avg_harvested({h}, iso, 201, 200));
    CHECK_THROWS_AS(harvested_power(ComplexVector::Ones(3), iso), DimensionError);
}

TEST_CASE("eigen beams reproduce the covariance", "[energy]")
{
    std::mt19937_64 rng(12);
    const auto hs = random_channels(6, 3, rng);
    const EnergyDesign d = optimize_energy_covariance(hs, 1.0);
    const auto beams = eigen_beams(d.r_x);
    REQUIRE_FALSE(beams.empty());
    HermitianMatrix rebuilt = HermitianMatrix::Zero(6, 6);
    double total = 0.0;
    for (std::size_t i = 0; i < beams.size(); ++i)
    {
        CHECK_THAT(beams[i].direction.norm(), WithinAbs(1.0, 1e-12));
        if (i > 0)
            CHECK(beams[i].power <= beams[i - 1].power);
        rebuilt += beams[i].power * beams[i].direction * beams[i].direction.adjoint();
        total += beams[i].power;
    }
    CHECK((rebuilt - d.r_x).norm() < 1e-12);
    CHECK_THAT(total, WithinRel(d.r_x.trace().real(), 1e-12));
}

TEST_CASE("energy design input errors", "[energy]")
{
    CHECK_THROWS_AS(optimize_energy_covariance({}, 1.0), DimensionError);
    CHECK_THROWS_AS(optimize_energy_covariance({ComplexVector::Ones(3), ComplexVector::Ones(4)}, 1.0), DimensionError);
    CHECK_THROWS(optimize_energy_covariance({ComplexVector::Zero(3), ComplexVector::Ones(3)}, 1.0));
    CHECK_THROWS(optimize_energy_covariance({ComplexVector::Ones(3)}, 0.0));
}
