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

#include <swpt/fisher_crb.hpp>

#include <catch_amalgamated.hpp>

using namespace swpt;
using Catch::Matchers::WithinRel;

namespace
{
    TargetSet make_targets(int n, std::vector<double> angles, std::vector<Complex> gains)
    {
        TargetSet t;
        t.geometry = ArrayGeometry{n, n, 0.5, 0.125};
        t.angles = std::move(angles);
        t.gains = std::move(gains);
        return t;
    }
}

TEST_CASE("FIM agrees with the finite-difference Jacobian oracle", "[fim]")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ang(-1.0, 1.0), mag(0.5, 2.0), ph(-pi, pi);
    for (int trial = 0; trial < 6; ++trial)
    {
        const int n = trial % 2 ? 8 : 4;
        const int k = 1 + trial % 3;
        std::vector<double> angles;
        std::vector<Complex> gains;
        for (int i = 0; i < k; ++i)
        {
            angles.push_back(ang(rng));
            gains.push_back(std::polar(mag(rng), ph(rng)));
        }
        const TargetSet t = make_targets(n, angles, gains);
        const HermitianMatrix s = oracle::random_covariance(n, 1.0, rng);
        const int tau = 2 * n;
        const WaveformBlock x = synthesize_waveform(s, tau);
        const Fim f = assemble_fim(t, s, tau, 0.1);
        CHECK(oracle::rel_frobenius(f.matrix, oracle::fd_fim(t, x, 0.1)) < 1e-6);
    }
}

TEST_CASE("FIM is symmetric and scales linearly in tau and S", "[fim]")
{
    std::mt19937_64 rng(3);
    const TargetSet t = make_targets(6, {-0.3, 0.2, 0.9}, {Complex(1.0, 0.5), Complex(-0.2, 0.7), Complex(0.3, 0.0)});
    const HermitianMatrix s = oracle::random_covariance(6, 2.0, rng);
    const Fim f1 = assemble_fim(t, s, 1.0, 0.5);
    const Fim f3 = assemble_fim(t, s, 3.0, 0.5);
    const Fim f2s = assemble_fim(t, 2.0 * s, 1.0, 0.5);
    CHECK((f1.matrix - f1.matrix.transpose()).norm() < 1e-12 * f1.matrix.norm());
    CHECK((f3.matrix - 3.0 * f1.matrix).norm() < 1e-12 * f3.matrix.norm());
    CHECK((f2s.matrix - 2.0 * f1.matrix).norm() < 1e-12 * f2s.matrix.norm());
}

TEST_CASE("CRB equals the trace of the dense inverse", "[fim]")
{
    std::mt19937_64 rng(11);
    const TargetSet t = make_targets(8, {0.0, 0.5236, 1.0472}, {Complex(4e-4, 0.0), Complex(0.0, 1.5e-4), Complex(-1e-4, 0.0)});
    const HermitianMatrix s = oracle::random_covariance(8, 1.0, rng);
    const Fim f = assemble_fim(t, s, 10.0, 1e-8);
    const double dense = f.matrix.inverse().trace();
    CHECK_THAT(crb_trace(f), WithinRel(dense, 1e-8));
    CHECK((crb_per_parameter(f) - f.matrix.inverse().diagonal()).norm() < 1e-8 * std::abs(dense));
}

TEST_CASE("CRB halves when the sensing duration doubles", "[fim]")
{
    const TargetSet t = make_targets(8, {0.1, 0.6}, {Complex(1e-3, 2e-4), Complex(-3e-4, 1e-4)});
    const HermitianMatrix s = (1.0 / 8) * ComplexMatrix::Identity(8, 8);
    for (double tau : {8.0, 13.0, 50.0})
    {
        const double c1 = crb_trace(assemble_fim(t, s, tau, 1e-8));
        const double c2 = crb_trace(assemble_fim(t, s, 2.0 * tau, 1e-8));
        CHECK_THAT(c2, WithinRel(c1 / 2.0, 1e-12));
    }
}

TEST_CASE("unidentifiable configurations are rejected", "[fim]")
{
    // two reflectors at the same angle cannot be told apart
    const TargetSet same = make_targets(4, {0.7, 0.7}, {Complex(1.0, 0.0), Complex(0.5, 0.0)});
    CHECK_THROWS_AS(crb_trace(assemble_fim(same, ComplexMatrix::Identity(4, 4), 10.0, 1.0)), UnidentifiableError);
    // nothing transmitted
    const TargetSet one = make_targets(4, {0.2}, {Complex(1.0, 0.0)});
    CHECK_THROWS_AS(crb_trace(assemble_fim(one, ComplexMatrix::Zero(4, 4), 10.0, 1.0)), UnidentifiableError);
}

TEST_CASE("FIM input validation", "[fim]")
{
    const TargetSet ok = make_targets(4, {0.0}, {Complex(1.0, 0.0)});
    HermitianMatrix s = ComplexMatrix::Identity(4, 4);
    CHECK_THROWS_AS(assemble_fim(ok, ComplexMatrix::Identity(3, 3), 1.0, 1.0), DimensionError);
    s(0, 1) = Complex(0.0, 1.0);
    CHECK_THROWS(assemble_fim(ok, s, 1.0, 1.0)); // not Hermitian

    TargetSet too_many = make_targets(2, {0.0, 0.3, 0.6}, {Complex(1.0), Complex(1.0), Complex(1.0)});
    CHECK_THROWS_AS(assemble_fim(too_many, ComplexMatrix::Identity(2, 2), 1.0, 1.0), DimensionError);

    TargetSet wide = ok;
    wide.geometry = ArrayGeometry{4, 3, 0.5, 0.125}; // N_t > N_r
    CHECK_THROWS_AS(assemble_fim(wide, ComplexMatrix::Identity(4, 4), 1.0, 1.0), DimensionError);
}
