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

#include <swpt/sdp.hpp>

#include <catch_amalgamated.hpp>

using namespace swpt;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    double lambda_min(const ComplexMatrix &c)
    {
        return Eigen::SelfAdjointEigenSolver<ComplexMatrix>(c, Eigen::EigenvaluesOnly).eigenvalues()(0);
    }

    // min <C, X> s.t. tr X = 1, X >= 0 has optimum lambda_min(C)
    sdp::Solution min_eig(const ComplexMatrix &c, bool complex)
    {
        sdp::Problem p;
        const int x = p.add_matrix_variable("X", static_cast<int>(c.rows()), complex);
        p.set_objective(sdp::Sense::minimize, p.inner(x, c));
        p.add_equality(p.trace(x), 1.0);
        return sdp::solve(p);
    }
}

TEST_CASE("minimum eigenvalue SDP", "[sdp]")
{
    std::mt19937_64 rng(5);
    for (int n : {2, 3, 6})
    {
        const HermitianMatrix h = oracle::random_covariance(n, 1.0, rng) - 0.3 * ComplexMatrix::Identity(n, n);
        const sdp::Solution sol = min_eig(h, true);
        REQUIRE(sol.ok());
        CHECK_THAT(sol.objective_value, WithinAbs(lambda_min(h), 1e-7));
        CHECK(sol.dual_bound <= sol.objective_value + 1e-12);
        CHECK_THAT(sol.matrix_values[0].trace().real(), WithinAbs(1.0, 1e-9));

        const ComplexMatrix sym = h.real().cast<Complex>();
        const sdp::Solution real_sol = min_eig(sym, false);
        REQUIRE(real_sol.ok());
        CHECK_THAT(real_sol.objective_value, WithinAbs(lambda_min(sym), 1e-7));
    }
}

TEST_CASE("complex problem matches its real embedding", "[sdp]")
{
    std::mt19937_64 rng(9);
    const HermitianMatrix h = oracle::random_covariance(4, 1.0, rng);
    const sdp::Solution c = min_eig(h, true);

    // same problem over real symmetric 8x8 with the embedded cost and tr = 2
    sdp::Problem p;
    const int x = p.add_matrix_variable("X", 8, false);
    p.set_objective(sdp::Sense::minimize, p.inner(x, real_embedding(h).cast<Complex>()));
    p.add_equality(p.trace(x), 2.0);
    const sdp::Solution r = sdp::solve(p);
    REQUIRE(c.ok());
    REQUIRE(r.ok());
    CHECK_THAT(r.objective_value, WithinAbs(2.0 * c.objective_value, 1e-7));
}

TEST_CASE("Schur complement epigraph", "[sdp]")
{
    // min t  s.t. [[x, 1], [1, t]] >= 0, x <= 2.5  ->  t = 1 / 2.5
    sdp::Problem p;
    const int x = p.add_scalar_variable("x");
    const int t = p.add_scalar_variable("t");
    sdp::MatrixForm m(2);
    m.constant(0, 1) = m.constant(1, 0) = 1.0;
    ComplexMatrix ex = ComplexMatrix::Zero(2, 2), et = ComplexMatrix::Zero(2, 2);
    ex(0, 0) = 1.0;
    et(1, 1) = 1.0;
    m.add(p.scalar_variables()[x].coord, ex);
    m.add(p.scalar_variables()[t].coord, et);
    p.add_lmi(m, "schur");
    sdp::LinearForm cap;
    cap.constant = 2.5;
    p.add_lmi(sdp::as_matrix_form(cap - p.scalar(x)), "cap");
    p.set_objective(sdp::Sense::minimize, p.scalar(t));
    const sdp::Solution sol = sdp::solve(p);
    REQUIRE(sol.ok());
    CHECK_THAT(sdp::scalar_value(p, sol, "t"), WithinRel(0.4, 1e-7));
    CHECK_THAT(sdp::scalar_value(p, sol, "x"), WithinRel(2.5, 1e-6));
}

TEST_CASE("2x2 real SDP against an exhaustive cone grid", "[sdp]")
{
    // min <C, X> s.t. X >= 0, X11 + 2 X22 = 1, with an off-diagonal reward
    RealMatrix c(2, 2);
    c << 1.0, -0.8, -0.8, 0.5;
    sdp::Problem p;
    const int x = p.add_matrix_variable("X", 2, false);
    ComplexMatrix w = ComplexMatrix::Zero(2, 2);
    w(0, 0) = 1.0;
    w(1, 1) = 2.0;
    p.add_equality(p.inner(x, w), 1.0);
    p.set_objective(sdp::Sense::minimize, p.inner(x, c.cast<Complex>()));
    const sdp::Solution sol = sdp::solve(p);
    REQUIRE(sol.ok());

    double best = std::numeric_limits<double>::infinity();
    for (double a = 0.0; a <= 1.0 + 1e-12; a += 1e-3)
    {
        const double b = (1.0 - a) / 2.0;
        const double r = std::sqrt(a * b);
        for (double off = -r; off <= r; off += std::max(r / 200.0, 1e-9))
            best = std::min(best, c(0, 0) * a + c(1, 1) * b + 2.0 * c(0, 1) * off);
    }
    CHECK(sol.objective_value <= best + 1e-9);
    CHECK(sol.objective_value >= best - 1e-3);
}

TEST_CASE("infeasible LMI system is reported", "[sdp]")
{
    sdp::Problem p;
    const int x = p.add_matrix_variable("X", 3, true);
    p.add_equality(p.trace(x), -1.0);
    p.set_objective(sdp::Sense::minimize, p.trace(x));
    const sdp::Solution sol = sdp::solve(p);
    CHECK(sol.status == sdp::Status::infeasible);
    CHECK_FALSE(sol.ok());
}

TEST_CASE("unbounded objective is not reported optimal", "[sdp]")
{
    sdp::Problem p;
    const int t = p.add_scalar_variable("t");
    sdp::MatrixForm m(1);
    ComplexMatrix e = ComplexMatrix::Ones(1, 1);
    m.add(p.scalar_variables()[t].coord, e);
    p.add_lmi(m); // t >= 0
    p.set_objective(sdp::Sense::maximize, p.scalar(t));
    const sdp::Solution sol = sdp::solve(p);
    CHECK_FALSE(sol.ok());
}

TEST_CASE("maximization sense and dual bound", "[sdp]")
{
    // max <C, X> s.t. tr X = 2 gives 2 lambda_max
    std::mt19937_64 rng(2);
    const HermitianMatrix h = oracle::random_covariance(3, 1.0, rng);
    sdp::Problem p;
    const int x = p.add_matrix_variable("X", 3);
    p.add_equality(p.trace(x), 2.0);
    p.set_objective(sdp::Sense::maximize, p.inner(x, h));
    const sdp::Solution sol = sdp::solve(p);
    REQUIRE(sol.ok());
    const double lmax = Eigen::SelfAdjointEigenSolver<ComplexMatrix>(h).eigenvalues()(2);
    CHECK_THAT(sol.objective_value, WithinAbs(2.0 * lmax, 1e-7));
    CHECK(sol.dual_bound >= sol.objective_value - 1e-12);
    CHECK(sol.relative_duality_gap <= 1e-6);
}

TEST_CASE("problem construction errors", "[sdp]")
{
    sdp::Problem p;
    CHECK_THROWS_AS(p.add_matrix_variable("X", 0), DimensionError);
    CHECK_THROWS(sdp::solve(p));
}
