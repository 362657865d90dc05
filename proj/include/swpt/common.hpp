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

#ifndef SWPT_COMMON_HPP
#define SWPT_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace swpt
{
    using Complex = std::complex<double>;
    using ComplexVector = Eigen::VectorXcd;
    using ComplexMatrix = Eigen::MatrixXcd;
    using RealVector = Eigen::VectorXd;
    using RealMatrix = Eigen::MatrixXd;

    // Complex Hermitian PSD role: S_x, R_x and their test fixtures.
    using HermitianMatrix = Eigen::MatrixXcd;

    inline constexpr double pi = std::numbers::pi;

    // ---- error types -------------------------------------------------------

    struct DimensionError : std::invalid_argument
    {
        using std::invalid_argument::invalid_argument;
    };

    // FIM singular or too ill-conditioned to invert
    struct UnidentifiableError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    struct InfeasibleError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    struct SolverError : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    // ---- unit conversions --------------------------------------------------

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
    inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
    inline double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
    inline double deg_to_rad(double deg) { return deg * pi / 180.0; }
    inline double rad_to_deg(double rad) { return rad * 180.0 / pi; }

    // Largest deviation from Hermitian symmetry, relative to the largest entry
    inline double hermitian_defect(const ComplexMatrix &m)
    {
        if (m.size() == 0)
            return 0.0;
        double scale = m.cwiseAbs().maxCoeff();
        if (scale == 0.0)
            return 0.0;
        return (m - m.adjoint()).cwiseAbs().maxCoeff() / scale;
    }

    inline void require_square(const ComplexMatrix &m, Eigen::Index n, const char *what)
    {
        if (m.rows() != n || m.cols() != n)
            throw DimensionError(std::string(what) + ": expected " + std::to_string(n) + "x" + std::to_string(n) +
                                 " matrix, got " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }

    // Real symmetric embedding [[Re H, -Im H], [Im H, Re H]] of a Hermitian matrix.
    // H is PSD iff the embedding is PSD; each eigenvalue of H appears twice.
    inline RealMatrix real_embedding(const ComplexMatrix &h)
    {
        const Eigen::Index n = h.rows();
        RealMatrix out(2 * n, 2 * n);
        out.topLeftCorner(n, n) = h.real();
        out.topRightCorner(n, n) = -h.imag();
        out.bottomLeftCorner(n, n) = h.imag();
        out.bottomRightCorner(n, n) = h.real();
        return out;
    }

    // Inverse of real_embedding (averages the redundant blocks)
    inline ComplexMatrix complex_from_embedding(const RealMatrix &e)
    {
        const Eigen::Index n = e.rows() / 2;
        RealMatrix re = 0.5 * (e.topLeftCorner(n, n) + e.bottomRightCorner(n, n));
        RealMatrix im = 0.5 * (e.bottomLeftCorner(n, n) - e.topRightCorner(n, n));
        ComplexMatrix out(n, n);
        out.real() = re;
        out.imag() = im;
        return out;
    }

    // Deterministic seed derivation: (master, a, b) -> independent 64-bit stream seed (splitmix64 mixing)
    inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0)
    {
        auto mix = [](std::uint64_t z)
        {
            z += 0x9e3779b97f4a7c15ULL;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        };
        return mix(mix(mix(master) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
    }
}

#endif
