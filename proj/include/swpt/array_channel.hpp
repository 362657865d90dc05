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

#ifndef SWPT_ARRAY_CHANNEL_HPP
#define SWPT_ARRAY_CHANNEL_HPP

#include "common.hpp"

namespace swpt
{
    // Uniform linear array shared by the transmit and receive apertures of the AP
    struct ArrayGeometry
    {
        int n_tx = 8;
        int n_rx = 8;
        double spacing_over_wavelength = 0.5;
        double wavelength_m = 0.125;

        void validate() const
        {
            if (n_tx < 1 || n_rx < 1)
                throw std::invalid_argument("ArrayGeometry: antenna counts must be >= 1");
            if (!(spacing_over_wavelength > 0.0) || !(wavelength_m > 0.0))
                throw std::invalid_argument("ArrayGeometry: spacing and wavelength must be positive");
        }
    };

    // True position and reflectivity of one energy receiver in the current block
    struct ErGroundTruth
    {
        double angle_rad = 0.0;
        double distance_m = 1.0;
        double rcs = 1.0;
    };

    // Previous-block estimate of one energy receiver with its error bounds
    struct PriorEstimate
    {
        double angle_bar_rad = 0.0;
        double distance_bar_m = 1.0;
        double angle_bound_rad = 0.0;
        double distance_bound_m = 0.0;
        double rcs = 1.0;
    };

    namespace detail
    {
        inline ComplexVector steering(int n, double spacing, double angle)
        {
            ComplexVector a(n);
            const double phase = 2.0 * pi * spacing * std::sin(angle);
            for (int i = 0; i < n; ++i)
                a(i) = std::polar(1.0, phase * i);
            return a;
        }

        inline ComplexVector steering_derivative(int n, double spacing, double angle)
        {
            ComplexVector d(n);
            const double phase = 2.0 * pi * spacing * std::sin(angle);
            const double slope = 2.0 * pi * spacing * std::cos(angle);
            for (int i = 0; i < n; ++i)
                d(i) = Complex(0.0, slope * i) * std::polar(1.0, phase * i);
            return d;
        }
    }

    /// Transmit steering vector, entry n = exp(j 2 pi n (d/lambda) sin(angle)).
    inline ComplexVector steering_tx(const ArrayGeometry &geom, double angle)
    {
        return detail::steering(geom.n_tx, geom.spacing_over_wavelength, angle);
    }

    inline ComplexVector steering_rx(const ArrayGeometry &geom, double angle)
    {
        return detail::steering(geom.n_rx, geom.spacing_over_wavelength, angle);
    }

    /// d/d(angle) of steering_tx.
    inline ComplexVector steering_derivative_tx(const ArrayGeometry &geom, double angle)
    {
        return detail::steering_derivative(geom.n_tx, geom.spacing_over_wavelength, angle);
    }

    inline ComplexVector steering_derivative_rx(const ArrayGeometry &geom, double angle)
    {
        return detail::steering_derivative(geom.n_rx, geom.spacing_over_wavelength, angle);
    }

    // Reduce a phase to the principal interval (-pi, pi]
    inline double principal_phase(double phase)
    {
        double r = std::remainder(phase, 2.0 * pi);
        if (r <= -pi)
            r += 2.0 * pi;
        return r;
    }

    /// LoS channel from the AP to one ER:
    /// h = sqrt(rho0 / d^2) exp(j 2 pi d / lambda) a_t(theta).
    inline ComplexVector channel(const ArrayGeometry &geom, const ErGroundTruth &er, double rho0)
    {
        const double amp = std::sqrt(rho0) / er.distance_m;
        const double phase = principal_phase(2.0 * pi * er.distance_m / geom.wavelength_m);
        return std::polar(amp, phase) * steering_tx(geom, er.angle_rad);
    }

    /// Round-trip path gain of the echo from one ER. Modulus sqrt(rho0 beta) / d^2,
    /// phase twice the one-way channel phase, reduced to (-pi, pi].
    inline Complex path_gain(const ArrayGeometry &geom, const ErGroundTruth &er, double rho0)
    {
        const double d2 = er.distance_m * er.distance_m;
        const double modulus = std::sqrt(rho0 * er.rcs) / d2;
        const double phase = principal_phase(2.0 * pi * 2.0 * er.distance_m / geom.wavelength_m);
        return std::polar(modulus, phase);
    }

    /// CSI rebuilt from an estimated echo gain and angle:
    /// h_hat = sqrt(|alpha|) (rho0 / beta)^(1/4) exp(j arg(alpha) / 2) a_t(theta_hat).
    ///
    /// arg(alpha) is taken on (-pi, pi] before halving, so h_hat may equal -h for exact
    /// inputs. Harvested power h^H R h is unaffected.
    inline ComplexVector construct_csi(const ArrayGeometry &geom, Complex alpha_hat, double theta_hat, double rcs,
                                       double rho0)
    {
        const double mag = std::abs(alpha_hat);
        if (!(mag > 0.0))
            throw std::invalid_argument("construct_csi: estimated path gain must be nonzero");
        const double amp = std::sqrt(mag) * std::pow(rho0 / rcs, 0.25);
        return std::polar(amp, std::arg(alpha_hat) / 2.0) * steering_tx(geom, theta_hat);
    }
}

#endif
