#pragma once
/**
 * @file   pattern.hpp
 * @brief  Antenna field pattern F(φ_el, φ_az, f) and the slowly varying
 *         amplitude factor A = F² / |r - r_a|².
 */

#include <sarmover/types.hpp>

#include <cmath>
#include <functional>

namespace sarmover
{
    /// Observation direction from the antenna towards a ground point.
    struct LookAngles
    {
        double elevation = 0.0; ///< depression below the horizontal [rad]
        double azimuth = 0.0;   ///< atan2(dy, dx) of r - r_a [rad]
    };

    [[nodiscard]] inline LookAngles look_angles (const Vec3 &r, const Vec3 &antenna) noexcept
    {
        const Vec3 d = r - antenna;
        return {std::atan2 (-d.z, std::hypot (d.x, d.y)), std::atan2 (d.y, d.x)};
    }

    /// Complex field pattern; an empty evaluator means isotropic (F = 1).
    struct AntennaPattern
    {
        std::function<cplx (double elevation, double azimuth, double frequency)> gain;

        [[nodiscard]] bool isotropic () const noexcept { return !gain; }

        [[nodiscard]] cplx operator() (const LookAngles &phi, double frequency) const
        {
            return gain ? gain (phi.elevation, phi.azimuth, frequency) : cplx{1.0, 0.0};
        }
    };

    /// A(r, r_a, f) = F²(φ, f) / |r - r_a|².
    [[nodiscard]] inline cplx amplitude_factor (const Vec3 &r, const Vec3 &antenna, double frequency, const AntennaPattern &pattern)
    {
        const double d2 = (r - antenna).norm2 ();
        if (pattern.isotropic ())
            return {1.0 / d2, 0.0};
        const cplx f = pattern (look_angles (r, antenna), frequency);
        return f * f / d2;
    }

} // namespace sarmover
