#pragma once
/**
 * @file   backproj.hpp
 * @brief  Brute-force backprojection over the full imaging grid, static
 *         (x, y) and dynamic (x, y, vx, vy). The reference every fast path is
 *         checked against.
 */

#include <sarmover/echo.hpp>
#include <sarmover/geometry.hpp>
#include <sarmover/parallel.hpp>
#include <sarmover/pattern.hpp>
#include <sarmover/types.hpp>

#include <cmath>

namespace sarmover
{
    /// Sample range [l0, l1) x [i0, i1) of a range-profile matrix.
    struct SampleBlock
    {
        int l0 = 0;
        int l1 = 0;
        int i0 = 0;
        int i1 = 0;
    };

    inline constexpr double min_amplitude_factor = 1e-30;

    /**
     * Σ_i Σ_l A⁻¹ P(l, i) e^{j 2 k_l |r + v t_i - r_i^a|} over one sample block,
     * l inner and i outer. A is evaluated at the initial position r.
     */
    [[nodiscard]] inline cplx backproject_cell (const Array2<cplx> &p, const RadarSampling &s, const Vec3 &r, const Vec3 &v, const SampleBlock &b,
                                                const AntennaPattern &pattern = {})
    {
        cplx acc{};
        for (int i = b.i0; i < b.i1; ++i)
        {
            const auto ii = static_cast<std::size_t> (i);
            const Vec3 &a = s.antenna[ii];
            const double range = (r + v * s.slow_time[ii] - a).norm ();
            for (int l = b.l0; l < b.l1; ++l)
            {
                const auto ll = static_cast<std::size_t> (l);
                const cplx amp = amplitude_factor (r, a, s.frequency[ll], pattern);
                if (std::abs (amp) < min_amplitude_factor)
                    continue;
                acc += p (l, i) / amp * std::polar (1.0, 2.0 * s.wavenumber[ll] * range);
            }
        }
        return acc;
    }

    /**
     * Same sum for an isotropic antenna, evaluated per pulse as a polynomial in
     * z = e^{j 2 Δk R} (Horner). Agrees with backproject_cell to rounding.
     */
    [[nodiscard]] inline cplx backproject_cell_fast (const Array2<cplx> &p, const RadarSampling &s, const Vec3 &r, const Vec3 &v, const SampleBlock &b)
    {
        const auto l0 = static_cast<std::size_t> (b.l0);
        const int nl = b.l1 - b.l0;
        const double k0 = s.wavenumber[l0];
        const double dk = nl > 1 ? (s.wavenumber[static_cast<std::size_t> (b.l1 - 1)] - k0) / (nl - 1) : 0.0;
        cplx acc{};
        for (int i = b.i0; i < b.i1; ++i)
        {
            const auto ii = static_cast<std::size_t> (i);
            const Vec3 &a = s.antenna[ii];
            const double d2 = (r - a).norm2 ();
            const double range = (r + v * s.slow_time[ii] - a).norm ();
            const cplx z = std::polar (1.0, 2.0 * dk * range);
            cplx h = p (b.l1 - 1, i);
            for (int l = b.l1 - 2; l >= b.l0; --l)
                h = h * z + p (l, i);
            acc += d2 * std::polar (1.0, 2.0 * k0 * range) * h;
        }
        return acc;
    }

    /// Static image g(x, y), indexed (jx, jy).
    [[nodiscard]] inline Array2<cplx> direct_static (const RangeProfile &p, const ImagingGrid &grid, const AntennaPattern &pattern = {})
    {
        const RadarSampling s (p.config);
        const int n = grid.points_per_dim;
        const SampleBlock all{0, p.n_freq (), 0, p.n_pulse ()};
        Array2<cplx> out (n, n);
        parallel_for (static_cast<std::size_t> (n) * static_cast<std::size_t> (n), [&] (std::size_t k) {
            const int jx = static_cast<int> (k / static_cast<std::size_t> (n));
            const int jy = static_cast<int> (k % static_cast<std::size_t> (n));
            out (jx, jy) = backproject_cell (p.values, s, {grid.x (jx), grid.y (jy), 0.0}, Vec3{}, all, pattern);
        });
        return out;
    }

    /// Dynamic image g(x, y, vx, vy). Refuses N > max_n (the output has N⁴ cells).
    [[nodiscard]] inline Array4<cplx> direct_dynamic (const RangeProfile &p, const ImagingGrid &grid, const AntennaPattern &pattern = {}, int max_n = 64)
    {
        const int n = grid.points_per_dim;
        if (n > max_n)
            throw OutputTooLarge ("direct_dynamic: N = " + std::to_string (n) + " exceeds the limit of " + std::to_string (max_n));
        const RadarSampling s (p.config);
        const SampleBlock all{0, p.n_freq (), 0, p.n_pulse ()};
        Array4<cplx> out (Shape4{n, n, n, n});
        parallel_for (out.size (), [&] (std::size_t k) {
            const Shape4 j = out.unravel (k);
            const Vec3 r{grid.x (j[0]), grid.y (j[1]), 0.0};
            const Vec3 v{grid.vx (j[2]), grid.vy (j[3]), 0.0};
            out[k] = backproject_cell (p.values, s, r, v, all, pattern);
        });
        return out;
    }

} // namespace sarmover
