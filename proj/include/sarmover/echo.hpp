#pragma once
/**
 * @file   echo.hpp
 * @brief  Forward model: point scatterers to the normalized range-profile
 *         matrix P(θ_i, f_l), plus its binary file format.
 *
 * The simulator uses the phase e^{-j 2 k R}; backprojection uses e^{+j 2 k R}.
 */

#include <sarmover/geometry.hpp>
#include <sarmover/parallel.hpp>
#include <sarmover/pattern.hpp>
#include <sarmover/scene.hpp>
#include <sarmover/types.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace sarmover
{
    /// N_f x N_p complex samples; element (l, i) is frequency f_l of pulse i.
    struct RangeProfile
    {
        Array2<cplx> values;
        RadarConfig config;

        RangeProfile () = default;
        explicit RangeProfile (const RadarConfig &cfg) : values (cfg.n, cfg.n), config (cfg) {}

        [[nodiscard]] int n_freq () const noexcept { return values.rows (); }
        [[nodiscard]] int n_pulse () const noexcept { return values.cols (); }
        [[nodiscard]] const RadarConfig &radar () const noexcept { return config; }

        cplx &operator() (int l, int i) noexcept { return values (l, i); }
        const cplx &operator() (int l, int i) const noexcept { return values (l, i); }

        [[nodiscard]] double energy () const noexcept
        {
            double e = 0.0;
            for (const auto &z : values.data ())
                e += std::norm (z);
            return e;
        }

        RangeProfile &operator+= (const RangeProfile &o)
        {
            if (!values.same_shape (o.values))
                throw DomainError ("range profile dimensions differ");
            for (std::size_t k = 0; k < values.size (); ++k)
                values.data ()[k] += o.values.data ()[k];
            return *this;
        }

        RangeProfile &operator*= (double s) noexcept
        {
            for (auto &z : values.data ())
                z *= s;
            return *this;
        }
    };

    /// Reference simulator: every sample evaluated independently.
    [[nodiscard]] inline RangeProfile simulate_exact (std::span<const PointTarget> targets, const RadarConfig &cfg, const AntennaPattern &pattern = {})
    {
        const RadarSampling s (cfg);
        RangeProfile out (cfg);
        const int n = cfg.n;
        parallel_for (static_cast<std::size_t> (n), [&] (std::size_t ii) {
            const int i = static_cast<int> (ii);
            const Vec3 &a = s.antenna[ii];
            const double t = s.slow_time[ii];
            for (int l = 0; l < n; ++l)
            {
                const auto ll = static_cast<std::size_t> (l);
                cplx acc{};
                for (const auto &tg : targets)
                {
                    const Vec3 r = on_ground (tg.position);
                    const double range = (on_ground (tg.position + tg.velocity * t) - a).norm ();
                    const cplx amp = amplitude_factor (r, a, s.frequency[ll], pattern) * std::polar (tg.amplitude, tg.phase);
                    acc += amp * std::polar (1.0, -2.0 * s.wavenumber[ll] * range);
                }
                out (l, i) = acc;
            }
        });
        return out;
    }

    /**
     * Fast simulator for isotropic antennas. Along the frequency axis the phase
     * of one scatterer advances by a constant factor, so each pulse costs one
     * complex multiply-add per (scatterer, frequency). Falls back to the
     * reference path for directional patterns.
     */
    [[nodiscard]] inline RangeProfile simulate (std::span<const PointTarget> targets, const RadarConfig &cfg, const AntennaPattern &pattern = {})
    {
        if (!pattern.isotropic ())
            return simulate_exact (targets, cfg, pattern);

        const RadarSampling s (cfg);
        RangeProfile out (cfg);
        const int n = cfg.n;
        const std::size_t m = targets.size ();
        const double k0 = s.wavenumber.front ();
        const double dk = s.wavenumber.size () > 1 ? s.wavenumber[1] - s.wavenumber[0] : 0.0;

        parallel_for (static_cast<std::size_t> (n), [&] (std::size_t ii) {
            const Vec3 &a = s.antenna[ii];
            const double t = s.slow_time[ii];
            std::vector<double> cr (m), ci (m), zr (m), zi (m);
            for (std::size_t k = 0; k < m; ++k)
            {
                const auto &tg = targets[k];
                const Vec3 r = on_ground (tg.position);
                const double range = (on_ground (tg.position + tg.velocity * t) - a).norm ();
                const cplx c = std::polar (tg.amplitude / (r - a).norm2 (), tg.phase - 2.0 * k0 * range);
                const cplx z = std::polar (1.0, -2.0 * dk * range);
                cr[k] = c.real ();
                ci[k] = c.imag ();
                zr[k] = z.real ();
                zi[k] = z.imag ();
            }
            for (int l = 0; l < n; ++l)
            {
                double sr[4] = {0.0, 0.0, 0.0, 0.0};
                double si[4] = {0.0, 0.0, 0.0, 0.0};
                std::size_t k = 0;
                for (; k + 4 <= m; k += 4)
                    for (std::size_t u = 0; u < 4; ++u)
                    {
                        const double re = cr[k + u];
                        const double im = ci[k + u];
                        sr[u] += re;
                        si[u] += im;
                        cr[k + u] = re * zr[k + u] - im * zi[k + u];
                        ci[k + u] = re * zi[k + u] + im * zr[k + u];
                    }
                for (; k < m; ++k)
                {
                    const double re = cr[k];
                    const double im = ci[k];
                    sr[0] += re;
                    si[0] += im;
                    cr[k] = re * zr[k] - im * zi[k];
                    ci[k] = re * zi[k] + im * zr[k];
                }
                out (l, static_cast<int> (ii)) = {(sr[0] + sr[1]) + (sr[2] + sr[3]), (si[0] + si[1]) + (si[2] + si[3])};
            }
        });
        return out;
    }

    /// Simulate a whole scene, clutter included.
    [[nodiscard]] inline RangeProfile simulate (const Scene &scene, const ImagingGrid &grid, const RadarConfig &cfg, const AntennaPattern &pattern = {})
    {
        const auto scatterers = scene_scatterers (scene, grid);
        return simulate (std::span<const PointTarget> (scatterers), cfg, pattern);
    }

    /// Add circular complex Gaussian noise with the given power per sample.
    inline void add_noise (RangeProfile &p, double power, std::uint64_t seed)
    {
        if (power < 0.0)
            throw DomainError ("noise power must be non-negative");
        std::mt19937_64 rng (seed);
        std::normal_distribution<double> g (0.0, std::sqrt (0.5 * power));
        for (auto &z : p.values.data ())
        {
            const double re = g (rng);
            const double im = g (rng);
            z += cplx (re, im);
        }
    }

    // -------------------------------------------------------------------------
    // SARP files
    // -------------------------------------------------------------------------

    namespace detail
    {
        template <typename T> void put_le (std::ostream &os, T value)
        {
            static_assert (sizeof (T) == 4 || sizeof (T) == 8);
            using U = std::conditional_t<sizeof (T) == 4, std::uint32_t, std::uint64_t>;
            const U bits = std::bit_cast<U> (value);
            char buf[sizeof (T)];
            for (std::size_t b = 0; b < sizeof (T); ++b)
                buf[b] = static_cast<char> ((bits >> (8 * b)) & 0xFF);
            os.write (buf, sizeof (T));
        }

        template <typename T> T get_le (std::istream &is)
        {
            using U = std::conditional_t<sizeof (T) == 4, std::uint32_t, std::uint64_t>;
            unsigned char buf[sizeof (T)];
            if (!is.read (reinterpret_cast<char *> (buf), sizeof (T)))
                throw IoError ("range profile: unexpected end of file");
            U bits = 0;
            for (std::size_t b = 0; b < sizeof (T); ++b)
                bits |= static_cast<U> (buf[b]) << (8 * b);
            return std::bit_cast<T> (bits);
        }
    } // namespace detail

    inline void write_profile (std::ostream &os, const RangeProfile &p)
    {
        const RadarSampling s (p.config);
        os.write ("SARP", 4);
        detail::put_le<std::uint32_t> (os, static_cast<std::uint32_t> (p.n_freq ()));
        detail::put_le<std::uint32_t> (os, static_cast<std::uint32_t> (p.n_pulse ()));
        detail::put_le (os, s.first_frequency ());
        detail::put_le (os, s.frequency_step ());
        detail::put_le (os, p.config.start_azimuth);
        detail::put_le (os, s.azimuth_step ());
        detail::put_le (os, p.config.dt ());
        detail::put_le (os, p.config.radius);
        detail::put_le (os, p.config.altitude);
        for (const auto &z : p.values.data ())
        {
            detail::put_le (os, z.real ());
            detail::put_le (os, z.imag ());
        }
        if (!os)
            throw IoError ("range profile: write failed");
    }

    [[nodiscard]] inline RangeProfile read_profile (std::istream &is)
    {
        char magic[4];
        if (!is.read (magic, 4) || std::memcmp (magic, "SARP", 4) != 0)
            throw IoError ("range profile: bad magic (expected SARP)");
        const auto nf = detail::get_le<std::uint32_t> (is);
        const auto np = detail::get_le<std::uint32_t> (is);
        if (nf != np || nf < 2 || !is_power_of_two (nf) || nf > (1u << 16))
            throw IoError ("range profile: header requires N_f = N_p, a power of two");
        const double f_start = detail::get_le<double> (is);
        const double f_step = detail::get_le<double> (is);
        const double theta_start = detail::get_le<double> (is);
        const double theta_step = detail::get_le<double> (is);
        const double dt = detail::get_le<double> (is);
        const double radius = detail::get_le<double> (is);
        const double height = detail::get_le<double> (is);

        RadarConfig cfg;
        cfg.n = static_cast<int> (nf);
        cfg.bandwidth = f_step * static_cast<double> (nf - 1);
        cfg.carrier = f_start + 0.5 * cfg.bandwidth;
        cfg.start_azimuth = theta_start;
        cfg.aperture = theta_step * static_cast<double> (np);
        cfg.pulse_interval = dt;
        cfg.radius = radius;
        cfg.altitude = height;
        try
        {
            cfg.validate ();
        }
        catch (const DomainError &e)
        {
            throw IoError (std::string ("range profile: invalid header: ") + e.what ());
        }

        RangeProfile p (cfg);
        for (auto &z : p.values.data ())
        {
            const double re = detail::get_le<double> (is);
            const double im = detail::get_le<double> (is);
            z = {re, im};
        }
        return p;
    }

    inline void save_profile (const std::string &path, const RangeProfile &p)
    {
        std::ofstream os (path, std::ios::binary);
        if (!os)
            throw IoError ("cannot open " + path + " for writing");
        write_profile (os, p);
    }

    [[nodiscard]] inline RangeProfile load_profile (const std::string &path)
    {
        std::ifstream is (path, std::ios::binary);
        if (!is)
            throw IoError ("cannot open " + path);
        return read_profile (is);
    }

} // namespace sarmover
