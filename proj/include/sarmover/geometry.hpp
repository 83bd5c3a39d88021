#pragma once
/**
 * @file   geometry.hpp
 * @brief  Circular trajectory, sampled acquisition axes, hypothesis grids and
 *         the road-alignment transform.
 *
 * Conventions
 * - Ground points are (x, y, 0); the antenna flies at constant height h on a
 *   circle of radius R centred above the origin.
 * - Pulse and frequency indices are zero-based.
 * - A target at r with velocity v sits at r + v * t_i with t_i = i * Δt. By
 *   default Δt = 1 / N, so slow time spans [0, 1) and velocities are metres
 *   per dwell.
 */

#include <sarmover/types.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sarmover
{
    inline constexpr double speed_of_light = 2.99792458e8;

    /// Bandwidth giving slant-range resolution dr (B = c / 2dr).
    [[nodiscard]] constexpr double bandwidth_for_resolution (double range_resolution) noexcept
    {
        return speed_of_light / (2.0 * range_resolution);
    }

    struct RadarConfig
    {
        double radius = 200.0;                             ///< R [m]
        double altitude = 200.0;                           ///< h [m]
        double carrier = 3.0e9;                            ///< f_c [Hz]
        double bandwidth = bandwidth_for_resolution (4.0); ///< B [Hz]
        int n = 64;                                        ///< N = N_f = N_p
        std::optional<double> pulse_interval;              ///< Δt; default 1 / N
        std::optional<double> aperture;                    ///< total azimuth span [rad]; default B / f_c
        double start_azimuth = 0.0;                        ///< θ of the first pulse [rad]

        /// Azimuth span actually used. The default matches cross-range and
        /// ground-range resolution so the N x N image grid is consistently sampled.
        [[nodiscard]] double effective_aperture () const noexcept { return aperture.value_or (bandwidth / carrier); }
        [[nodiscard]] double dt () const noexcept { return pulse_interval.value_or (1.0 / static_cast<double> (n)); }
        [[nodiscard]] double dwell () const noexcept { return dt () * static_cast<double> (n); }
        [[nodiscard]] double range_resolution () const noexcept { return speed_of_light / (2.0 * bandwidth); }
        [[nodiscard]] double elevation () const noexcept { return std::atan2 (altitude, radius); }
        [[nodiscard]] int max_level () const noexcept { return ilog2 (n); }

        void validate () const
        {
            if (!is_power_of_two (n) || n < 2)
                throw DomainError ("radar.n must be a power of two >= 2, got " + std::to_string (n));
            if (!(radius > 0.0) || !(altitude > 0.0))
                throw DomainError ("radar radius and altitude must be positive");
            if (!(carrier > 0.0) || !(bandwidth > 0.0) || bandwidth >= 2.0 * carrier)
                throw DomainError ("radar carrier/bandwidth must satisfy 0 < B < 2 f_c");
            if (!(dt () > 0.0))
                throw DomainError ("radar.pulse_interval must be positive");
            if (!(effective_aperture () > 0.0) || effective_aperture () > 2.0 * std::numbers::pi + 1e-12)
                throw DomainError ("radar.aperture must lie in (0, 2*pi]");
        }
    };

    /// Sampled acquisition: every per-pulse and per-frequency quantity.
    struct RadarSampling
    {
        RadarConfig config;
        std::vector<double> azimuth;     ///< θ_i
        std::vector<double> frequency;   ///< f_l
        std::vector<double> wavenumber;  ///< k_l = 2π f_l / c
        std::vector<double> slow_time;   ///< t_i
        std::vector<Vec3> antenna;       ///< r_i^a

        RadarSampling () = default;

        explicit RadarSampling (const RadarConfig &cfg) : config (cfg)
        {
            cfg.validate ();
            const auto n = static_cast<std::size_t> (cfg.n);
            azimuth.resize (n);
            frequency.resize (n);
            wavenumber.resize (n);
            slow_time.resize (n);
            antenna.resize (n);
            const double dtheta = azimuth_step ();
            const double df = frequency_step ();
            for (std::size_t i = 0; i < n; ++i)
            {
                const double di = static_cast<double> (i);
                azimuth[i] = cfg.start_azimuth + di * dtheta;
                slow_time[i] = di * cfg.dt ();
                antenna[i] = {cfg.radius * std::cos (azimuth[i]), cfg.radius * std::sin (azimuth[i]), cfg.altitude};
                frequency[i] = first_frequency () + di * df;
                wavenumber[i] = 2.0 * std::numbers::pi * frequency[i] / speed_of_light;
            }
        }

        [[nodiscard]] int size () const noexcept { return config.n; }
        [[nodiscard]] double first_frequency () const noexcept { return config.carrier - 0.5 * config.bandwidth; }
        [[nodiscard]] double frequency_step () const noexcept { return config.bandwidth / static_cast<double> (config.n - 1); }
        [[nodiscard]] double azimuth_step () const noexcept { return config.effective_aperture () / static_cast<double> (config.n); }
    };

    /// Antenna phase centre of pulse i (zero-based).
    [[nodiscard]] inline Vec3 antenna_position (const RadarConfig &cfg, int i)
    {
        if (i < 0 || i >= cfg.n)
            throw std::out_of_range ("pulse index " + std::to_string (i) + " outside [0, " + std::to_string (cfg.n) + ")");
        const double theta = cfg.start_azimuth + static_cast<double> (i) * cfg.effective_aperture () / static_cast<double> (cfg.n);
        return {cfg.radius * std::cos (theta), cfg.radius * std::sin (theta), cfg.altitude};
    }

    /// |(r + v t_i) - r_i^a| for a ground point moving at constant velocity.
    [[nodiscard]] inline double slant_range (const Vec2 &r, const Vec2 &v, int i, const RadarConfig &cfg)
    {
        const double t = static_cast<double> (i) * cfg.dt ();
        return (on_ground (r + v * t) - antenna_position (cfg, i)).norm ();
    }

    // -------------------------------------------------------------------------
    // Imaging grids
    // -------------------------------------------------------------------------

    /// Output grid description: symmetric extents and N points per dimension.
    struct ImagingGrid
    {
        double extent_x = 128.0;
        double extent_y = 128.0;
        double extent_vx = 1.0;
        double extent_vy = 1.0;
        int points_per_dim = 64;

        [[nodiscard]] double dx () const noexcept { return extent_x / points_per_dim; }
        [[nodiscard]] double dy () const noexcept { return extent_y / points_per_dim; }
        [[nodiscard]] double dvx () const noexcept { return extent_vx / points_per_dim; }
        [[nodiscard]] double dvy () const noexcept { return extent_vy / points_per_dim; }

        /// Coordinate of index j on a centred axis with n points over extent e.
        [[nodiscard]] static double coordinate (double extent, int n, int j) noexcept
        {
            return (static_cast<double> (j) - static_cast<double> (n / 2)) * (extent / static_cast<double> (n));
        }
        [[nodiscard]] double x (int j) const noexcept { return coordinate (extent_x, points_per_dim, j); }
        [[nodiscard]] double y (int j) const noexcept { return coordinate (extent_y, points_per_dim, j); }
        [[nodiscard]] double vx (int j) const noexcept { return coordinate (extent_vx, points_per_dim, j); }
        [[nodiscard]] double vy (int j) const noexcept { return coordinate (extent_vy, points_per_dim, j); }

        /// Nearest grid index of a spatial/velocity coordinate (clamped).
        [[nodiscard]] static int nearest (double extent, int n, double value) noexcept
        {
            const double j = std::round (value / (extent / n)) + n / 2;
            return static_cast<int> (std::clamp (j, 0.0, static_cast<double> (n - 1)));
        }

        [[nodiscard]] bool contains (const Vec2 &p) const noexcept
        {
            return p.x >= x (0) - 0.5 * dx () && p.x <= x (points_per_dim - 1) + 0.5 * dx () && p.y >= y (0) - 0.5 * dy () &&
                   p.y <= y (points_per_dim - 1) + 0.5 * dy ();
        }

        void validate () const
        {
            if (!is_power_of_two (points_per_dim))
                throw DomainError ("grid points_per_dim must be a power of two");
            if (!(extent_x > 0.0) || !(extent_y > 0.0) || !(extent_vx > 0.0) || !(extent_vy > 0.0))
                throw DomainError ("grid extents must be positive");
        }
    };

    /**
     * Spatial sampling of a quarter of the range resolution. The velocity step
     * is the one whose Doppler displacement equals one spatial cell, Δx Θ / T
     * (T the dwell), so velocity is sampled as densely as position.
     */
    [[nodiscard]] inline ImagingGrid default_grid (const RadarConfig &cfg)
    {
        ImagingGrid g;
        g.points_per_dim = cfg.n;
        const double dx = 0.25 * cfg.range_resolution ();
        g.extent_x = g.extent_y = dx * cfg.n;
        g.extent_vx = g.extent_vy = g.extent_x * cfg.effective_aperture () / cfg.dwell ();
        return g;
    }

    /// Axis order used by hypothesis grids and 4-D arrays.
    enum Axis : int
    {
        axis_x = 0,
        axis_y = 1,
        axis_vx = 2,
        axis_vy = 3
    };

    struct AxisSpec
    {
        double center = 0.0;
        double extent = 0.0;
        bool active = false;
    };

    /// One pyramid level of a hypothesis grid. Inactive axes have one point at their centre.
    struct LevelGrid
    {
        int level = 0;
        Shape4 count{1, 1, 1, 1};
        std::array<double, 4> center{};
        std::array<double, 4> step{};

        [[nodiscard]] double coord (int axis, int j) const noexcept
        {
            const auto a = static_cast<std::size_t> (axis);
            return center[a] + static_cast<double> (j - count[a] / 2) * step[a];
        }

        /// Ground position and velocity (z = 0) of a grid point.
        void point (const Shape4 &idx, Vec3 &r, Vec3 &v) const noexcept
        {
            r = {coord (axis_x, idx[0]), coord (axis_y, idx[1]), 0.0};
            v = {coord (axis_vx, idx[2]), coord (axis_vy, idx[3]), 0.0};
        }
    };

    /// The (r, v) space an imaging run searches, as four axes of which 2 or 4 are active.
    struct HypothesisSpace
    {
        std::array<AxisSpec, 4> axes{};

        [[nodiscard]] int active_dims () const noexcept
        {
            return static_cast<int> (std::count_if (axes.begin (), axes.end (), [] (const AxisSpec &a) { return a.active; }));
        }

        [[nodiscard]] LevelGrid at_level (int level) const noexcept
        {
            LevelGrid g;
            g.level = level;
            for (std::size_t a = 0; a < 4; ++a)
            {
                g.center[a] = axes[a].center;
                if (axes[a].active)
                {
                    g.count[a] = 1 << level;
                    g.step[a] = axes[a].extent / static_cast<double> (g.count[a]);
                }
                else
                {
                    g.count[a] = 1;
                    g.step[a] = 0.0;
                }
            }
            return g;
        }

        /// Full (x, y, vx, vy) search.
        [[nodiscard]] static HypothesisSpace four_d (const ImagingGrid &g)
        {
            HypothesisSpace s;
            s.axes = {AxisSpec{0.0, g.extent_x, true}, AxisSpec{0.0, g.extent_y, true}, AxisSpec{0.0, g.extent_vx, true},
                      AxisSpec{0.0, g.extent_vy, true}};
            return s;
        }

        /// Stationary image: (x, y) with v pinned to zero.
        [[nodiscard]] static HypothesisSpace static_2d (const ImagingGrid &g)
        {
            HypothesisSpace s;
            s.axes = {AxisSpec{0.0, g.extent_x, true}, AxisSpec{0.0, g.extent_y, true}, AxisSpec{}, AxisSpec{}};
            return s;
        }

        /// Along-road search (x, vx) at a fixed cross-road offset y, with v_y = 0.
        [[nodiscard]] static HypothesisSpace road_2d (const ImagingGrid &g, double y_offset)
        {
            HypothesisSpace s;
            s.axes = {AxisSpec{0.0, g.extent_x, true}, AxisSpec{y_offset, 0.0, false}, AxisSpec{0.0, g.extent_vx, true}, AxisSpec{}};
            return s;
        }
    };

    // -------------------------------------------------------------------------
    // Road alignment
    // -------------------------------------------------------------------------

    [[nodiscard]] inline Vec2 rotate (const Vec2 &p, double angle) noexcept
    {
        const double c = std::cos (angle);
        const double s = std::sin (angle);
        return {c * p.x - s * p.y, s * p.x + c * p.y};
    }

    /**
     * Rigid transform taking the world line {x cos α + y sin α = ρ} onto the x-axis.
     *
     * Points are translated by (0, -ρ / sin α) so the line passes through the
     * origin, then rotated counter-clockwise by π/2 - α. The world direction
     * (sin α, -cos α) becomes +x; direction = -1 flips that orientation. When
     * |sin α| <= degenerate_sin the translation falls back to (-ρ / cos α, 0).
     */
    struct RoadFrame
    {
        double rho = 0.0;
        double alpha = 0.0;
        int direction = 1;

        static constexpr double degenerate_sin = 1e-3;

        RoadFrame () = default;
        RoadFrame (double rho_, double alpha_, int direction_ = 1, bool allow_fallback = true)
            : rho (rho_), alpha (alpha_), direction (direction_ >= 0 ? 1 : -1)
        {
            if (!allow_fallback && std::abs (std::sin (alpha)) <= degenerate_sin)
                throw DegenerateAngle ("road angle too close to 0: |sin(alpha)| <= 1e-3");
        }

        [[nodiscard]] Vec2 translation () const noexcept
        {
            const double s = std::sin (alpha);
            if (std::abs (s) > degenerate_sin)
                return {0.0, rho / s};
            return {rho / std::cos (alpha), 0.0};
        }

        [[nodiscard]] double rotation () const noexcept
        {
            const double base = 0.5 * std::numbers::pi - alpha;
            return direction > 0 ? base : base + std::numbers::pi;
        }

        /// World direction that maps to +x.
        [[nodiscard]] Vec2 along () const noexcept
        {
            const Vec2 d{std::sin (alpha), -std::cos (alpha)};
            return direction > 0 ? d : d * -1.0;
        }

        [[nodiscard]] Vec2 forward (const Vec2 &p) const noexcept { return rotate (p - translation (), rotation ()); }
        [[nodiscard]] Vec2 inverse (const Vec2 &q) const noexcept { return rotate (q, -rotation ()) + translation (); }
        [[nodiscard]] Vec2 forward_vector (const Vec2 &v) const noexcept { return rotate (v, rotation ()); }
        [[nodiscard]] Vec2 inverse_vector (const Vec2 &v) const noexcept { return rotate (v, -rotation ()); }

        [[nodiscard]] Vec3 forward (const Vec3 &p) const noexcept
        {
            const Vec2 q = forward (Vec2{p.x, p.y});
            return {q.x, q.y, p.z};
        }

        /// Signed distance of a world point from the road line.
        [[nodiscard]] double offset_of (const Vec2 &p) const noexcept { return p.x * std::cos (alpha) + p.y * std::sin (alpha) - rho; }
    };

    /// Apply the road transform to antenna positions; z is preserved.
    [[nodiscard]] inline std::vector<Vec3> rotate_antenna (std::span<const Vec3> positions, double rho, double alpha, bool allow_fallback = true)
    {
        const RoadFrame frame (rho, alpha, 1, allow_fallback);
        std::vector<Vec3> out;
        out.reserve (positions.size ());
        for (const auto &p : positions)
            out.push_back (frame.forward (p));
        return out;
    }

    /// Inverse of the point transform used by rotate_antenna.
    [[nodiscard]] inline Vec2 unrotate_point (const Vec2 &p, double rho, double alpha, bool allow_fallback = true)
    {
        return RoadFrame (rho, alpha, 1, allow_fallback).inverse (p);
    }

} // namespace sarmover
