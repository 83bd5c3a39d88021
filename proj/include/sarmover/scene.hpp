#pragma once
/**
 * @file   scene.hpp
 * @brief  Ground truth: point targets, road strips, clutter fields and the
 *         JSON scenario format.
 */

#include <sarmover/geometry.hpp>
#include <sarmover/image.hpp>
#include <sarmover/types.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sarmover
{
    struct PointTarget
    {
        Vec2 position{};
        Vec2 velocity{};
        double amplitude = 1.0; ///< √σ_t
        double phase = 0.0;

        [[nodiscard]] bool is_static () const noexcept { return velocity.x == 0.0 && velocity.y == 0.0; }
    };

    enum class ClutterRegion
    {
        everywhere,
        inside_roads,
        outside_roads
    };

    struct ClutterSpec
    {
        double sigma0 = 0.0;  ///< σ_0, linear
        double cell_dx = 0.0; ///< 0 = take from the grid
        double cell_dy = 0.0;
        ClutterRegion region = ClutterRegion::everywhere;
        std::uint64_t seed = 0;

        [[nodiscard]] double cell_area () const noexcept { return cell_dx * cell_dy; }
        [[nodiscard]] double sigma_c () const noexcept { return sigma0 * cell_area (); }
    };

    /// Straight road strip in world normal form {x cos α + y sin α = ρ}.
    struct RoadSpec
    {
        double rho = 0.0;
        double alpha = 0.0;
        double width = 8.0;
    };

    struct Scene
    {
        std::string name;
        std::vector<PointTarget> targets;
        std::vector<ClutterSpec> clutter;
        std::vector<RoadSpec> roads;
    };

    /// Optional receiver noise added after simulation.
    struct NoiseSpec
    {
        double power = 0.0;
        std::uint64_t seed = 0;
    };

    /// Everything a scenario file describes.
    struct Scenario
    {
        RadarConfig radar;
        ImagingGrid grid;
        Scene scene;
        std::optional<NoiseSpec> noise;
    };

    class ZeroClutter : public DomainError
    {
      public:
        using DomainError::DomainError;
    };

    // -------------------------------------------------------------------------
    // Clutter
    // -------------------------------------------------------------------------

    /// Cells whose centre lies within half a road width of any road line.
    [[nodiscard]] inline BinaryImage road_mask (const ImagingGrid &grid, const std::vector<RoadSpec> &roads)
    {
        const int n = grid.points_per_dim;
        BinaryImage mask (n, n, raster_geometry (grid));
        for (int row = 0; row < n; ++row)
            for (int col = 0; col < n; ++col)
            {
                const Vec2 p = mask.geometry.world (row, col);
                for (const auto &road : roads)
                    if (std::abs (p.x * std::cos (road.alpha) + p.y * std::sin (road.alpha) - road.rho) <= 0.5 * road.width)
                    {
                        mask (row, col) = 1;
                        break;
                    }
            }
        return mask;
    }

    /**
     * One static scatterer at the centre of every grid cell selected by the mask
     * (all cells without a mask). Amplitude √(σ_0 Δx Δy); phase uniform on
     * [0, 2π) from a counter-based stream keyed by (seed, cell index).
     */
    [[nodiscard]] inline std::vector<PointTarget> generate_clutter (const ClutterSpec &spec, const ImagingGrid &grid, const BinaryImage *mask = nullptr)
    {
        const int n = grid.points_per_dim;
        const double dx = spec.cell_dx > 0.0 ? spec.cell_dx : grid.dx ();
        const double dy = spec.cell_dy > 0.0 ? spec.cell_dy : grid.dy ();
        if (std::abs (dx - grid.dx ()) > 1e-9 * grid.dx () || std::abs (dy - grid.dy ()) > 1e-9 * grid.dy ())
            throw DomainError ("clutter cell size must equal the grid sampling interval");
        if (mask && (mask->rows () != n || mask->cols () != n))
            throw DomainError ("clutter mask dimensions do not match the grid");
        if (spec.sigma0 < 0.0)
            throw DomainError ("clutter sigma0 must be non-negative");

        const double amplitude = std::sqrt (spec.sigma0 * dx * dy);
        std::vector<PointTarget> out;
        out.reserve (static_cast<std::size_t> (n) * static_cast<std::size_t> (n));
        for (int jx = 0; jx < n; ++jx)
            for (int jy = 0; jy < n; ++jy)
            {
                if (mask && !(*mask) (raster_row (jy, n), jx))
                    continue;
                const auto cell = static_cast<std::uint64_t> (jx) * static_cast<std::uint64_t> (n) + static_cast<std::uint64_t> (jy);
                PointTarget t;
                t.position = {grid.x (jx), grid.y (jy)};
                t.amplitude = amplitude;
                t.phase = 2.0 * std::numbers::pi * counter_uniform (spec.seed, cell);
                out.push_back (t);
            }
        return out;
    }

    /// Static SCR in dB: 10 log10(σ_t / (σ_0 Δx Δy)).
    [[nodiscard]] inline double scr_static (const PointTarget &target, const ClutterSpec &spec)
    {
        const double sigma_c = spec.sigma_c ();
        if (!(sigma_c > 0.0))
            throw ZeroClutter ("SCR undefined: clutter RCS is zero");
        return db10 (target.amplitude * target.amplitude / sigma_c);
    }

    /// Targets plus every clutter field, with road-dependent regions resolved.
    [[nodiscard]] inline std::vector<PointTarget> scene_scatterers (const Scene &scene, const ImagingGrid &grid)
    {
        std::vector<PointTarget> all = scene.targets;
        if (scene.clutter.empty ())
            return all;
        const BinaryImage inside = road_mask (grid, scene.roads);
        BinaryImage outside = inside;
        for (auto &px : outside.pixels.data ())
            px = px ? 0 : 1;
        for (const auto &spec : scene.clutter)
        {
            const BinaryImage *mask = nullptr;
            if (spec.region == ClutterRegion::inside_roads)
                mask = &inside;
            else if (spec.region == ClutterRegion::outside_roads)
                mask = &outside;
            auto field = generate_clutter (spec, grid, mask);
            all.insert (all.end (), field.begin (), field.end ());
        }
        return all;
    }

    // -------------------------------------------------------------------------
    // Scenario files
    // -------------------------------------------------------------------------

    namespace detail
    {
        using json = nlohmann::json;

        inline void reject_unknown (const json &obj, const std::string &where, std::initializer_list<const char *> allowed)
        {
            if (!obj.is_object ())
                throw DomainError (where + ": expected an object");
            const std::set<std::string> ok (allowed.begin (), allowed.end ());
            for (const auto &[key, _] : obj.items ())
                if (!ok.contains (key))
                    throw DomainError (where + ": unknown key '" + key + "'");
        }

        inline double number (const json &obj, const char *key, const std::string &where, double fallback)
        {
            if (!obj.contains (key))
                return fallback;
            const auto &v = obj.at (key);
            if (!v.is_number ())
                throw DomainError (where + "." + key + ": expected a number");
            const double d = v.get<double> ();
            if (!std::isfinite (d))
                throw DomainError (where + "." + key + ": must be finite");
            return d;
        }

        inline Vec2 pair (const json &obj, const char *key, const std::string &where, const char *what)
        {
            if (!obj.contains (key))
                return {};
            const auto &v = obj.at (key);
            if (!v.is_array () || v.size () != 2 || !v[0].is_number () || !v[1].is_number ())
                throw DomainError (where + "." + key + ": " + what + " must be an array of 2 numbers");
            return {v[0].get<double> (), v[1].get<double> ()};
        }

        inline ClutterRegion region_from (const std::string &s, const std::string &where)
        {
            if (s == "everywhere")
                return ClutterRegion::everywhere;
            if (s == "inside-roads")
                return ClutterRegion::inside_roads;
            if (s == "outside-roads")
                return ClutterRegion::outside_roads;
            throw DomainError (where + ".region: expected everywhere | inside-roads | outside-roads, got '" + s + "'");
        }

        inline std::size_t line_of (const std::string &text, std::size_t byte)
        {
            byte = std::min (byte, text.size ());
            return 1 + static_cast<std::size_t> (std::count (text.begin (), text.begin () + static_cast<std::ptrdiff_t> (byte), '\n'));
        }
    } // namespace detail

    /**
     * Parse a JSON scenario. Schema (all keys optional unless noted):
     *
     *   name: string
     *   radar:   {radius, altitude, carrier_hz, bandwidth_hz | range_resolution,
     *             n, pulse_interval, aperture_rad, start_azimuth_rad}
     *   grid:    {extent_x, extent_y, extent_vx, extent_vy}
     *   targets: [{pos: [x, y], vel: [vx, vy], rcs_db, phase}]
     *   roads:   [{rho, alpha_deg, width}]
     *   clutter: [{sigma0_db, region: everywhere|inside-roads|outside-roads, seed}]
     *   noise:   {power_db, seed}
     *
     * Throws IoError on malformed JSON (with line number) and DomainError
     * naming the offending field on schema violations.
     */
    [[nodiscard]] inline Scenario load_scene (const std::string &text)
    {
        using detail::json;
        json root;
        try
        {
            root = json::parse (text);
        }
        catch (const json::parse_error &e)
        {
            throw IoError ("scene parse error at line " + std::to_string (detail::line_of (text, e.byte)) + ": " + e.what ());
        }
        if (!root.is_object ())
            throw DomainError ("scene: top level must be an object");
        detail::reject_unknown (root, "scene", {"name", "radar", "grid", "targets", "roads", "clutter", "noise"});

        Scenario out;
        if (root.contains ("name"))
        {
            if (!root["name"].is_string ())
                throw DomainError ("scene.name: expected a string");
            out.scene.name = root["name"].get<std::string> ();
        }

        RadarConfig &radar = out.radar;
        if (root.contains ("radar"))
        {
            const auto &r = root["radar"];
            detail::reject_unknown (r, "radar",
                                    {"radius", "altitude", "carrier_hz", "bandwidth_hz", "range_resolution", "n", "pulse_interval",
                                     "aperture_rad", "start_azimuth_rad"});
            radar.radius = detail::number (r, "radius", "radar", radar.radius);
            radar.altitude = detail::number (r, "altitude", "radar", radar.altitude);
            radar.carrier = detail::number (r, "carrier_hz", "radar", radar.carrier);
            if (r.contains ("bandwidth_hz") && r.contains ("range_resolution"))
                throw DomainError ("radar: give either bandwidth_hz or range_resolution, not both");
            radar.bandwidth = detail::number (r, "bandwidth_hz", "radar", radar.bandwidth);
            if (r.contains ("range_resolution"))
                radar.bandwidth = bandwidth_for_resolution (detail::number (r, "range_resolution", "radar", 4.0));
            if (r.contains ("n"))
            {
                if (!r["n"].is_number_integer ())
                    throw DomainError ("radar.n: expected an integer");
                radar.n = r["n"].get<int> ();
            }
            if (r.contains ("pulse_interval"))
                radar.pulse_interval = detail::number (r, "pulse_interval", "radar", 0.0);
            if (r.contains ("aperture_rad"))
                radar.aperture = detail::number (r, "aperture_rad", "radar", 0.0);
            radar.start_azimuth = detail::number (r, "start_azimuth_rad", "radar", radar.start_azimuth);
        }
        radar.validate ();

        out.grid = default_grid (radar);
        if (root.contains ("grid"))
        {
            const auto &g = root["grid"];
            detail::reject_unknown (g, "grid", {"extent_x", "extent_y", "extent_vx", "extent_vy"});
            out.grid.extent_x = detail::number (g, "extent_x", "grid", out.grid.extent_x);
            out.grid.extent_y = detail::number (g, "extent_y", "grid", out.grid.extent_y);
            out.grid.extent_vx = detail::number (g, "extent_vx", "grid", out.grid.extent_vx);
            out.grid.extent_vy = detail::number (g, "extent_vy", "grid", out.grid.extent_vy);
        }
        out.grid.validate ();

        if (root.contains ("targets"))
        {
            const auto &ts = root["targets"];
            if (!ts.is_array ())
                throw DomainError ("scene.targets: expected an array");
            for (std::size_t k = 0; k < ts.size (); ++k)
            {
                const std::string where = "targets[" + std::to_string (k) + "]";
                detail::reject_unknown (ts[k], where, {"pos", "vel", "rcs_db", "phase"});
                if (!ts[k].contains ("pos"))
                    throw DomainError (where + ".pos: position is required");
                PointTarget t;
                t.position = detail::pair (ts[k], "pos", where, "position");
                t.velocity = detail::pair (ts[k], "vel", where, "velocity");
                t.amplitude = std::pow (10.0, detail::number (ts[k], "rcs_db", where, 0.0) / 20.0);
                t.phase = detail::number (ts[k], "phase", where, 0.0);
                if (!out.grid.contains (t.position))
                    throw DomainError (where + ".pos: position lies outside the imaging grid");
                out.scene.targets.push_back (t);
            }
        }

        if (root.contains ("roads"))
        {
            const auto &rs = root["roads"];
            if (!rs.is_array ())
                throw DomainError ("scene.roads: expected an array");
            for (std::size_t k = 0; k < rs.size (); ++k)
            {
                const std::string where = "roads[" + std::to_string (k) + "]";
                detail::reject_unknown (rs[k], where, {"rho", "alpha_deg", "width"});
                RoadSpec road;
                road.rho = detail::number (rs[k], "rho", where, 0.0);
                road.alpha = detail::number (rs[k], "alpha_deg", where, 0.0) * std::numbers::pi / 180.0;
                road.width = detail::number (rs[k], "width", where, road.width);
                if (!(road.width > 0.0))
                    throw DomainError (where + ".width: must be positive");
                out.scene.roads.push_back (road);
            }
        }

        if (root.contains ("clutter"))
        {
            const auto &cs = root["clutter"];
            if (!cs.is_array ())
                throw DomainError ("scene.clutter: expected an array");
            for (std::size_t k = 0; k < cs.size (); ++k)
            {
                const std::string where = "clutter[" + std::to_string (k) + "]";
                detail::reject_unknown (cs[k], where, {"sigma0_db", "region", "seed"});
                ClutterSpec spec;
                spec.sigma0 = std::pow (10.0, detail::number (cs[k], "sigma0_db", where, 0.0) / 10.0);
                spec.cell_dx = out.grid.dx ();
                spec.cell_dy = out.grid.dy ();
                if (cs[k].contains ("region"))
                {
                    if (!cs[k]["region"].is_string ())
                        throw DomainError (where + ".region: expected a string");
                    spec.region = detail::region_from (cs[k]["region"].get<std::string> (), where);
                }
                if (cs[k].contains ("seed"))
                {
                    if (!cs[k]["seed"].is_number_unsigned () && !cs[k]["seed"].is_number_integer ())
                        throw DomainError (where + ".seed: expected a non-negative integer");
                    spec.seed = cs[k]["seed"].get<std::uint64_t> ();
                }
                out.scene.clutter.push_back (spec);
            }
        }

        if (root.contains ("noise"))
        {
            const auto &nz = root["noise"];
            detail::reject_unknown (nz, "noise", {"power_db", "seed"});
            NoiseSpec noise;
            noise.power = std::pow (10.0, detail::number (nz, "power_db", "noise", -300.0) / 10.0);
            if (nz.contains ("seed"))
                noise.seed = nz["seed"].get<std::uint64_t> ();
            out.noise = noise;
        }
        return out;
    }

} // namespace sarmover
