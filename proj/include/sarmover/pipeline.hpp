#pragma once
/**
 * @file   pipeline.hpp
 * @brief  Full imaging procedure: static image, road extraction, per-road
 *         (x, v_x) detection with resolution upgrade, removal of the detected
 *         movers from the data and the final static image with indicators.
 */

#include <sarmover/backproj.hpp>
#include <sarmover/echo.hpp>
#include <sarmover/geometry.hpp>
#include <sarmover/image.hpp>
#include <sarmover/mldd.hpp>
#include <sarmover/roaddet.hpp>
#include <sarmover/scene.hpp>
#include <sarmover/types.hpp>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sarmover
{
    struct Detection
    {
        Vec2 position{};        ///< world frame [m]
        Vec2 velocity{};        ///< world frame [m per dwell]
        cplx amplitude{};       ///< least-squares complex amplitude of the matched signature
        std::optional<int> road; ///< index into the road list; empty for the 4-D search
        bool moving = false;
        /// (x, y, vx, vy) in the search frame: coarse estimate, then refined.
        std::vector<std::array<double, 4>> level_history;
    };

    struct PipelineConfig
    {
        MlddConfig static_mldd{};           ///< static image, developed to L_max
        MlddConfig road_mldd{};             ///< per-road (x, v_x) search
        MlddConfig fallback_mldd{8, -1};    ///< 4-D search when no road is available; L_d < 0 means ceil(L_max / 2)
        RoadDetectionConfig roads = RoadDetectionConfig::speckled ();
        std::optional<std::vector<RoadSpec>> known_roads; ///< skip road extraction and use these
        double offset_step = 0.0;           ///< spacing of cross-road passes [m]; 0 = grid cell
        double default_road_width = 8.0;    ///< used when an extracted road has no measured width
        double max_road_width = 16.0;       ///< cap on measured widths, which include edge blur
        double duplicate_correlation = 0.5; ///< signatures correlating above this are one target
        double relative_floor_db = 20.0;    ///< drop detections this far below the strongest
        bool refine = true;                 ///< polish grid estimates on the matched-filter response
        bool clean = true;
        double arrow_scale = 100.0; ///< overlay arrow length per unit velocity [m]
        int max_4d_n = 64;
    };

    struct Report
    {
        std::vector<Detection> detections;
        std::vector<RoadLine> roads;
        std::map<std::string, double> timings;  ///< seconds per stage
        std::map<std::string, double> diagnostics; ///< image statistics [dB]
        bool fallback_4d = false;
        std::vector<std::string> errors;
        nlohmann::json config;
    };

    struct PipelineResult
    {
        Array2<cplx> initial_image; ///< static image before cleaning, (jx, jy)
        Array2<cplx> final_image;   ///< static image after cleaning
        BinaryImage overlay;        ///< indicator raster, display orientation
        RangeProfile cleaned;
        Report report;
    };

    // -------------------------------------------------------------------------
    // Static image
    // -------------------------------------------------------------------------

    /// Static image (v = 0) by 2-D MLDD developed to L_max, indexed (jx, jy).
    [[nodiscard]] inline Array2<cplx> static_image (const RangeProfile &p, const ImagingGrid &grid, const MlddConfig &cfg = {}, const AntennaPattern &pattern = {})
    {
        if (grid.points_per_dim != p.n_freq ())
            throw DomainError ("static_image: grid size must equal N");
        MlddConfig c = cfg;
        c.detection_level = -1;
        Pyramid pyr (p, HypothesisSpace::static_2d (grid), c, pattern);
        const CoarseImage &img = pyr.full_image ();
        const int n = grid.points_per_dim;
        Array2<cplx> out (n, n);
        for (int jx = 0; jx < n; ++jx)
            for (int jy = 0; jy < n; ++jy)
                out (jx, jy) = img.values (jx, jy, 0, 0);
        return out;
    }

    [[nodiscard]] inline Array2<double> magnitude (const Array2<cplx> &img)
    {
        Array2<double> out (img.rows (), img.cols ());
        for (std::size_t k = 0; k < img.size (); ++k)
            out.data ()[k] = std::abs (img.data ()[k]);
        return out;
    }

    /// |image| as a raster in display orientation.
    [[nodiscard]] inline GrayImage magnitude_raster (const Array2<cplx> &img, const ImagingGrid &grid)
    {
        return to_raster (magnitude (img), raster_geometry (grid));
    }

    // -------------------------------------------------------------------------
    // Matched signature and cleaning
    // -------------------------------------------------------------------------

    /// Echo of a unit scatterer at (r, v): A e^{-j 2 k |r + v t - r^a|}.
    [[nodiscard]] inline RangeProfile signature (const Vec2 &r, const Vec2 &v, const RadarConfig &cfg, const AntennaPattern &pattern = {})
    {
        const PointTarget t{r, v, 1.0, 0.0};
        return simulate_exact (std::span<const PointTarget> (&t, 1), cfg, pattern);
    }

    /// Σ conj(a) b over all samples.
    [[nodiscard]] inline cplx inner (const RangeProfile &a, const RangeProfile &b)
    {
        if (!a.values.same_shape (b.values))
            throw DomainError ("inner: range profile dimensions differ");
        cplx s{};
        for (std::size_t k = 0; k < a.values.size (); ++k)
            s += std::conj (a.values.data ()[k]) * b.values.data ()[k];
        return s;
    }

    /// Subtract the orthogonal projection of p onto h; returns the coefficient removed.
    inline cplx project_out (RangeProfile &p, const RangeProfile &h)
    {
        const double hh = h.energy ();
        if (!(hh > 0.0))
            throw DomainError ("project_out: zero signature");
        const cplx c = inner (h, p) / hh;
        for (std::size_t k = 0; k < p.values.size (); ++k)
            p.values.data ()[k] -= c * h.values.data ()[k];
        return c;
    }

    /// Remove one detection's matched response from the data.
    [[nodiscard]] inline RangeProfile clean (const RangeProfile &p, const Detection &d, const AntennaPattern &pattern = {})
    {
        RangeProfile out = p;
        project_out (out, signature (d.position, d.velocity, p.config, pattern));
        return out;
    }

    // -------------------------------------------------------------------------
    // Road-based detection
    // -------------------------------------------------------------------------

    namespace detail
    {
        [[nodiscard]] inline MlddConfig with_default_level (MlddConfig cfg, int n)
        {
            if (cfg.detection_level < 0)
                cfg.detection_level = std::max (cfg.base_level (), (ilog2 (n) + 1) / 2);
            return cfg;
        }

        [[nodiscard]] inline std::vector<double> road_offsets (double width, double step)
        {
            std::vector<double> out{0.0};
            for (int k = 1; k * step <= 0.5 * width + 1e-9; ++k)
            {
                out.push_back (k * step);
                out.push_back (-k * step);
            }
            return out;
        }

        /// Refine every coarse maximum of a run and collect the results.
        template <typename Convert>
        void collect (const MlddResult &res, const MlddConfig &cfg, Convert &&convert, std::vector<Detection> &out)
        {
            for (const auto &c : find_local_maxima (res.detection, cfg.kappa))
            {
                const FocusedDetection f = res.pyramid.upgrade (c);
                Detection d;
                convert (f, d);
                d.level_history = {f.coarse, f.coords};
                out.push_back (d);
            }
        }
    } // namespace detail

    /// Along-road interval [s_lo, s_hi] of the line inside the grid square,
    /// measured from the foot of the perpendicular through the origin.
    [[nodiscard]] inline std::optional<std::array<double, 2>> road_chord (const ImagingGrid &grid, const RoadSpec &road)
    {
        const RoadFrame frame (road.rho, road.alpha);
        const Vec2 foot{road.rho * std::cos (road.alpha), road.rho * std::sin (road.alpha)};
        const Vec2 dir = frame.along ();
        const double lo[2] = {grid.x (0) - 0.5 * grid.dx (), grid.y (0) - 0.5 * grid.dy ()};
        const double hi[2] = {grid.x (grid.points_per_dim - 1) + 0.5 * grid.dx (), grid.y (grid.points_per_dim - 1) + 0.5 * grid.dy ()};
        const double p0[2] = {foot.x, foot.y};
        const double d[2] = {dir.x, dir.y};
        double s_lo = -1e300, s_hi = 1e300;
        for (int a = 0; a < 2; ++a)
        {
            if (std::abs (d[a]) < 1e-12)
            {
                if (p0[a] < lo[a] || p0[a] > hi[a])
                    return std::nullopt;
                continue;
            }
            double t0 = (lo[a] - p0[a]) / d[a];
            double t1 = (hi[a] - p0[a]) / d[a];
            if (t0 > t1)
                std::swap (t0, t1);
            s_lo = std::max (s_lo, t0);
            s_hi = std::min (s_hi, t1);
        }
        if (!(s_hi > s_lo))
            return std::nullopt;
        return std::array<double, 2>{s_lo, s_hi};
    }

    /// Acquisition with the antenna track moved into the road frame.
    [[nodiscard]] inline RadarSampling road_sampling (const RadarConfig &cfg, const RoadFrame &frame)
    {
        RadarSampling sampling (cfg);
        for (auto &a : sampling.antenna)
            a = frame.forward (a);
        return sampling;
    }

    /**
     * Search one road: the antenna track is moved into the road frame so the
     * road lies on the x-axis, then (x, v_x) is searched at each cross-road
     * offset. The along-road axis has the grid's x extent; longer chords are
     * covered by several equal segments. Positions and velocities are mapped
     * back to the world frame.
     */
    [[nodiscard]] inline std::vector<Detection> road_based_detect (const RangeProfile &p, const ImagingGrid &grid, const RoadSpec &road, const MlddConfig &cfg,
                                                                   const std::vector<double> &offsets = {0.0}, const AntennaPattern &pattern = {})
    {
        const RoadFrame frame (road.rho, road.alpha);
        const RadarSampling sampling = road_sampling (p.config, frame);
        const auto chord = road_chord (grid, road);
        if (!chord)
            return {};
        const double foot_x = frame.forward (Vec2{road.rho * std::cos (road.alpha), road.rho * std::sin (road.alpha)}).x;
        const double length = (*chord)[1] - (*chord)[0];
        const int segments = std::max (1, static_cast<int> (std::ceil (length / grid.extent_x - 1e-9)));

        std::vector<Detection> out;
        for (int k = 0; k < segments; ++k)
        {
            const double centre = foot_x + (*chord)[0] + (k + 0.5) * length / segments;
            for (const double y : offsets)
            {
                HypothesisSpace space = HypothesisSpace::road_2d (grid, y);
                space.axes[axis_x].center = centre;
                const MlddResult res = run (p, sampling, space, cfg, pattern);
                detail::collect (res, cfg, [&] (const FocusedDetection &f, Detection &d) {
                    d.position = frame.inverse (Vec2{f.coords[axis_x], f.coords[axis_y]});
                    d.velocity = frame.inverse_vector (Vec2{f.coords[axis_vx], 0.0});
                }, out);
            }
        }
        return out;
    }

    /// Adaptive 4-D search over the whole grid (used when no road is known).
    [[nodiscard]] inline std::vector<Detection> full_grid_detect (const RangeProfile &p, const ImagingGrid &grid, const MlddConfig &cfg,
                                                                  const AntennaPattern &pattern = {})
    {
        const MlddConfig c = detail::with_default_level (cfg, p.n_freq ());
        const MlddResult res = run (p, HypothesisSpace::four_d (grid), c, pattern);
        std::vector<Detection> out;
        detail::collect (res, c, [] (const FocusedDetection &f, Detection &d) {
            d.position = {f.coords[axis_x], f.coords[axis_y]};
            d.velocity = {f.coords[axis_vx], f.coords[axis_vy]};
        }, out);
        return out;
    }

    /// Local maxima of a static image above μ + κσ, as stationary candidates.
    [[nodiscard]] inline std::vector<Detection> static_candidates (const Array2<cplx> &img, const ImagingGrid &grid, double kappa)
    {
        const Array2<double> m = magnitude (img);
        Array4<double> d (Shape4{m.rows (), m.cols (), 1, 1});
        std::copy (m.data ().begin (), m.data ().end (), d.data ().begin ());
        std::vector<Detection> out;
        for (const auto &c : find_local_maxima (d, kappa))
        {
            Detection det;
            det.position = {grid.x (c.cell[0]), grid.y (c.cell[1])};
            det.level_history = {{det.position.x, det.position.y, 0.0, 0.0}};
            out.push_back (det);
        }
        return out;
    }

    /// Normalized matched-filter response |<H, P>| / |H| of a hypothesis.
    [[nodiscard]] inline double response (const RangeProfile &p, const Vec2 &r, const Vec2 &v, const AntennaPattern &pattern = {})
    {
        const PointTarget t{r, v, 1.0, 0.0};
        const RangeProfile h = simulate (std::span<const PointTarget> (&t, 1), p.config, pattern);
        return std::abs (inner (h, p)) / std::sqrt (h.energy ());
    }

    /// One free direction of a refinement: a unit step moves (r, v) by (dr, dv).
    struct SearchDirection
    {
        Vec2 dr{};
        Vec2 dv{};
    };

    /**
     * Compass search on the matched-filter response starting from the grid
     * estimate. Steps start at half a unit and halve until below tolerance.
     */
    inline void refine (const RangeProfile &p, Detection &d, const std::vector<SearchDirection> &dirs, const AntennaPattern &pattern = {},
                        double tolerance = 1e-3)
    {
        double best = response (p, d.position, d.velocity, pattern);
        for (double step = 0.5; step >= tolerance; step *= 0.5)
        {
            bool improved = true;
            while (improved)
            {
                improved = false;
                for (const auto &dir : dirs)
                    for (const double sign : {1.0, -1.0})
                    {
                        const Vec2 r = d.position + dir.dr * (sign * step);
                        const Vec2 v = d.velocity + dir.dv * (sign * step);
                        const double val = response (p, r, v, pattern);
                        if (val > best)
                        {
                            best = val;
                            d.position = r;
                            d.velocity = v;
                            improved = true;
                        }
                    }
            }
        }
    }

    namespace detail
    {
        /// Solve the small Hermitian system G a = b by Gaussian elimination with
        /// partial pivoting. A relative ridge keeps near-collinear signatures solvable.
        [[nodiscard]] inline std::vector<cplx> solve_gram (std::vector<std::vector<cplx>> g, std::vector<cplx> b)
        {
            const std::size_t n = b.size ();
            double trace = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                trace += std::abs (g[i][i]);
            for (std::size_t i = 0; i < n; ++i)
                g[i][i] += 1e-12 * trace / static_cast<double> (n);
            for (std::size_t c = 0; c < n; ++c)
            {
                std::size_t piv = c;
                for (std::size_t r = c + 1; r < n; ++r)
                    if (std::abs (g[r][c]) > std::abs (g[piv][c]))
                        piv = r;
                std::swap (g[c], g[piv]);
                std::swap (b[c], b[piv]);
                if (std::abs (g[c][c]) == 0.0)
                    continue;
                for (std::size_t r = c + 1; r < n; ++r)
                {
                    const cplx f = g[r][c] / g[c][c];
                    for (std::size_t k = c; k < n; ++k)
                        g[r][k] -= f * g[c][k];
                    b[r] -= f * b[c];
                }
            }
            std::vector<cplx> a (n);
            for (std::size_t c = n; c-- > 0;)
            {
                cplx s = b[c];
                for (std::size_t k = c + 1; k < n; ++k)
                    s -= g[c][k] * a[k];
                a[c] = std::abs (g[c][c]) > 0.0 ? s / g[c][c] : cplx{};
            }
            return a;
        }
    } // namespace detail

    /// Joint least-squares amplitudes of the detections' signatures against p.
    inline void fit_amplitudes (const RangeProfile &p, std::vector<Detection> &dets, const AntennaPattern &pattern = {})
    {
        const std::size_t n = dets.size ();
        std::vector<RangeProfile> h;
        h.reserve (n);
        for (const auto &d : dets)
            h.push_back (signature (d.position, d.velocity, p.config, pattern));
        std::vector<std::vector<cplx>> g (n, std::vector<cplx> (n));
        std::vector<cplx> b (n);
        for (std::size_t i = 0; i < n; ++i)
        {
            b[i] = inner (h[i], p);
            for (std::size_t j = i; j < n; ++j)
            {
                g[i][j] = inner (h[i], h[j]);
                g[j][i] = std::conj (g[i][j]);
            }
        }
        const std::vector<cplx> a = detail::solve_gram (std::move (g), std::move (b));
        for (std::size_t i = 0; i < n; ++i)
            dets[i].amplitude = a[i];
    }

    /// A candidate explanation of part of the echo and the directions in which
    /// it may be refined.
    struct Hypothesis
    {
        Detection detection;
        std::vector<SearchDirection> directions;
    };

    /**
     * Choose one explanation per group of candidates that describe the same
     * echo. Candidates whose signatures correlate above max_correlation are
     * grouped transitively. Each group's representative is then chosen by
     * coordinate ascent on the joint least-squares fit: with the other groups'
     * fitted responses subtracted, every member is refined and the one with
     * the largest matched-filter response wins. Amplitudes are then refitted
     * jointly, and representatives more than floor_db below the strongest are
     * dropped. Sorted by amplitude.
     */
    [[nodiscard]] inline std::vector<Detection> resolve_duplicates (const RangeProfile &p, std::vector<Hypothesis> candidates, double max_correlation,
                                                                    double floor_db, const AntennaPattern &pattern = {}, int rounds = 2)
    {
        const std::size_t n = candidates.size ();
        if (n == 0)
            return {};
        std::vector<RangeProfile> sig;
        std::vector<double> norm;
        sig.reserve (n);
        for (const auto &c : candidates)
        {
            sig.push_back (signature (c.detection.position, c.detection.velocity, p.config, pattern));
            norm.push_back (std::sqrt (sig.back ().energy ()));
        }

        std::vector<std::size_t> parent (n);
        for (std::size_t k = 0; k < n; ++k)
            parent[k] = k;
        const auto find = [&] (std::size_t k) {
            while (parent[k] != k)
                k = parent[k] = parent[parent[k]];
            return k;
        };
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                if (std::abs (inner (sig[a], sig[b])) > max_correlation * norm[a] * norm[b])
                    parent[find (a)] = find (b);
        std::vector<std::vector<std::size_t>> groups;
        std::vector<std::size_t> group_of_root (n, n);
        for (std::size_t k = 0; k < n; ++k)
        {
            const std::size_t r = find (k);
            if (group_of_root[r] == n)
            {
                group_of_root[r] = groups.size ();
                groups.emplace_back ();
            }
            groups[group_of_root[r]].push_back (k);
        }
        sig.clear ();

        // Current representative of each group and its fitted response a H.
        const std::size_t g = groups.size ();
        std::vector<Detection> rep (g);
        std::vector<RangeProfile> fitted (g, RangeProfile (p.config));
        for (std::size_t i = 0; i < g; ++i)
        {
            double best = -1.0;
            for (const std::size_t k : groups[i])
            {
                const double r = response (p, candidates[k].detection.position, candidates[k].detection.velocity, pattern);
                if (r > best)
                {
                    best = r;
                    rep[i] = candidates[k].detection;
                }
            }
            const RangeProfile h = signature (rep[i].position, rep[i].velocity, p.config, pattern);
            rep[i].amplitude = inner (h, p) / h.energy ();
            fitted[i] = h;
            for (auto &z : fitted[i].values.data ())
                z *= rep[i].amplitude;
        }

        for (int round = 0; round < rounds; ++round)
            for (std::size_t i = 0; i < g; ++i)
            {
                RangeProfile residual = p;
                for (std::size_t j = 0; j < g; ++j)
                    if (j != i)
                        for (std::size_t s = 0; s < residual.values.size (); ++s)
                            residual.values.data ()[s] -= fitted[j].values.data ()[s];
                double best = -1.0;
                for (const std::size_t k : groups[i])
                {
                    Detection d = candidates[k].detection;
                    refine (residual, d, candidates[k].directions, pattern);
                    candidates[k].detection = d;
                    const double r = response (residual, d.position, d.velocity, pattern);
                    if (r > best)
                    {
                        best = r;
                        rep[i] = d;
                    }
                }
                const RangeProfile h = signature (rep[i].position, rep[i].velocity, p.config, pattern);
                rep[i].amplitude = inner (h, residual) / h.energy ();
                fitted[i] = h;
                for (auto &z : fitted[i].values.data ())
                    z *= rep[i].amplitude;
            }

        // Coordinate ascent leaves correlated representatives partly fitting
        // each other; the final amplitudes come from the exact joint fit.
        fit_amplitudes (p, rep, pattern);
        double strongest = 0.0;
        for (const auto &d : rep)
            strongest = std::max (strongest, std::abs (d.amplitude));
        std::vector<Detection> out;
        for (const auto &d : rep)
            if (std::abs (d.amplitude) >= strongest * std::pow (10.0, -floor_db / 20.0))
                out.push_back (d);
        std::stable_sort (out.begin (), out.end (), [] (const Detection &a, const Detection &b) { return std::abs (a.amplitude) > std::abs (b.amplitude); });
        return out;
    }

    // -------------------------------------------------------------------------
    // Indicators
    // -------------------------------------------------------------------------

    namespace detail
    {
        inline void draw_segment (BinaryImage &img, Vec2 a, Vec2 b)
        {
            const Vec2 pa = img.geometry.pixel (a);
            const Vec2 pb = img.geometry.pixel (b);
            const double len = std::max (std::abs (pb.x - pa.x), std::abs (pb.y - pa.y));
            const int steps = std::max (1, static_cast<int> (std::ceil (len)));
            for (int s = 0; s <= steps; ++s)
            {
                const double t = static_cast<double> (s) / steps;
                const int r = static_cast<int> (std::lround (pa.x + t * (pb.x - pa.x)));
                const int c = static_cast<int> (std::lround (pa.y + t * (pb.y - pa.y)));
                if (r >= 0 && r < img.rows () && c >= 0 && c < img.cols ())
                    img (r, c) = 1;
            }
        }
    } // namespace detail

    /// Cross at each initial position; arrow along the velocity for movers.
    [[nodiscard]] inline BinaryImage indicator_overlay (const std::vector<Detection> &dets, const ImagingGrid &grid, double arrow_scale)
    {
        const int n = grid.points_per_dim;
        BinaryImage img (n, n, raster_geometry (grid));
        const double cross = 2.0 * grid.dx ();
        for (const auto &d : dets)
        {
            detail::draw_segment (img, d.position - Vec2{cross, 0.0}, d.position + Vec2{cross, 0.0});
            detail::draw_segment (img, d.position - Vec2{0.0, cross}, d.position + Vec2{0.0, cross});
            if (!d.moving)
                continue;
            const Vec2 tip = d.position + d.velocity * arrow_scale;
            detail::draw_segment (img, d.position, tip);
            const double speed = d.velocity.norm ();
            const Vec2 u = d.velocity * (1.0 / speed);
            const double head = std::min (0.3 * speed * arrow_scale, 4.0 * grid.dx ());
            detail::draw_segment (img, tip, tip - rotate (u, 0.5) * head);
            detail::draw_segment (img, tip, tip - rotate (u, -0.5) * head);
        }
        return img;
    }

    // -------------------------------------------------------------------------
    // Full run
    // -------------------------------------------------------------------------

    [[nodiscard]] inline nlohmann::json config_json (const PipelineConfig &cfg)
    {
        const auto mldd = [] (const MlddConfig &m) {
            return nlohmann::json{{"n_c", m.n_c}, {"detection_level", m.detection_level}, {"kappa", m.kappa}, {"window", m.window}};
        };
        return {{"static", mldd (cfg.static_mldd)},
                {"road", mldd (cfg.road_mldd)},
                {"fallback", mldd (cfg.fallback_mldd)},
                {"known_roads", cfg.known_roads.has_value ()},
                {"max_road_width", cfg.max_road_width},
                {"offset_step", cfg.offset_step},
                {"duplicate_correlation", cfg.duplicate_correlation},
                {"relative_floor_db", cfg.relative_floor_db},
                {"clean", cfg.clean},
                {"roads",
                 {{"speckle_radius", cfg.roads.speckle_radius},
                  {"decimation", cfg.roads.decimation},
                  {"log_scale", cfg.roads.log_scale},
                  {"sigma", cfg.roads.sigma},
                  {"low", cfg.roads.low},
                  {"high", cfg.roads.high},
                  {"dilation_radius", cfg.roads.dilation_radius},
                  {"bandwidth_rho", cfg.roads.bandwidth_rho},
                  {"bandwidth_alpha_deg", cfg.roads.bandwidth_alpha_deg}}}};
    }

    /**
     * Static image, roads (given or extracted), per-road detection at every
     * cross-road offset, duplicate resolution, removal of the movers from the
     * data strongest first, and the re-formed static image. Falls back to the
     * 4-D search, flagged in the report, when no road is available.
     */
    [[nodiscard]] inline PipelineResult full_run (const RangeProfile &p, const ImagingGrid &grid, const PipelineConfig &cfg = {},
                                                  const AntennaPattern &pattern = {})
    {
        using clock = std::chrono::steady_clock;
        PipelineResult out;
        Report &rep = out.report;
        rep.config = config_json (cfg);
        auto mark = clock::now ();
        const auto lap = [&] (const char *stage) {
            const auto now = clock::now ();
            rep.timings[stage] = std::chrono::duration<double> (now - mark).count ();
            mark = now;
        };

        out.initial_image = static_image (p, grid, cfg.static_mldd, pattern);
        lap ("static_image");

        std::vector<RoadSpec> roads;
        if (cfg.known_roads)
        {
            roads = *cfg.known_roads;
            for (const auto &r : roads)
                rep.roads.push_back ({r.rho, r.alpha, 0, r.width});
        }
        else
        {
            try
            {
                rep.roads = detect_roads (magnitude_raster (out.initial_image, grid), cfg.roads);
                for (const auto &r : rep.roads)
                    roads.push_back ({r.rho, r.alpha, r.width > 0.0 ? std::min (r.width, cfg.max_road_width) : cfg.default_road_width});
            }
            catch (const std::exception &e)
            {
                rep.errors.push_back (std::string ("road detection: ") + e.what ());
            }
        }
        lap ("roads");

        std::vector<Hypothesis> candidates;
        const auto add = [&] (std::vector<Detection> found, std::vector<SearchDirection> dirs, std::optional<int> road) {
            for (auto &d : found)
            {
                d.road = road;
                candidates.push_back ({d, cfg.refine ? dirs : std::vector<SearchDirection>{}});
            }
        };
        const double step = cfg.offset_step > 0.0 ? cfg.offset_step : grid.dx ();
        for (std::size_t k = 0; k < roads.size (); ++k)
        {
            try
            {
                const Vec2 along = RoadFrame (roads[k].rho, roads[k].alpha).along ();
                // The cross-road offset stays on its pass: freeing it re-opens the
                // position/velocity ambiguity the road constraint removes.
                add (road_based_detect (p, grid, roads[k], cfg.road_mldd, detail::road_offsets (roads[k].width, step), pattern),
                     {{along * grid.dx (), {}}, {{}, along * grid.dvx ()}}, static_cast<int> (k));
            }
            catch (const std::exception &e)
            {
                rep.errors.push_back ("road " + std::to_string (k) + ": " + e.what ());
            }
        }
        if (roads.empty ())
        {
            rep.fallback_4d = true;
            if (grid.points_per_dim > cfg.max_4d_n)
                rep.errors.push_back ("4-D search refused: N = " + std::to_string (grid.points_per_dim) + " exceeds " + std::to_string (cfg.max_4d_n));
            else
                add (full_grid_detect (p, grid, cfg.fallback_mldd, pattern),
                     {{{grid.dx (), 0.0}, {}}, {{0.0, grid.dy ()}, {}}, {{}, {grid.dvx (), 0.0}}, {{}, {0.0, grid.dvy ()}}}, std::nullopt);
        }
        // Stationary explanations compete with the road hypotheses for the same echoes.
        add (static_candidates (out.initial_image, grid, cfg.static_mldd.kappa), {{{grid.dx (), 0.0}, {}}, {{0.0, grid.dy ()}, {}}}, std::nullopt);
        std::erase_if (candidates, [&] (const Hypothesis &h) { return !grid.contains (h.detection.position); });
        lap ("detection");

        rep.detections = resolve_duplicates (p, std::move (candidates), cfg.duplicate_correlation, cfg.relative_floor_db, pattern);
        std::erase_if (rep.detections, [&] (const Detection &d) { return !grid.contains (d.position); });
        const double vstep = rep.fallback_4d ? std::min (grid.dvx (), grid.dvy ()) : grid.dvx ();
        for (auto &d : rep.detections)
            d.moving = d.velocity.norm () > 0.5 * vstep;
        lap ("resolve");

        out.cleaned = p;
        if (cfg.clean)
            for (const auto &d : rep.detections)
                if (d.moving)
                    project_out (out.cleaned, signature (d.position, d.velocity, p.config, pattern));
        lap ("clean");

        bool any_moving = false;
        for (const auto &d : rep.detections)
            any_moving = any_moving || d.moving;
        out.final_image = cfg.clean && any_moving ? static_image (out.cleaned, grid, cfg.static_mldd, pattern) : out.initial_image;
        lap ("final_image");

        out.overlay = indicator_overlay (rep.detections, grid, cfg.arrow_scale);

        std::vector<double> mags = magnitude (out.final_image).data ();
        if (!mags.empty ())
        {
            std::sort (mags.begin (), mags.end ());
            const double peak = mags.back ();
            const double median = mags[mags.size () / 2];
            if (peak > 0.0)
                rep.diagnostics["peak_db"] = db20 (peak);
            if (peak > 0.0 && median > 0.0)
                rep.diagnostics["peak_to_median_db"] = db20 (peak / median);
        }
        return out;
    }

    // -------------------------------------------------------------------------
    // Report file
    // -------------------------------------------------------------------------

    [[nodiscard]] inline nlohmann::json to_json (const Report &r)
    {
        using nlohmann::json;
        json dets = json::array ();
        for (const auto &d : r.detections)
        {
            json h = json::array ();
            for (const auto &e : d.level_history)
                h.push_back ({e[0], e[1], e[2], e[3]});
            dets.push_back ({{"x", d.position.x},
                             {"y", d.position.y},
                             {"vx", d.velocity.x},
                             {"vy", d.velocity.y},
                             {"amplitude_re", d.amplitude.real ()},
                             {"amplitude_im", d.amplitude.imag ()},
                             {"amplitude_db", std::abs (d.amplitude) > 0.0 ? db20 (std::abs (d.amplitude)) : -400.0},
                             {"road", d.road ? json (*d.road) : json (nullptr)},
                             {"moving", d.moving},
                             {"level_history", h}});
        }
        json roads = json::array ();
        for (const auto &l : r.roads)
            roads.push_back ({{"rho", l.rho}, {"alpha", l.alpha}, {"support", l.support}, {"width", l.width}});
        return {{"detections", dets}, {"roads", roads},          {"timings", r.timings}, {"diagnostics", r.diagnostics},
                {"fallback_4d", r.fallback_4d}, {"errors", r.errors}, {"config", r.config}};
    }

    [[nodiscard]] inline Report report_from_json (const nlohmann::json &j)
    {
        try
        {
            Report r;
            for (const auto &d : j.at ("detections"))
            {
                Detection det;
                det.position = {d.at ("x").get<double> (), d.at ("y").get<double> ()};
                det.velocity = {d.at ("vx").get<double> (), d.at ("vy").get<double> ()};
                det.amplitude = {d.at ("amplitude_re").get<double> (), d.at ("amplitude_im").get<double> ()};
                if (!d.at ("road").is_null ())
                    det.road = d.at ("road").get<int> ();
                det.moving = d.at ("moving").get<bool> ();
                for (const auto &h : d.at ("level_history"))
                    det.level_history.push_back ({h.at (0).get<double> (), h.at (1).get<double> (), h.at (2).get<double> (), h.at (3).get<double> ()});
                r.detections.push_back (det);
            }
            for (const auto &l : j.at ("roads"))
                r.roads.push_back ({l.at ("rho").get<double> (), l.at ("alpha").get<double> (), l.at ("support").get<int> (), l.at ("width").get<double> ()});
            r.timings = j.at ("timings").get<std::map<std::string, double>> ();
            r.diagnostics = j.at ("diagnostics").get<std::map<std::string, double>> ();
            r.fallback_4d = j.at ("fallback_4d").get<bool> ();
            r.errors = j.at ("errors").get<std::vector<std::string>> ();
            r.config = j.at ("config");
            return r;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw IoError (std::string ("report: ") + e.what ());
        }
    }

} // namespace sarmover
