#pragma once
/**
 * @file   bench.hpp
 * @brief  Runtime scaling harness: times each imaging path over a list of N
 *         and fits the log-log slope of time against N.
 */

#include <sarmover/backproj.hpp>
#include <sarmover/echo.hpp>
#include <sarmover/mldd.hpp>
#include <sarmover/pipeline.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace sarmover
{
    struct BenchRecord
    {
        std::string algorithm;
        int n = 0;
        int n_c = 0;
        int detection_level = 0;
        double seconds = 0.0; ///< median over repeats
        double ops = 0.0;     ///< cells evaluated (direct: cell-sample products)
    };

    struct BenchConfig
    {
        std::vector<int> sizes{32, 64, 128, 256};
        std::vector<std::string> algorithms{"road_based", "static2d"};
        int repeats = 3;
        double min_seconds = 0.25; ///< keep repeating short runs until this much time is measured
        int n_c = 2;
        int max_direct_n = 64; ///< direct and full 4-D runs refuse larger N
    };

    [[nodiscard]] inline const std::vector<std::string> &bench_algorithms ()
    {
        static const std::vector<std::string> names{"direct", "mldd_full4d", "adaptive4d", "road_based", "static2d"};
        return names;
    }

    [[nodiscard]] inline bool is_4d_or_direct (const std::string &alg) { return alg == "direct" || alg == "mldd_full4d" || alg == "adaptive4d"; }

    namespace detail
    {
        /// The two-target scene used for timing; content does not change the cost.
        inline RangeProfile bench_profile (int n)
        {
            RadarConfig cfg;
            cfg.n = n;
            const std::vector<PointTarget> t{{{25.0, 25.0}, {0.0, 0.0}, 1.0, 0.0}, {{0.0, 0.0}, {-0.16, -0.16}, 1.0, 0.0}};
            return simulate (std::span<const PointTarget> (t), cfg);
        }

        /// Cells produced by developing a pyramid from its base level to `level`.
        inline double pyramid_cells (int n, int n_c, int dims, int level)
        {
            double total = 0.0;
            for (int l = ilog2 (n_c); l <= level; ++l)
            {
                const double images = std::pow (static_cast<double> (n >> l), 2.0);
                total += images * std::pow (static_cast<double> (1 << l), dims);
            }
            return total;
        }

        /// Runs one algorithm once; returns the op-count proxy.
        inline double bench_once (const std::string &alg, const RangeProfile &p, const ImagingGrid &grid, const MlddConfig &mc, int &level)
        {
            const int n = p.n_freq ();
            const int lmax = ilog2 (n);
            if (alg == "direct")
            {
                level = lmax;
                const auto img = direct_static (p, grid);
                (void)img;
                return std::pow (static_cast<double> (n), 4.0);
            }
            if (alg == "static2d")
            {
                level = lmax;
                const auto img = static_image (p, grid, mc);
                (void)img;
                return pyramid_cells (n, mc.n_c, 2, lmax);
            }
            if (alg == "road_based")
            {
                level = lmax;
                const RoadSpec road{0.0, -std::numbers::pi / 4.0, 0.0};
                const auto dets = road_based_detect (p, grid, road, mc);
                (void)dets;
                return pyramid_cells (n, mc.n_c, 2, lmax);
            }
            if (alg == "mldd_full4d")
            {
                level = lmax;
                Pyramid pyr (p, HypothesisSpace::four_d (grid), mc);
                pyr.develop (lmax);
                return pyramid_cells (n, mc.n_c, 4, lmax);
            }
            if (alg == "adaptive4d")
            {
                MlddConfig c = mc;
                c.detection_level = std::max (c.base_level (), (lmax + 1) / 2);
                level = c.detection_level;
                const auto res = run (p, HypothesisSpace::four_d (grid), c);
                auto maxima = find_local_maxima (res.detection, c.kappa);
                std::sort (maxima.begin (), maxima.end (), [] (const auto &a, const auto &b) { return a.value > b.value; });
                constexpr std::size_t upgrades = 2;
                for (std::size_t k = 0; k < std::min (upgrades, maxima.size ()); ++k)
                {
                    const auto f = res.pyramid.upgrade (maxima[k]);
                    (void)f;
                }
                return pyramid_cells (n, c.n_c, 4, level);
            }
            throw DomainError ("unknown bench algorithm: " + alg);
        }
    } // namespace detail

    [[nodiscard]] inline BenchRecord bench_one (const std::string &alg, int n, int repeats, int n_c = 2, double min_seconds = 0.0)
    {
        if (repeats < 1)
            throw DomainError ("repeats must be >= 1");
        if (!is_power_of_two (n) || n < 4)
            throw DomainError ("bench sizes must be powers of two >= 4");
        const RangeProfile p = detail::bench_profile (n);
        const ImagingGrid grid = default_grid (p.config);
        MlddConfig mc;
        mc.n_c = std::min (n_c, n);

        BenchRecord rec;
        rec.algorithm = alg;
        rec.n = n;
        rec.n_c = alg == "direct" ? 0 : mc.n_c;
        int level = 0;
        detail::bench_once (alg, p, grid, mc, level); // warm-up, discarded
        std::vector<double> times;
        double total = 0.0;
        // Millisecond runs are dominated by scheduler noise; the median over more
        // of them keeps the small-N end of a slope fit stable.
        constexpr int max_repeats = 1000;
        for (int k = 0; k < repeats || (total < min_seconds && k < max_repeats); ++k)
        {
            const auto t0 = std::chrono::steady_clock::now ();
            rec.ops = detail::bench_once (alg, p, grid, mc, level);
            times.push_back (std::chrono::duration<double> (std::chrono::steady_clock::now () - t0).count ());
            total += times.back ();
        }
        std::sort (times.begin (), times.end ());
        rec.seconds = times[times.size () / 2];
        rec.detection_level = level;
        return rec;
    }

    [[nodiscard]] inline std::vector<BenchRecord> run_bench (const BenchConfig &cfg)
    {
        for (const auto &a : cfg.algorithms)
            if (std::find (bench_algorithms ().begin (), bench_algorithms ().end (), a) == bench_algorithms ().end ())
                throw DomainError ("unknown bench algorithm: " + a);
        for (const auto &a : cfg.algorithms)
            if (is_4d_or_direct (a))
                for (int n : cfg.sizes)
                    if (n > cfg.max_direct_n)
                        throw DomainError (a + " is capped at N <= " + std::to_string (cfg.max_direct_n) + ", got " + std::to_string (n));
        std::vector<BenchRecord> out;
        for (const auto &a : cfg.algorithms)
            for (int n : cfg.sizes)
                out.push_back (bench_one (a, n, cfg.repeats, cfg.n_c, cfg.min_seconds));
        return out;
    }

    /// Least-squares slope of y against x.
    [[nodiscard]] inline double lsq_slope (const std::vector<double> &x, const std::vector<double> &y)
    {
        if (x.size () != y.size () || x.size () < 2)
            throw DomainError ("slope needs at least two points");
        const double n = static_cast<double> (x.size ());
        double sx = 0.0, sy = 0.0;
        for (std::size_t k = 0; k < x.size (); ++k)
        {
            sx += x[k];
            sy += y[k];
        }
        const double mx = sx / n;
        const double my = sy / n;
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t k = 0; k < x.size (); ++k)
        {
            sxy += (x[k] - mx) * (y[k] - my);
            sxx += (x[k] - mx) * (x[k] - mx);
        }
        if (sxx == 0.0)
            throw DomainError ("slope needs at least two distinct sizes");
        return sxy / sxx;
    }

    /// Per-algorithm slope of log2(seconds) against log2(N).
    [[nodiscard]] inline std::map<std::string, double> bench_slopes (const std::vector<BenchRecord> &records)
    {
        std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> pts;
        for (const auto &r : records)
        {
            pts[r.algorithm].first.push_back (std::log2 (static_cast<double> (r.n)));
            pts[r.algorithm].second.push_back (std::log2 (r.seconds));
        }
        std::map<std::string, double> out;
        for (const auto &[alg, xy] : pts)
            if (xy.first.size () >= 2)
                out[alg] = lsq_slope (xy.first, xy.second);
        return out;
    }

    [[nodiscard]] inline std::string bench_csv (const std::vector<BenchRecord> &records)
    {
        std::ostringstream os;
        os << "algorithm,n,n_c,detection_level,seconds,ops\n";
        for (const auto &r : records)
            os << r.algorithm << ',' << r.n << ',' << r.n_c << ',' << r.detection_level << ',' << r.seconds << ',' << r.ops << '\n';
        return os.str ();
    }

} // namespace sarmover
