#pragma once
/**
 * @file   roaddet.hpp
 * @brief  Straight-road extraction from a static SAR magnitude image:
 *         Canny edges, disk dilation, component filtering, Hough transform and
 *         mean-shift clustering of the Hough peaks.
 *
 * Pixel lines use x = column and y = row (growing downward) with the origin at
 * pixel (0, 0). World lines use the image geometry and y growing upward.
 */

#include <sarmover/image.hpp>
#include <sarmover/types.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <queue>
#include <vector>

namespace sarmover
{
    /// Line x cos α + y sin α = ρ in pixel coordinates, α in radians.
    struct PixelLine
    {
        double rho = 0.0;
        double alpha = 0.0;
    };

    /// Detected road in world coordinates.
    struct RoadLine
    {
        double rho = 0.0;   ///< metres
        double alpha = 0.0; ///< radians, in (-π/2, π/2]
        int support = 0;    ///< Hough peaks merged into this road
        double width = 0.0; ///< perpendicular extent of the supporting pixels [m]
    };

    struct HoughPeak
    {
        double rho = 0.0;   ///< pixels
        double alpha = 0.0; ///< radians
        int votes = 0;
    };

    /// Hough accumulator: rows index ρ, columns index α.
    struct HoughSpace
    {
        Array2<int> votes;
        double rho_step = 1.0;
        double rho_min = 0.0;
        std::vector<double> alphas;

        [[nodiscard]] double rho_at (int row) const noexcept { return rho_min + row * rho_step; }
    };

    struct RoadDetectionConfig
    {
        int speckle_radius = 0;         ///< box mean of intensity over (2r + 1)² pixels; 0 = off
        int decimation = 1;             ///< block-average factor applied after smoothing
        bool log_scale = false;         ///< detect on dB magnitude
        double clip_percentile = 1.0;   ///< dB values clipped to [p, 100 - p] percentiles
        double sigma = 1.4;
        double low = 0.1;
        double high = 0.25;
        int dilation_radius = 2;
        double min_area_fraction = 0.005;
        double rho_step = 1.0;
        double alpha_step_deg = 1.0;
        int max_peaks = 30;
        int nms_rho = 1;   ///< half window in ρ bins
        int nms_alpha = 1; ///< half window in α bins
        double peak_fraction = 0.3;
        double min_line_fraction = 0.25; ///< minimum votes as a fraction of the image side
        double bandwidth_rho = 5.0;      ///< pixels
        double bandwidth_alpha_deg = 5.0;
        double min_cluster_fraction = 0.25; ///< drop clusters with fewer peaks than this share of the largest

        /// Settings for speckled SAR magnitude images: few looks per pixel make
        /// raw Canny edges cover the whole scene, so average first.
        [[nodiscard]] static RoadDetectionConfig speckled () noexcept
        {
            RoadDetectionConfig c;
            c.speckle_radius = 3;
            c.decimation = 2;
            c.log_scale = true;
            c.sigma = 2.0;
            c.low = 0.3;
            c.high = 0.6;
            return c;
        }
    };

    /// Intermediate products, kept for debug dumps.
    struct RoadStages
    {
        GrayImage gray;
        BinaryImage edges;
        BinaryImage dilated;
        BinaryImage filtered;
        HoughSpace hough;
        std::vector<HoughPeak> peaks;
    };

    namespace detail
    {
        [[nodiscard]] constexpr double deg (double d) noexcept { return d * std::numbers::pi / 180.0; }

        [[nodiscard]] inline int clamp_index (int i, int n) noexcept { return std::clamp (i, 0, n - 1); }

        /// Separable convolution with replicated borders.
        [[nodiscard]] inline Array2<double> convolve_separable (const Array2<double> &in, const std::vector<double> &kr, const std::vector<double> &kc)
        {
            const int rows = in.rows ();
            const int cols = in.cols ();
            const int hr = static_cast<int> (kr.size ()) / 2;
            const int hc = static_cast<int> (kc.size ()) / 2;
            Array2<double> tmp (rows, cols);
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c)
                {
                    double s = 0.0;
                    for (int k = -hc; k <= hc; ++k)
                        s += kc[static_cast<std::size_t> (k + hc)] * in (r, clamp_index (c + k, cols));
                    tmp (r, c) = s;
                }
            Array2<double> out (rows, cols);
            for (int r = 0; r < rows; ++r)
                for (int c = 0; c < cols; ++c)
                {
                    double s = 0.0;
                    for (int k = -hr; k <= hr; ++k)
                        s += kr[static_cast<std::size_t> (k + hr)] * tmp (clamp_index (r + k, rows), c);
                    out (r, c) = s;
                }
            return out;
        }

        [[nodiscard]] inline std::vector<double> gaussian_kernel (double sigma)
        {
            if (sigma <= 0.0)
                return {1.0};
            const int h = static_cast<int> (std::ceil (3.0 * sigma));
            std::vector<double> k (static_cast<std::size_t> (2 * h + 1));
            double sum = 0.0;
            for (int i = -h; i <= h; ++i)
            {
                const double v = std::exp (-0.5 * i * i / (sigma * sigma));
                k[static_cast<std::size_t> (i + h)] = v;
                sum += v;
            }
            for (auto &v : k)
                v /= sum;
            return k;
        }
    } // namespace detail

    // -------------------------------------------------------------------------
    // Image stages
    // -------------------------------------------------------------------------

    /// (x - min) / (max - min); a constant image maps to zeros.
    [[nodiscard]] inline GrayImage normalize (const GrayImage &in)
    {
        GrayImage out = in;
        if (in.pixels.empty ())
            return out;
        const auto [lo, hi] = std::minmax_element (in.pixels.data ().begin (), in.pixels.data ().end ());
        const double mn = *lo;
        const double span = *hi - mn;
        for (auto &v : out.pixels.data ())
            v = span > 0.0 ? (v - mn) / span : 0.0;
        return out;
    }

    /**
     * Canny edges: Gaussian blur, Sobel gradient, non-maximum suppression along
     * the quantized gradient direction and hysteresis. Thresholds apply to the
     * suppressed gradient magnitude divided by its maximum. Along the gradient a
     * pixel must exceed its backward neighbour and at least equal its forward
     * one, so a symmetric ridge keeps exactly one pixel.
     */
    [[nodiscard]] inline BinaryImage canny (const GrayImage &img, double low, double high, double sigma)
    {
        if (!(low >= 0.0 && low < high && high <= 1.0))
            throw DomainError ("canny: thresholds must satisfy 0 <= low < high <= 1");
        const int rows = img.rows ();
        const int cols = img.cols ();
        BinaryImage edges (rows, cols, img.geometry);
        if (rows == 0 || cols == 0)
            return edges;

        const auto g = detail::gaussian_kernel (sigma);
        const Array2<double> s = detail::convolve_separable (img.pixels, g, g);
        Array2<double> gx = detail::convolve_separable (s, {1.0, 2.0, 1.0}, {1.0, 0.0, -1.0});
        Array2<double> gy = detail::convolve_separable (s, {1.0, 0.0, -1.0}, {1.0, 2.0, 1.0});

        Array2<double> mag (rows, cols);
        for (std::size_t k = 0; k < mag.size (); ++k)
            mag.data ()[k] = std::hypot (gx.data ()[k], gy.data ()[k]);
        const auto at = [&] (int r, int c) { return (r < 0 || r >= rows || c < 0 || c >= cols) ? 0.0 : mag (r, c); };

        Array2<double> nms (rows, cols);
        double peak = 0.0;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
            {
                const double m = mag (r, c);
                if (m <= 0.0)
                    continue;
                // gx is d/dcol with the kernel flipped: {1,0,-1} correlates as c-1 minus c+1.
                double angle = std::atan2 (-gy (r, c), -gx (r, c)) * 180.0 / std::numbers::pi;
                if (angle < 0.0)
                    angle += 180.0;
                int dr = 0, dc = 0;
                if (angle < 22.5 || angle >= 157.5)
                    dc = 1;
                else if (angle < 67.5)
                {
                    dr = 1;
                    dc = 1;
                }
                else if (angle < 112.5)
                    dr = 1;
                else
                {
                    dr = 1;
                    dc = -1;
                }
                if (m > at (r - dr, c - dc) && m >= at (r + dr, c + dc))
                {
                    nms (r, c) = m;
                    peak = std::max (peak, m);
                }
            }
        if (peak <= 0.0)
            return edges;

        std::queue<std::pair<int, int>> frontier;
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                if (nms (r, c) / peak >= high)
                {
                    edges (r, c) = 1;
                    frontier.emplace (r, c);
                }
        while (!frontier.empty ())
        {
            const auto [r, c] = frontier.front ();
            frontier.pop ();
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc)
                {
                    const int rr = r + dr;
                    const int cc = c + dc;
                    if (rr < 0 || rr >= rows || cc < 0 || cc >= cols || edges (rr, cc))
                        continue;
                    if (nms (rr, cc) / peak >= low)
                    {
                        edges (rr, cc) = 1;
                        frontier.emplace (rr, cc);
                    }
                }
        }
        return edges;
    }

    /// Dilation by the integer disk {(dr, dc) : dr² + dc² <= radius²}.
    [[nodiscard]] inline BinaryImage dilate_disk (const BinaryImage &in, int radius)
    {
        if (radius < 0)
            throw DomainError ("dilate_disk: radius must be non-negative");
        if (radius == 0)
            return in;
        const int rows = in.rows ();
        const int cols = in.cols ();
        BinaryImage out (rows, cols, in.geometry);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
            {
                if (!in (r, c))
                    continue;
                for (int dr = -radius; dr <= radius; ++dr)
                    for (int dc = -radius; dc <= radius; ++dc)
                    {
                        const int rr = r + dr;
                        const int cc = c + dc;
                        if (dr * dr + dc * dc <= radius * radius && rr >= 0 && rr < rows && cc >= 0 && cc < cols)
                            out (rr, cc) = 1;
                    }
            }
        return out;
    }

    /// 8-connected labels (1-based, 0 = background) and the area of each label.
    struct Components
    {
        Array2<int> labels;
        std::vector<int> areas; ///< areas[label - 1]
    };

    [[nodiscard]] inline Components label_components (const BinaryImage &in)
    {
        const int rows = in.rows ();
        const int cols = in.cols ();
        Components out{Array2<int> (rows, cols), {}};
        std::queue<std::pair<int, int>> frontier;
        for (int r0 = 0; r0 < rows; ++r0)
            for (int c0 = 0; c0 < cols; ++c0)
            {
                if (!in (r0, c0) || out.labels (r0, c0))
                    continue;
                const int label = static_cast<int> (out.areas.size ()) + 1;
                int area = 0;
                out.labels (r0, c0) = label;
                frontier.emplace (r0, c0);
                while (!frontier.empty ())
                {
                    const auto [r, c] = frontier.front ();
                    frontier.pop ();
                    ++area;
                    for (int dr = -1; dr <= 1; ++dr)
                        for (int dc = -1; dc <= 1; ++dc)
                        {
                            const int rr = r + dr;
                            const int cc = c + dc;
                            if (rr < 0 || rr >= rows || cc < 0 || cc >= cols || !in (rr, cc) || out.labels (rr, cc))
                                continue;
                            out.labels (rr, cc) = label;
                            frontier.emplace (rr, cc);
                        }
                }
                out.areas.push_back (area);
            }
        return out;
    }

    /// Remove 8-connected components with fewer than min_area pixels.
    [[nodiscard]] inline BinaryImage connected_components_filter (const BinaryImage &in, int min_area)
    {
        if (min_area < 0)
            throw DomainError ("connected_components_filter: min_area must be non-negative");
        const Components comp = label_components (in);
        BinaryImage out (in.rows (), in.cols (), in.geometry);
        for (std::size_t k = 0; k < out.pixels.size (); ++k)
        {
            const int label = comp.labels.data ()[k];
            if (label > 0 && comp.areas[static_cast<std::size_t> (label - 1)] >= min_area)
                out.pixels.data ()[k] = 1;
        }
        return out;
    }

    // -------------------------------------------------------------------------
    // Hough transform
    // -------------------------------------------------------------------------

    /// Every set pixel votes once per α bin; α runs over (-90°, 90°].
    [[nodiscard]] inline HoughSpace hough (const BinaryImage &img, double rho_step = 1.0, double alpha_step_deg = 1.0)
    {
        if (!(rho_step > 0.0) || !(alpha_step_deg > 0.0))
            throw DomainError ("hough: steps must be positive");
        HoughSpace h;
        h.rho_step = rho_step;
        const int n_alpha = std::max (1, static_cast<int> (std::floor (180.0 / alpha_step_deg + 1e-9)));
        for (int k = 0; k < n_alpha; ++k)
            h.alphas.push_back (detail::deg (90.0 - (n_alpha - 1 - k) * alpha_step_deg));
        const double diag = std::hypot (std::max (0, img.rows () - 1), std::max (0, img.cols () - 1));
        const int half = static_cast<int> (std::ceil (diag / rho_step));
        h.rho_min = -half * rho_step;
        h.votes = Array2<int> (2 * half + 1, n_alpha);

        std::vector<double> cs (h.alphas.size ()), sn (h.alphas.size ());
        for (std::size_t k = 0; k < h.alphas.size (); ++k)
        {
            cs[k] = std::cos (h.alphas[k]);
            sn[k] = std::sin (h.alphas[k]);
        }
        for (int r = 0; r < img.rows (); ++r)
            for (int c = 0; c < img.cols (); ++c)
            {
                if (!img (r, c))
                    continue;
                for (int k = 0; k < n_alpha; ++k)
                {
                    const double rho = c * cs[static_cast<std::size_t> (k)] + r * sn[static_cast<std::size_t> (k)];
                    const int row = static_cast<int> (std::lround ((rho - h.rho_min) / rho_step));
                    ++h.votes (row, k);
                }
            }
        return h;
    }

    /**
     * Greedy peak picking: take the global maximum, clear a window around it,
     * repeat. Stops after max_peaks, or when votes drop below
     * max(fraction * first peak, min_votes). Ties go to the lowest (ρ, α) index.
     */
    [[nodiscard]] inline std::vector<HoughPeak> hough_peaks (const HoughSpace &h, int max_peaks, int nms_rho = 1, int nms_alpha = 1, double fraction = 0.3,
                                                             int min_votes = 1)
    {
        if (max_peaks < 1)
            throw DomainError ("hough_peaks: max_peaks must be >= 1");
        Array2<int> acc = h.votes;
        std::vector<HoughPeak> out;
        int first = 0;
        while (static_cast<int> (out.size ()) < max_peaks)
        {
            const auto it = std::max_element (acc.data ().begin (), acc.data ().end ());
            if (it == acc.data ().end () || *it <= 0)
                break;
            const int v = *it;
            if (out.empty ())
                first = v;
            if (v < min_votes || v < fraction * first)
                break;
            const auto k = static_cast<int> (it - acc.data ().begin ());
            const int row = k / acc.cols ();
            const int col = k % acc.cols ();
            out.push_back ({h.rho_at (row), h.alphas[static_cast<std::size_t> (col)], v});
            for (int r = std::max (0, row - nms_rho); r <= std::min (acc.rows () - 1, row + nms_rho); ++r)
                for (int c = std::max (0, col - nms_alpha); c <= std::min (acc.cols () - 1, col + nms_alpha); ++c)
                    acc (r, c) = 0;
        }
        return out;
    }

    // -------------------------------------------------------------------------
    // Mean shift
    // -------------------------------------------------------------------------

    struct Cluster
    {
        std::array<double, 2> center{};
        int size = 0;
    };

    /**
     * Flat-kernel mean shift on coordinates scaled by the per-axis bandwidth.
     * Each point climbs to its mode (stopping when the shift is below 1e-4);
     * modes closer than one unit are joined transitively. Centres are the means
     * of the member points. Sorted by size, then by centre.
     */
    [[nodiscard]] inline std::vector<Cluster> mean_shift_cluster (const std::vector<std::array<double, 2>> &points, std::array<double, 2> bandwidth,
                                                                 int max_iterations = 500)
    {
        if (!(bandwidth[0] > 0.0) || !(bandwidth[1] > 0.0))
            throw DomainError ("mean_shift_cluster: bandwidths must be positive");
        if (points.empty ())
            return {};

        // Sorted copy so that every sum below is taken in a canonical order.
        std::vector<std::array<double, 2>> pts = points;
        std::sort (pts.begin (), pts.end ());
        const std::size_t n = pts.size ();
        std::vector<std::array<double, 2>> q (n);
        for (std::size_t k = 0; k < n; ++k)
            q[k] = {pts[k][0] / bandwidth[0], pts[k][1] / bandwidth[1]};

        std::vector<std::array<double, 2>> modes (n);
        for (std::size_t k = 0; k < n; ++k)
        {
            std::array<double, 2> y = q[k];
            for (int it = 0; it < max_iterations; ++it)
            {
                std::array<double, 2> sum{0.0, 0.0};
                int count = 0;
                for (const auto &p : q)
                    if (std::hypot (p[0] - y[0], p[1] - y[1]) <= 1.0)
                    {
                        sum[0] += p[0];
                        sum[1] += p[1];
                        ++count;
                    }
                const std::array<double, 2> next{sum[0] / count, sum[1] / count};
                const double shift = std::hypot (next[0] - y[0], next[1] - y[1]);
                y = next;
                if (shift < 1e-4)
                    break;
            }
            modes[k] = y;
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
                if (std::hypot (modes[a][0] - modes[b][0], modes[a][1] - modes[b][1]) < 1.0)
                    parent[find (a)] = find (b);

        std::vector<Cluster> out;
        std::vector<std::size_t> root_of_cluster;
        for (std::size_t k = 0; k < n; ++k)
        {
            const std::size_t root = find (k);
            auto it = std::find (root_of_cluster.begin (), root_of_cluster.end (), root);
            std::size_t idx;
            if (it == root_of_cluster.end ())
            {
                idx = out.size ();
                root_of_cluster.push_back (root);
                out.push_back ({});
            }
            else
                idx = static_cast<std::size_t> (it - root_of_cluster.begin ());
            out[idx].center[0] += pts[k][0];
            out[idx].center[1] += pts[k][1];
            ++out[idx].size;
        }
        for (auto &c : out)
        {
            c.center[0] /= c.size;
            c.center[1] /= c.size;
        }
        std::sort (out.begin (), out.end (), [] (const Cluster &a, const Cluster &b) {
            if (a.size != b.size)
                return a.size > b.size;
            return a.center < b.center;
        });
        return out;
    }

    // -------------------------------------------------------------------------
    // Pixel and world lines
    // -------------------------------------------------------------------------

    namespace detail
    {
        /// Bring α into (-π/2, π/2], flipping ρ when the normal is reversed.
        inline void canonical_line (double &rho, double &alpha) noexcept
        {
            const double pi = std::numbers::pi;
            while (alpha > 0.5 * pi + 1e-12)
            {
                alpha -= pi;
                rho = -rho;
            }
            while (alpha <= -0.5 * pi + 1e-12)
            {
                alpha += pi;
                rho = -rho;
            }
        }
    } // namespace detail

    /// Pixel-frame line to world metres (row axis flipped).
    [[nodiscard]] inline RoadLine pixel_to_world (const PixelLine &line, const ImageGeometry &g)
    {
        RoadLine out;
        out.alpha = -line.alpha;
        out.rho = g.pitch * line.rho + g.origin.x * std::cos (line.alpha) - g.origin.y * std::sin (line.alpha);
        detail::canonical_line (out.rho, out.alpha);
        return out;
    }

    [[nodiscard]] inline PixelLine world_to_pixel (const RoadLine &line, const ImageGeometry &g)
    {
        PixelLine out;
        out.alpha = -line.alpha;
        out.rho = (line.rho - g.origin.x * std::cos (out.alpha) + g.origin.y * std::sin (out.alpha)) / g.pitch;
        detail::canonical_line (out.rho, out.alpha);
        return out;
    }

    // -------------------------------------------------------------------------
    // Full detector
    // -------------------------------------------------------------------------

    /// Average non-overlapping factor x factor blocks.
    [[nodiscard]] inline GrayImage block_average (const GrayImage &in, int factor)
    {
        if (factor <= 1)
            return in;
        const int rows = in.rows () / factor;
        const int cols = in.cols () / factor;
        ImageGeometry g = in.geometry;
        const double shift = 0.5 * (factor - 1) * g.pitch;
        g.origin = {g.origin.x + shift, g.origin.y - shift};
        g.pitch *= factor;
        GrayImage out (rows, cols, g);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
            {
                double s = 0.0;
                for (int a = 0; a < factor; ++a)
                    for (int b = 0; b < factor; ++b)
                        s += in (r * factor + a, c * factor + b);
                out (r, c) = s / (factor * factor);
            }
        return out;
    }

    /// Root of the box mean of intensity over a (2r + 1)² window (edges clamped).
    [[nodiscard]] inline GrayImage speckle_mean (const GrayImage &in, int radius)
    {
        if (radius <= 0)
            return in;
        Array2<double> power (in.rows (), in.cols ());
        for (std::size_t k = 0; k < power.size (); ++k)
            power.data ()[k] = in.pixels.data ()[k] * in.pixels.data ()[k];
        const std::vector<double> box (static_cast<std::size_t> (2 * radius + 1), 1.0 / (2 * radius + 1));
        const Array2<double> mean = detail::convolve_separable (power, box, box);
        GrayImage out (in.rows (), in.cols (), in.geometry);
        for (std::size_t k = 0; k < mean.size (); ++k)
            out.pixels.data ()[k] = std::sqrt (std::max (0.0, mean.data ()[k]));
        return out;
    }

    /// Magnitude image to road lines in world coordinates.
    [[nodiscard]] inline std::vector<RoadLine> detect_roads (const GrayImage &magnitude, const RoadDetectionConfig &cfg = {}, RoadStages *stages = nullptr)
    {
        GrayImage work = speckle_mean (magnitude, cfg.speckle_radius);
        work = block_average (work, cfg.decimation);
        if (cfg.log_scale && !work.pixels.empty ())
        {
            std::vector<double> sorted;
            for (auto &v : work.pixels.data ())
            {
                v = v > 0.0 ? db20 (v) : -400.0;
                sorted.push_back (v);
            }
            std::sort (sorted.begin (), sorted.end ());
            const auto at = [&] (double pct) {
                const double pos = std::clamp (pct, 0.0, 100.0) / 100.0 * static_cast<double> (sorted.size () - 1);
                return sorted[static_cast<std::size_t> (std::lround (pos))];
            };
            const double lo = at (cfg.clip_percentile);
            const double hi = at (100.0 - cfg.clip_percentile);
            for (auto &v : work.pixels.data ())
                v = std::clamp (v, lo, hi);
        }
        const GrayImage gray = normalize (work);
        const BinaryImage edges = canny (gray, cfg.low, cfg.high, cfg.sigma);
        const BinaryImage dilated = dilate_disk (edges, cfg.dilation_radius);
        const int min_area = static_cast<int> (std::ceil (cfg.min_area_fraction * static_cast<double> (gray.pixels.size ())));
        const BinaryImage filtered = connected_components_filter (dilated, min_area);
        const HoughSpace acc = hough (filtered, cfg.rho_step, cfg.alpha_step_deg);
        const int side = std::max (gray.rows (), gray.cols ());
        const int min_votes = std::max (1, static_cast<int> (std::ceil (cfg.min_line_fraction * side)));
        const auto peaks = hough_peaks (acc, cfg.max_peaks, cfg.nms_rho, cfg.nms_alpha, cfg.peak_fraction, min_votes);

        std::vector<std::array<double, 2>> pts;
        for (const auto &p : peaks)
            pts.push_back ({p.rho, p.alpha});
        const auto clusters = mean_shift_cluster (pts, {cfg.bandwidth_rho, detail::deg (cfg.bandwidth_alpha_deg)});

        std::vector<RoadLine> roads;
        std::vector<PixelLine> pixel_lines;
        const int min_support = clusters.empty () ? 0 : static_cast<int> (std::ceil (cfg.min_cluster_fraction * clusters.front ().size));
        for (const auto &c : clusters)
        {
            if (c.size < min_support)
                continue;
            RoadLine road = pixel_to_world ({c.center[0], c.center[1]}, gray.geometry);
            road.support = c.size;
            roads.push_back (road);
            pixel_lines.push_back ({c.center[0], c.center[1]});
        }

        // Perpendicular extent of the filtered pixels nearest to each line.
        const double reach = 2.0 * cfg.bandwidth_rho;
        std::vector<std::vector<double>> offsets (roads.size ());
        for (int r = 0; r < filtered.rows (); ++r)
            for (int c = 0; c < filtered.cols (); ++c)
            {
                if (!filtered (r, c))
                    continue;
                std::size_t best = roads.size ();
                double best_d = reach;
                double signed_d = 0.0;
                for (std::size_t k = 0; k < pixel_lines.size (); ++k)
                {
                    const double d = c * std::cos (pixel_lines[k].alpha) + r * std::sin (pixel_lines[k].alpha) - pixel_lines[k].rho;
                    if (std::abs (d) < best_d)
                    {
                        best_d = std::abs (d);
                        best = k;
                        signed_d = d;
                    }
                }
                if (best < roads.size ())
                    offsets[best].push_back (signed_d);
            }
        for (std::size_t k = 0; k < roads.size (); ++k)
        {
            auto &o = offsets[k];
            if (o.empty ())
                continue;
            std::sort (o.begin (), o.end ());
            const double lo = o[static_cast<std::size_t> (0.05 * static_cast<double> (o.size () - 1))];
            const double hi = o[static_cast<std::size_t> (0.95 * static_cast<double> (o.size () - 1))];
            roads[k].width = 2.0 * std::max (std::abs (lo), std::abs (hi)) * gray.geometry.pitch;
        }

        if (stages)
        {
            stages->gray = gray;
            stages->edges = edges;
            stages->dilated = dilated;
            stages->filtered = filtered;
            stages->hough = acc;
            stages->peaks = peaks;
        }
        return roads;
    }

} // namespace sarmover
