#pragma once
/**
 * @file   mldd.hpp
 * @brief  Multi-level domain decomposition imaging.
 *
 * The range-profile matrix is split into N_c x N_c blocks. Each block is
 * backprojected onto a coarse hypothesis grid (2^L1 points per active axis,
 * L1 = log2 N_c). Levels are then merged pairwise in frequency and pulse: each
 * child image is demodulated by its reference phase, interpolated onto the
 * grid of twice the density, remodulated and summed. After L_max - L1 levels
 * one image remains and it approximates direct backprojection.
 *
 * Grids are nested: index j at level L is index 2j at level L + 1. Images may
 * cover a sub-box of their level grid; boxes use absolute inclusive indices.
 */

#include <sarmover/backproj.hpp>
#include <sarmover/geometry.hpp>
#include <sarmover/parallel.hpp>
#include <sarmover/pattern.hpp>
#include <sarmover/types.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

namespace sarmover
{
    enum class Interpolation
    {
        multilinear, ///< separable linear interpolation between nested grids
        exact        ///< re-evaluate each child's partial sum at the fine points
    };

    struct MlddConfig
    {
        int n_c = 8;
        int detection_level = -1; ///< L_d; negative means L_max
        Interpolation interpolation = Interpolation::multilinear;
        double kappa = 5.0; ///< threshold μ + κσ on the detection matrix
        int window = 3;     ///< coarse cells per axis developed around a detection

        [[nodiscard]] int base_level () const noexcept { return ilog2 (n_c); }
        [[nodiscard]] int resolved_detection_level (int n) const noexcept { return detection_level < 0 ? ilog2 (n) : detection_level; }

        void validate (int n) const
        {
            if (!is_power_of_two (n_c) || n_c < 2)
                throw DomainError ("N_c must be a power of two >= 2, got " + std::to_string (n_c));
            if (n_c > n || n % n_c != 0)
                throw DomainError ("N = " + std::to_string (n) + " is not divisible by N_c = " + std::to_string (n_c));
            const int ld = resolved_detection_level (n);
            if (ld < base_level () || ld > ilog2 (n))
                throw DomainError ("detection level must lie in [log2 N_c, log2 N], got " + std::to_string (ld));
            if (window < 1)
                throw DomainError ("upgrade window must be >= 1");
        }
    };

    /// Averages of one data block.
    struct SubdomainMeta
    {
        int p = 0; ///< frequency block index
        int q = 0; ///< pulse block index
        double kbar = 0.0;
        Vec3 abar{};
        double tbar = 0.0;
        SampleBlock block{};
    };

    /// Inclusive index box on a level grid.
    struct Box
    {
        Shape4 lo{0, 0, 0, 0};
        Shape4 hi{0, 0, 0, 0};

        [[nodiscard]] static Box full (const LevelGrid &g) noexcept { return {{0, 0, 0, 0}, {g.count[0] - 1, g.count[1] - 1, g.count[2] - 1, g.count[3] - 1}}; }

        [[nodiscard]] Shape4 shape () const noexcept { return {hi[0] - lo[0] + 1, hi[1] - lo[1] + 1, hi[2] - lo[2] + 1, hi[3] - lo[3] + 1}; }

        [[nodiscard]] bool contains (const Box &o) const noexcept
        {
            for (std::size_t a = 0; a < 4; ++a)
                if (o.lo[a] < lo[a] || o.hi[a] > hi[a])
                    return false;
            return true;
        }

        bool operator== (const Box &) const = default;
    };

    /// Child-level box needed to interpolate a parent-level box.
    [[nodiscard]] inline Box child_box_for (const Box &parent, const LevelGrid &child) noexcept
    {
        Box b;
        for (std::size_t a = 0; a < 4; ++a)
        {
            b.lo[a] = parent.lo[a] / 2;
            b.hi[a] = std::min ((parent.hi[a] + 1) / 2, child.count[a] - 1);
        }
        return b;
    }

    struct CoarseImage
    {
        int level = 0;
        SubdomainMeta meta;
        Box box;
        Array4<cplx> values;

        /// Value at absolute level-grid index.
        [[nodiscard]] const cplx &at (const Shape4 &idx) const noexcept
        {
            return values (idx[0] - box.lo[0], idx[1] - box.lo[1], idx[2] - box.lo[2], idx[3] - box.lo[3]);
        }
    };

    struct DetectionMatrix
    {
        int level = 0;
        LevelGrid grid;
        Array4<double> values;
    };

    struct CoarseDetection
    {
        Shape4 cell{};
        double value = 0.0;
    };

    /// A detection developed to full resolution. Coordinates are (x, y, vx, vy)
    /// in the hypothesis frame.
    struct FocusedDetection
    {
        int coarse_level = 0;
        Shape4 coarse_cell{};
        std::array<double, 4> coarse{};
        Shape4 fine_cell{};
        std::array<double, 4> coords{};
        cplx value{};
    };

    /// Read-only inputs shared by every stage.
    struct ImagingContext
    {
        const Array2<cplx> *data = nullptr;
        RadarSampling sampling;
        HypothesisSpace space;
        AntennaPattern pattern;
        Interpolation interpolation = Interpolation::multilinear;

        [[nodiscard]] cplx partial_sum (const Vec3 &r, const Vec3 &v, const SampleBlock &b) const
        {
            return pattern.isotropic () ? backproject_cell_fast (*data, sampling, r, v, b) : backproject_cell (*data, sampling, r, v, b, pattern);
        }
    };

    namespace detail
    {
        /// Absolute grid index of linear position k inside a box.
        [[nodiscard]] inline Shape4 box_index (const Box &box, const Shape4 &shape, std::size_t k) noexcept
        {
            Shape4 idx{};
            for (int a = 3; a >= 0; --a)
            {
                const auto ua = static_cast<std::size_t> (a);
                const auto n = static_cast<std::size_t> (shape[ua]);
                idx[ua] = box.lo[ua] + static_cast<int> (k % n);
                k /= n;
            }
            return idx;
        }

        /// Run fn(item) over items, parallel at the outer level when there are
        /// enough items, otherwise leave parallelism to fn.
        template <typename Fn> void for_each_item (std::size_t count, Fn &&fn)
        {
            if (count >= static_cast<std::size_t> (worker_count ()))
                parallel_for (count, fn);
            else
                for (std::size_t k = 0; k < count; ++k)
                    fn (k);
        }
    } // namespace detail

    // -------------------------------------------------------------------------
    // Data partition
    // -------------------------------------------------------------------------

    [[nodiscard]] inline SubdomainMeta meta_of (const RadarSampling &s, int p, int q, const SampleBlock &b)
    {
        SubdomainMeta m;
        m.p = p;
        m.q = q;
        m.block = b;
        for (int l = b.l0; l < b.l1; ++l)
            m.kbar += s.wavenumber[static_cast<std::size_t> (l)];
        m.kbar /= static_cast<double> (b.l1 - b.l0);
        for (int i = b.i0; i < b.i1; ++i)
        {
            m.abar = m.abar + s.antenna[static_cast<std::size_t> (i)];
            m.tbar += s.slow_time[static_cast<std::size_t> (i)];
        }
        const double ni = static_cast<double> (b.i1 - b.i0);
        m.abar = m.abar * (1.0 / ni);
        m.tbar /= ni;
        return m;
    }

    /// (N / N_c)² contiguous blocks, row-major in (p, q).
    [[nodiscard]] inline std::vector<SubdomainMeta> partition (const RadarSampling &s, int n_c)
    {
        const int n = s.size ();
        if (!is_power_of_two (n_c) || n_c > n || n % n_c != 0)
            throw DomainError ("N = " + std::to_string (n) + " is not divisible by N_c = " + std::to_string (n_c));
        const int m = n / n_c;
        std::vector<SubdomainMeta> out;
        out.reserve (static_cast<std::size_t> (m * m));
        for (int p = 0; p < m; ++p)
            for (int q = 0; q < m; ++q)
                out.push_back (meta_of (s, p, q, {p * n_c, (p + 1) * n_c, q * n_c, (q + 1) * n_c}));
        return out;
    }

    /// Parent meta as the mean of its four children.
    [[nodiscard]] inline SubdomainMeta merge_meta (std::span<const SubdomainMeta, 4> c)
    {
        SubdomainMeta m;
        m.p = c[0].p / 2;
        m.q = c[0].q / 2;
        m.block = c[0].block;
        for (const auto &ch : c)
        {
            m.kbar += ch.kbar;
            m.abar = m.abar + ch.abar;
            m.tbar += ch.tbar;
            m.block.l0 = std::min (m.block.l0, ch.block.l0);
            m.block.l1 = std::max (m.block.l1, ch.block.l1);
            m.block.i0 = std::min (m.block.i0, ch.block.i0);
            m.block.i1 = std::max (m.block.i1, ch.block.i1);
        }
        m.kbar *= 0.25;
        m.abar = m.abar * 0.25;
        m.tbar *= 0.25;
        return m;
    }

    // -------------------------------------------------------------------------
    // Phase reference, base images, interpolation
    // -------------------------------------------------------------------------

    /// exp(j 2 k̄ |r + v t̄ - ā|) at one hypothesis.
    [[nodiscard]] inline cplx phase_ref_at (const SubdomainMeta &m, const LevelGrid &g, const Shape4 &idx) noexcept
    {
        Vec3 r, v;
        g.point (idx, r, v);
        return std::polar (1.0, 2.0 * m.kbar * (r + v * m.tbar - m.abar).norm ());
    }

    [[nodiscard]] inline Array4<cplx> phase_ref (const SubdomainMeta &m, const LevelGrid &g, const Box &box)
    {
        const Shape4 shape = box.shape ();
        Array4<cplx> out (shape);
        parallel_for (out.size (), [&] (std::size_t k) { out[k] = phase_ref_at (m, g, detail::box_index (box, shape, k)); });
        return out;
    }

    [[nodiscard]] inline Array4<cplx> phase_ref (const SubdomainMeta &m, const LevelGrid &g) { return phase_ref (m, g, Box::full (g)); }

    /// Partial backprojection of one block on the given level grid.
    [[nodiscard]] inline CoarseImage base_image (const ImagingContext &ctx, const SubdomainMeta &m, int level)
    {
        const LevelGrid g = ctx.space.at_level (level);
        CoarseImage img;
        img.level = level;
        img.meta = m;
        img.box = Box::full (g);
        img.values = Array4<cplx> (img.box.shape ());
        parallel_for (img.values.size (), [&] (std::size_t k) {
            Vec3 r, v;
            g.point (detail::box_index (img.box, img.box.shape (), k), r, v);
            img.values[k] = ctx.partial_sum (r, v, m.block);
        });
        return img;
    }

    /**
     * Separable linear interpolation from a coarse box onto a fine box of the
     * next level. Even fine indices copy the coarse value, odd ones average
     * their two coarse neighbours; past the last coarse point the edge value is
     * repeated. Axes with a single point on both levels pass through.
     */
    [[nodiscard]] inline Array4<cplx> interpolate (const Array4<cplx> &coarse, const Box &coarse_box, const LevelGrid &coarse_grid, const Box &fine_box,
                                                   const LevelGrid &fine_grid)
    {
        if (!coarse_box.contains (child_box_for (fine_box, coarse_grid)))
            throw DomainError ("interpolate: coarse box does not cover the fine box");
        Array4<cplx> cur = coarse;
        for (std::size_t a = 0; a < 4; ++a)
        {
            if (fine_grid.count[a] == 1)
                continue;
            const Shape4 in_shape = cur.shape ();
            Shape4 out_shape = in_shape;
            out_shape[a] = fine_box.hi[a] - fine_box.lo[a] + 1;
            Array4<cplx> next (out_shape);
            std::size_t outer = 1;
            for (std::size_t b = 0; b < a; ++b)
                outer *= static_cast<std::size_t> (in_shape[b]);
            std::size_t inner = 1;
            for (std::size_t b = a + 1; b < 4; ++b)
                inner *= static_cast<std::size_t> (in_shape[b]);
            const auto n_in = static_cast<std::size_t> (in_shape[a]);
            const auto n_out = static_cast<std::size_t> (out_shape[a]);
            const int last = coarse_grid.count[a] - 1;

            for (std::size_t o = 0; o < outer; ++o)
                for (std::size_t jf = 0; jf < n_out; ++jf)
                {
                    const int fine = fine_box.lo[a] + static_cast<int> (jf);
                    const int j = fine / 2;
                    const auto j0 = static_cast<std::size_t> (j - coarse_box.lo[a]);
                    const cplx *src0 = &cur[(o * n_in + j0) * inner];
                    cplx *dst = &next[(o * n_out + jf) * inner];
                    if (fine % 2 == 0)
                    {
                        std::copy (src0, src0 + inner, dst);
                        continue;
                    }
                    const auto j1 = static_cast<std::size_t> (std::min (j + 1, last) - coarse_box.lo[a]);
                    const cplx *src1 = &cur[(o * n_in + j1) * inner];
                    for (std::size_t u = 0; u < inner; ++u)
                        dst[u] = 0.5 * (src0[u] + src1[u]);
                }
            cur = std::move (next);
        }
        return cur;
    }

    /**
     * Merge four child images (children of data block (p, q) in order
     * (2p, 2q), (2p, 2q+1), (2p+1, 2q), (2p+1, 2q+1)) into their parent on the
     * next level, over the given parent box.
     */
    [[nodiscard]] inline CoarseImage aggregate_level (const ImagingContext &ctx, std::span<const CoarseImage *const, 4> children, const Box &parent_box)
    {
        const int child_level = children[0]->level;
        for (const auto *c : children)
            if (c->level != child_level)
                throw DomainError ("aggregate_level: children are on different levels");
        const int level = child_level + 1;
        const LevelGrid coarse = ctx.space.at_level (child_level);
        const LevelGrid fine = ctx.space.at_level (level);

        const std::array<SubdomainMeta, 4> metas{children[0]->meta, children[1]->meta, children[2]->meta, children[3]->meta};
        CoarseImage parent;
        parent.level = level;
        parent.meta = merge_meta (metas);
        parent.box = parent_box;
        const Shape4 shape = parent_box.shape ();
        parent.values = Array4<cplx> (shape);

        if (ctx.interpolation == Interpolation::exact)
        {
            parallel_for (parent.values.size (), [&] (std::size_t k) {
                const Shape4 idx = detail::box_index (parent_box, shape, k);
                Vec3 r, v;
                fine.point (idx, r, v);
                cplx acc{};
                for (const auto &m : metas)
                {
                    const cplx e = phase_ref_at (m, fine, idx);
                    acc += e * (std::conj (e) * ctx.partial_sum (r, v, m.block));
                }
                parent.values[k] = acc;
            });
            return parent;
        }

        std::array<Array4<cplx>, 4> lifted;
        for (std::size_t c = 0; c < 4; ++c)
        {
            const CoarseImage &child = *children[c];
            Array4<cplx> demod (child.box.shape ());
            parallel_for (demod.size (), [&] (std::size_t k) {
                demod[k] = std::conj (phase_ref_at (child.meta, coarse, detail::box_index (child.box, child.box.shape (), k))) * child.values[k];
            });
            lifted[c] = interpolate (demod, child.box, coarse, parent_box, fine);
        }
        parallel_for (parent.values.size (), [&] (std::size_t k) {
            const Shape4 idx = detail::box_index (parent_box, shape, k);
            cplx acc{};
            for (std::size_t c = 0; c < 4; ++c)
                acc += phase_ref_at (metas[c], fine, idx) * lifted[c][k];
            parent.values[k] = acc;
        });
        return parent;
    }

    /// Merge every 2 x 2 group of a level. Children are row-major (p, q) with
    /// blocks_per_axis entries per row.
    [[nodiscard]] inline std::vector<CoarseImage> aggregate_all (const ImagingContext &ctx, const std::vector<CoarseImage> &children, const Box &parent_box)
    {
        const int m = static_cast<int> (std::lround (std::sqrt (static_cast<double> (children.size ()))));
        if (m * m != static_cast<int> (children.size ()) || m % 2 != 0)
            throw DomainError ("aggregate_all: child count must be a square with even side");
        const int mp = m / 2;
        std::vector<CoarseImage> parents (static_cast<std::size_t> (mp * mp));
        detail::for_each_item (parents.size (), [&] (std::size_t k) {
            const int p = static_cast<int> (k) / mp;
            const int q = static_cast<int> (k) % mp;
            const auto at = [&] (int a, int b) { return &children[static_cast<std::size_t> ((2 * p + a) * m + (2 * q + b))]; };
            const std::array<const CoarseImage *, 4> group{at (0, 0), at (0, 1), at (1, 0), at (1, 1)};
            parents[k] = aggregate_level (ctx, group, parent_box);
        });
        return parents;
    }

    // -------------------------------------------------------------------------
    // Detection
    // -------------------------------------------------------------------------

    /// D = Σ |g̃| over images on one level and one common box.
    [[nodiscard]] inline DetectionMatrix detection_matrix (std::span<const CoarseImage> images, const HypothesisSpace &space)
    {
        if (images.empty ())
            throw DomainError ("detection_matrix: no images");
        DetectionMatrix d;
        d.level = images.front ().level;
        d.grid = space.at_level (d.level);
        d.values = Array4<double> (images.front ().values.shape ());
        for (const auto &img : images)
        {
            if (img.level != d.level || img.values.shape () != d.values.shape ())
                throw DomainError ("detection_matrix: images differ in level or shape");
            for (std::size_t k = 0; k < img.values.size (); ++k)
                d.values[k] += std::abs (img.values[k]);
        }
        return d;
    }

    /**
     * Cells strictly greater than their neighbours along every axis with more
     * than one point, and above μ + κσ of all cells. Sorted by descending value;
     * equal values keep ascending linear index.
     */
    [[nodiscard]] inline std::vector<CoarseDetection> find_local_maxima (const Array4<double> &d, double kappa)
    {
        const std::size_t n = d.size ();
        double mean = 0.0;
        for (double x : d.data ())
            mean += x;
        mean /= static_cast<double> (n);
        double var = 0.0;
        for (double x : d.data ())
            var += (x - mean) * (x - mean);
        const double threshold = mean + kappa * std::sqrt (var / static_cast<double> (n));

        const Shape4 shape = d.shape ();
        std::vector<CoarseDetection> out;
        for (std::size_t k = 0; k < n; ++k)
        {
            const double x = d[k];
            if (!(x > threshold))
                continue;
            const Shape4 idx = d.unravel (k);
            bool peak = true;
            for (std::size_t a = 0; a < 4 && peak; ++a)
            {
                if (shape[a] == 1)
                    continue;
                for (int step : {-1, 1})
                {
                    Shape4 nb = idx;
                    nb[a] += step;
                    if (nb[a] < 0 || nb[a] >= shape[a])
                        continue;
                    if (!(x > d (nb[0], nb[1], nb[2], nb[3])))
                    {
                        peak = false;
                        break;
                    }
                }
            }
            if (peak)
                out.push_back ({idx, x});
        }
        std::stable_sort (out.begin (), out.end (), [] (const CoarseDetection &a, const CoarseDetection &b) { return a.value > b.value; });
        return out;
    }

    [[nodiscard]] inline std::vector<CoarseDetection> find_local_maxima (const DetectionMatrix &d, double kappa = 5.0)
    {
        return find_local_maxima (d.values, kappa);
    }

    // -------------------------------------------------------------------------
    // Pyramid
    // -------------------------------------------------------------------------

    /// Imaging state: the retained images of the current level. Keeps a
    /// pointer to the range profile, which must outlive the pyramid.
    class Pyramid
    {
      public:
        Pyramid (const RangeProfile &p, RadarSampling sampling, const HypothesisSpace &space, const MlddConfig &cfg, AntennaPattern pattern = {})
            : cfg_ (cfg)
        {
            cfg_.validate (p.n_freq ());
            if (p.n_freq () != sampling.size () || p.n_pulse () != sampling.size ())
                throw DomainError ("range profile does not match the acquisition");
            ctx_.data = &p.values;
            ctx_.sampling = std::move (sampling);
            ctx_.space = space;
            ctx_.pattern = std::move (pattern);
            ctx_.interpolation = cfg.interpolation;
            max_level_ = ilog2 (p.n_freq ());

            level_ = cfg_.base_level ();
            const auto metas = partition (ctx_.sampling, cfg_.n_c);
            images_.resize (metas.size ());
            detail::for_each_item (metas.size (), [&] (std::size_t k) { images_[k] = base_image (ctx_, metas[k], level_); });
        }

        Pyramid (const RangeProfile &p, const HypothesisSpace &space, const MlddConfig &cfg, AntennaPattern pattern = {})
            : Pyramid (p, RadarSampling (p.config), space, cfg, std::move (pattern))
        {
        }

        [[nodiscard]] int level () const noexcept { return level_; }
        [[nodiscard]] int max_level () const noexcept { return max_level_; }
        [[nodiscard]] const MlddConfig &config () const noexcept { return cfg_; }
        [[nodiscard]] const ImagingContext &context () const noexcept { return ctx_; }
        [[nodiscard]] const std::vector<CoarseImage> &images () const noexcept { return images_; }
        [[nodiscard]] LevelGrid grid () const noexcept { return ctx_.space.at_level (level_); }

        /// Number of cells searched at the current level: images x cells per image.
        [[nodiscard]] std::size_t candidate_cells () const noexcept { return images_.size () * images_.front ().values.size (); }

        /// Aggregate full-grid levels up to `level`; children are released per level.
        void develop (int level)
        {
            if (level > max_level_)
                throw DomainError ("develop: level beyond L_max");
            while (level_ < level)
            {
                const Box box = Box::full (ctx_.space.at_level (level_ + 1));
                images_ = aggregate_all (ctx_, images_, box);
                ++level_;
            }
        }

        [[nodiscard]] DetectionMatrix detection_matrix () const { return sarmover::detection_matrix (images_, ctx_.space); }

        /// The single full-resolution image (develops to L_max if needed).
        [[nodiscard]] const CoarseImage &full_image ()
        {
            develop (max_level_);
            return images_.front ();
        }

        /// Continue aggregation to L_max inside a window of coarse cells around
        /// the detection and return the strongest fine cell there.
        [[nodiscard]] FocusedDetection upgrade (const CoarseDetection &det) const
        {
            const LevelGrid gd = grid ();
            const int shift = max_level_ - level_;
            FocusedDetection out;
            out.coarse_level = level_;
            out.coarse_cell = det.cell;
            for (std::size_t a = 0; a < 4; ++a)
                out.coarse[a] = gd.coord (static_cast<int> (a), det.cell[a]);

            Box window;
            const int half = cfg_.window / 2;
            for (std::size_t a = 0; a < 4; ++a)
            {
                if (gd.count[a] == 1)
                    continue;
                const int lo = std::max (0, det.cell[a] - half);
                const int hi = std::min (gd.count[a] - 1, det.cell[a] + (cfg_.window - 1 - half));
                window.lo[a] = lo << shift;
                window.hi[a] = ((hi + 1) << shift) - 1;
            }

            std::vector<Box> boxes (static_cast<std::size_t> (max_level_ + 1));
            boxes[static_cast<std::size_t> (max_level_)] = window;
            for (int l = max_level_; l > level_; --l)
                boxes[static_cast<std::size_t> (l - 1)] = child_box_for (boxes[static_cast<std::size_t> (l)], ctx_.space.at_level (l - 1));

            std::vector<CoarseImage> local;
            const std::vector<CoarseImage> *cur = &images_;
            for (int l = level_ + 1; l <= max_level_; ++l)
            {
                local = aggregate_all (ctx_, *cur, boxes[static_cast<std::size_t> (l)]);
                cur = &local;
            }

            const CoarseImage &top = cur->front ();
            const Shape4 wshape = window.shape ();
            double best_mag = -1.0;
            for (std::size_t k = 0; k < shape_volume (wshape); ++k)
            {
                const Shape4 idx = detail::box_index (window, wshape, k);
                const double m = std::abs (top.at (idx));
                if (m > best_mag)
                {
                    best_mag = m;
                    out.fine_cell = idx;
                }
            }
            const LevelGrid gf = ctx_.space.at_level (max_level_);
            for (std::size_t a = 0; a < 4; ++a)
                out.coords[a] = gf.coord (static_cast<int> (a), out.fine_cell[a]);
            out.value = top.at (out.fine_cell);
            return out;
        }

      private:
        MlddConfig cfg_;
        ImagingContext ctx_;
        int max_level_ = 0;
        int level_ = 0;
        std::vector<CoarseImage> images_;
    };

    struct MlddResult
    {
        Pyramid pyramid;
        DetectionMatrix detection;
    };

    /// Build the pyramid to L_d and form the detection matrix there. With
    /// L_d = L_max the pyramid holds the single full-resolution image.
    [[nodiscard]] inline MlddResult run (const RangeProfile &p, RadarSampling sampling, const HypothesisSpace &space, const MlddConfig &cfg,
                                         AntennaPattern pattern = {})
    {
        Pyramid pyr (p, std::move (sampling), space, cfg, std::move (pattern));
        pyr.develop (cfg.resolved_detection_level (p.n_freq ()));
        DetectionMatrix d = pyr.detection_matrix ();
        return {std::move (pyr), std::move (d)};
    }

    [[nodiscard]] inline MlddResult run (const RangeProfile &p, const HypothesisSpace &space, const MlddConfig &cfg, AntennaPattern pattern = {})
    {
        return run (p, RadarSampling (p.config), space, cfg, std::move (pattern));
    }

} // namespace sarmover
