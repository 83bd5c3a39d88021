#include <sarmover/backproj.hpp>
#include <sarmover/echo.hpp>
#include <sarmover/mldd.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace sarmover;

namespace
{
    RadarConfig radar (int n)
    {
        RadarConfig c;
        c.n = n;
        return c;
    }

    RangeProfile two_targets (int n)
    {
        const std::vector<PointTarget> ts{{{25 * n / 64.0, 25 * n / 64.0}, {}, 1.0, 0.0}, {{0, 0}, {-0.16, -0.16}, 1.0, 0.0}};
        return simulate (ts, radar (n));
    }

    Array4<cplx> random_array (Shape4 shape, unsigned seed)
    {
        std::mt19937_64 rng (seed);
        std::normal_distribution<double> g;
        Array4<cplx> a (shape);
        for (auto &z : a.data ())
            z = {g (rng), g (rng)};
        return a;
    }

    double relative_rms (const Array2<cplx> &a, const Array2<cplx> &b)
    {
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < a.size (); ++k)
        {
            num += std::norm (a.data ()[k] - b.data ()[k]);
            den += std::norm (b.data ()[k]);
        }
        return std::sqrt (num / den);
    }

    Array2<cplx> as_2d (const CoarseImage &img)
    {
        const Shape4 s = img.values.shape ();
        Array2<cplx> out (s[0], s[1]);
        for (int a = 0; a < s[0]; ++a)
            for (int b = 0; b < s[1]; ++b)
                out (a, b) = img.values (a, b, 0, 0);
        return out;
    }
} // namespace

TEST (Partition, BlocksTileTheDataOnce)
{
    const RadarSampling s (radar (32));
    for (int n_c : {2, 4, 8, 32})
    {
        const auto blocks = partition (s, n_c);
        ASSERT_EQ (blocks.size (), static_cast<std::size_t> ((32 / n_c) * (32 / n_c)));
        Array2<int> hits (32, 32);
        for (const auto &m : blocks)
            for (int l = m.block.l0; l < m.block.l1; ++l)
                for (int i = m.block.i0; i < m.block.i1; ++i)
                    ++hits (l, i);
        for (int h : hits.data ())
            EXPECT_EQ (h, 1) << "n_c " << n_c;
    }
    EXPECT_THROW ((void)partition (s, 3), DomainError);
    EXPECT_THROW ((void)partition (s, 64), DomainError);
}

TEST (Partition, MetaAveragesAndMerge)
{
    const RadarSampling s (radar (16));
    const auto blocks = partition (s, 4);
    const SubdomainMeta &m = blocks[5]; // p = 1, q = 1
    EXPECT_EQ (m.p, 1);
    EXPECT_EQ (m.q, 1);
    double k = 0.0;
    for (int l = 4; l < 8; ++l)
        k += s.wavenumber[static_cast<std::size_t> (l)];
    EXPECT_NEAR (m.kbar, k / 4, 1e-12);
    EXPECT_NEAR (m.tbar, (4 + 5 + 6 + 7) / 4.0 * s.slow_time[1], 1e-12);

    const std::array<SubdomainMeta, 4> group{blocks[0], blocks[1], blocks[4], blocks[5]};
    const SubdomainMeta parent = merge_meta (group);
    const SubdomainMeta direct = meta_of (s, 0, 0, {0, 8, 0, 8});
    EXPECT_NEAR (parent.kbar, direct.kbar, 1e-12);
    EXPECT_NEAR (parent.tbar, direct.tbar, 1e-12);
    EXPECT_NEAR ((parent.abar - direct.abar).norm (), 0.0, 1e-9);
    EXPECT_EQ (parent.block.l1, 8);
    EXPECT_EQ (parent.block.i1, 8);
}

TEST (PhaseRef, UnitModulusAndDemodRemodIdentity)
{
    const RadarSampling s (radar (32));
    const auto space = HypothesisSpace::four_d (default_grid (radar (32)));
    const LevelGrid g = space.at_level (3);
    const auto blocks = partition (s, 4);
    const Array4<cplx> x = random_array (g.count, 7);
    for (std::size_t b : {std::size_t{0}, std::size_t{17}, blocks.size () - 1})
    {
        const Array4<cplx> e = phase_ref (blocks[b], g);
        for (std::size_t k = 0; k < e.size (); ++k)
        {
            EXPECT_NEAR (std::abs (e[k]), 1.0, 1e-12);
            EXPECT_LT (std::abs (e[k] * (std::conj (e[k]) * x[k]) - x[k]), 1e-12 * std::max (1.0, std::abs (x[k])));
        }
    }
}

TEST (Interpolate, ReproducesConstants)
{
    const auto space = HypothesisSpace::four_d (default_grid (radar (16)));
    const LevelGrid coarse = space.at_level (2);
    const LevelGrid fine = space.at_level (3);
    Array4<cplx> c (coarse.count, cplx (2.5, -1.0));
    const Array4<cplx> f = interpolate (c, Box::full (coarse), coarse, Box::full (fine), fine);
    EXPECT_EQ (f.shape (), fine.count);
    for (const auto &z : f.data ())
        EXPECT_LT (std::abs (z - cplx (2.5, -1.0)), 1e-15);
}

TEST (Interpolate, ExactForMultilinearFunctions)
{
    const auto space = HypothesisSpace::four_d (default_grid (radar (32)));
    const LevelGrid coarse = space.at_level (3);
    const LevelGrid fine = space.at_level (4);
    std::mt19937_64 rng (1);
    std::uniform_real_distribution<double> u (-1, 1);
    std::array<cplx, 16> coef{};
    for (auto &z : coef)
        z = {u (rng), u (rng)};
    // f = Σ over subsets S of the axes of coef[S] Π_{a ∈ S} coord_a: linear in each axis separately.
    const auto f = [&] (const LevelGrid &g, const Shape4 &j) {
        cplx acc{};
        for (int mask = 0; mask < 16; ++mask)
        {
            cplx term = coef[static_cast<std::size_t> (mask)];
            for (int a = 0; a < 4; ++a)
                if (mask & (1 << a))
                    term *= g.coord (a, j[static_cast<std::size_t> (a)]) / g.step[static_cast<std::size_t> (a)] / 8.0;
            acc += term;
        }
        return acc;
    };
    Array4<cplx> c (coarse.count);
    for (std::size_t k = 0; k < c.size (); ++k)
        c[k] = f (coarse, c.unravel (k));
    const Array4<cplx> out = interpolate (c, Box::full (coarse), coarse, Box::full (fine), fine);
    const int last = fine.count[0] - 1; // odd, clamped at the edge
    int checked = 0;
    for (std::size_t k = 0; k < out.size (); ++k)
    {
        const Shape4 j = out.unravel (k);
        if (j[0] == last || j[1] == last || j[2] == last || j[3] == last)
            continue;
        // Fine coordinates in units of the coarse step, matching the coarse evaluation.
        cplx want{};
        for (int mask = 0; mask < 16; ++mask)
        {
            cplx term = coef[static_cast<std::size_t> (mask)];
            for (int a = 0; a < 4; ++a)
                if (mask & (1 << a))
                    term *= fine.coord (a, j[static_cast<std::size_t> (a)]) / coarse.step[static_cast<std::size_t> (a)] / 8.0;
            want += term;
        }
        EXPECT_LT (std::abs (out[k] - want), 1e-12);
        ++checked;
    }
    EXPECT_EQ (checked, 15 * 15 * 15 * 15);
}

TEST (Interpolate, EdgeClampRepeatsLastValue)
{
    HypothesisSpace s = HypothesisSpace::road_2d (default_grid (radar (8)), 0.0);
    const LevelGrid coarse = s.at_level (1);
    const LevelGrid fine = s.at_level (2);
    Array4<cplx> c (coarse.count);
    c (0, 0, 0, 0) = 1.0;
    c (1, 0, 0, 0) = 3.0;
    c (0, 0, 1, 0) = 1.0;
    c (1, 0, 1, 0) = 3.0;
    const Array4<cplx> f = interpolate (c, Box::full (coarse), coarse, Box::full (fine), fine);
    EXPECT_EQ (f (0, 0, 0, 0), cplx (1.0));
    EXPECT_EQ (f (1, 0, 0, 0), cplx (2.0));
    EXPECT_EQ (f (2, 0, 0, 0), cplx (3.0));
    EXPECT_EQ (f (3, 0, 0, 0), cplx (3.0));
    EXPECT_THROW ((void)interpolate (c, Box{{1, 0, 0, 0}, {1, 0, 1, 0}}, coarse, Box::full (fine), fine), DomainError);
}

TEST (Pyramid, ExactInterpolationReproducesDirectStatic)
{
    const RangeProfile p = two_targets (16);
    const ImagingGrid g = default_grid (p.config);
    MlddConfig cfg;
    cfg.n_c = 2;
    cfg.interpolation = Interpolation::exact;
    Pyramid pyr (p, HypothesisSpace::static_2d (g), cfg);
    EXPECT_LT (relative_rms (as_2d (pyr.full_image ()), direct_static (p, g)), 1e-10);
}

TEST (Pyramid, ExactInterpolationReproducesDirectDynamic)
{
    const RangeProfile p = two_targets (8);
    const ImagingGrid g = default_grid (p.config);
    MlddConfig cfg;
    cfg.n_c = 2;
    cfg.interpolation = Interpolation::exact;
    Pyramid pyr (p, HypothesisSpace::four_d (g), cfg);
    const Array4<cplx> &got = pyr.full_image ().values;
    const Array4<cplx> want = direct_dynamic (p, g);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < want.size (); ++k)
    {
        num += std::norm (got[k] - want[k]);
        den += std::norm (want[k]);
    }
    EXPECT_LT (std::sqrt (num / den), 1e-10);
}

TEST (Pyramid, BlockSizeEqualToNIsDirect)
{
    const RangeProfile p = two_targets (16);
    const ImagingGrid g = default_grid (p.config);
    MlddConfig cfg;
    cfg.n_c = 16;
    Pyramid pyr (p, HypothesisSpace::static_2d (g), cfg);
    EXPECT_EQ (pyr.level (), 4);
    EXPECT_EQ (pyr.images ().size (), 1u);
    EXPECT_LT (relative_rms (as_2d (pyr.full_image ()), direct_static (p, g)), 1e-10);
}

TEST (Pyramid, MultilinearStaticImageIsClose)
{
    const RangeProfile p = two_targets (64);
    const ImagingGrid g = default_grid (p.config);
    Pyramid pyr (p, HypothesisSpace::static_2d (g), MlddConfig{});
    EXPECT_LT (relative_rms (as_2d (pyr.full_image ()), direct_static (p, g)), 0.2);
}

TEST (Pyramid, LevelCountsAndCandidateCells)
{
    const RangeProfile p = two_targets (32);
    const ImagingGrid g = default_grid (p.config);
    MlddConfig cfg;
    cfg.n_c = 4;
    Pyramid pyr (p, HypothesisSpace::four_d (g), cfg);
    for (int l = 2; l <= 4; ++l)
    {
        pyr.develop (l);
        const std::size_t images = static_cast<std::size_t> ((32 >> l) * (32 >> l));
        EXPECT_EQ (pyr.level (), l);
        EXPECT_EQ (pyr.images ().size (), images);
        EXPECT_EQ (pyr.grid ().count, (Shape4{1 << l, 1 << l, 1 << l, 1 << l}));
        // (N / 2^L)² images of 2^{4L} cells each: N² 2^{2L} in total.
        EXPECT_EQ (pyr.candidate_cells (), static_cast<std::size_t> (32 * 32) << (2 * l));
    }
    EXPECT_THROW (pyr.develop (6), DomainError);
}

TEST (Pyramid, ConfigValidation)
{
    const RangeProfile p = two_targets (16);
    const auto space = HypothesisSpace::static_2d (default_grid (p.config));
    MlddConfig bad;
    bad.n_c = 32;
    EXPECT_THROW (Pyramid (p, space, bad), DomainError);
    bad.n_c = 6;
    EXPECT_THROW (Pyramid (p, space, bad), DomainError);
    bad.n_c = 8;
    bad.detection_level = 2;
    EXPECT_THROW (Pyramid (p, space, bad), DomainError);
}

TEST (DetectionMatrix, BoundsCoherentSum)
{
    // With exact aggregation the images of a level sum coherently to the
    // full-resolution image on the coarse grid, so Σ|g| ≥ |Σ g| = |direct|.
    const RangeProfile p = two_targets (16);
    const ImagingGrid g = default_grid (p.config);
    MlddConfig cfg;
    cfg.n_c = 2;
    cfg.interpolation = Interpolation::exact;
    Pyramid pyr (p, HypothesisSpace::static_2d (g), cfg);
    pyr.develop (3);
    const DetectionMatrix d = pyr.detection_matrix ();
    const auto direct = direct_static (p, g);
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b)
        {
            cplx sum{};
            for (const auto &img : pyr.images ())
                sum += img.values (a, b, 0, 0);
            EXPECT_LT (std::abs (sum - direct (2 * a, 2 * b)), 1e-9 * std::abs (direct (2 * a, 2 * b)) + 1e-12);
            EXPECT_GE (d.values (a, b, 0, 0), std::abs (direct (2 * a, 2 * b)) * (1 - 1e-12));
        }
}

TEST (LocalMaxima, ConstantHasNone)
{
    const Array4<double> d (Shape4{8, 1, 8, 1}, 3.0);
    EXPECT_TRUE (find_local_maxima (d, 0.0).empty ());
}

TEST (LocalMaxima, SinglePeak)
{
    Array4<double> d (Shape4{16, 1, 16, 1}, 1.0);
    d (5, 0, 9, 0) = 50.0;
    d (6, 0, 9, 0) = 10.0;
    const auto m = find_local_maxima (d, 5.0);
    ASSERT_EQ (m.size (), 1u);
    EXPECT_EQ (m[0].cell, (Shape4{5, 0, 9, 0}));
    EXPECT_EQ (m[0].value, 50.0);
}

TEST (LocalMaxima, SortedAndThresholded)
{
    Array4<double> d (Shape4{32, 1, 32, 1}, 0.0);
    d (3, 0, 3, 0) = 10.0;
    d (20, 0, 7, 0) = 30.0;
    d (10, 0, 25, 0) = 20.0;
    d (28, 0, 28, 0) = 0.5;
    const auto m = find_local_maxima (d, 3.0);
    ASSERT_EQ (m.size (), 3u);
    EXPECT_EQ (m[0].value, 30.0);
    EXPECT_EQ (m[1].value, 20.0);
    EXPECT_EQ (m[2].value, 10.0);
}

TEST (Upgrade, FindsStaticTargetCell)
{
    const RadarConfig c = radar (32);
    const ImagingGrid g = default_grid (c);
    const PointTarget t{{g.x (23), g.y (9)}, {}, 1.0, 0.0};
    const RangeProfile p = simulate (std::span<const PointTarget> (&t, 1), c);
    MlddConfig cfg;
    cfg.n_c = 4;
    cfg.detection_level = 3;
    const MlddResult res = run (p, HypothesisSpace::static_2d (g), cfg);
    // Coarse images of 4 x 4 samples barely resolve anything, so D is broad.
    const auto maxima = find_local_maxima (res.detection, 1.0);
    ASSERT_FALSE (maxima.empty ());
    const FocusedDetection f = res.pyramid.upgrade (maxima.front ());
    EXPECT_EQ (f.coarse_level, 3);
    EXPECT_EQ (f.fine_cell[0], 23);
    EXPECT_EQ (f.fine_cell[1], 9);
    EXPECT_NEAR (f.coords[0], t.position.x, 1e-12);
    EXPECT_NEAR (f.coords[1], t.position.y, 1e-12);
    EXPECT_NEAR (db20 (std::abs (f.value) / (32.0 * 32.0)), 0.0, 1.0);
}

TEST (Upgrade, MatchesFullDevelopmentInsideWindow)
{
    const RangeProfile p = two_targets (32);
    const ImagingGrid g = default_grid (p.config);
    MlddConfig cfg;
    cfg.n_c = 4;
    cfg.detection_level = 3;
    const MlddResult res = run (p, HypothesisSpace::static_2d (g), cfg);
    const CoarseDetection det{{4, 5, 0, 0}, 0.0};
    const FocusedDetection f = res.pyramid.upgrade (det);
    Pyramid full (p, HypothesisSpace::static_2d (g), cfg);
    const CoarseImage &img = full.full_image ();
    // The window spans coarse cells 3..5, i.e. fine cells 12..23 on each axis.
    EXPECT_GE (f.fine_cell[0], 12);
    EXPECT_LE (f.fine_cell[0], 23);
    EXPECT_LT (std::abs (f.value - img.at (f.fine_cell)), 1e-9 * std::abs (f.value));
}
