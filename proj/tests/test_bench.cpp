#include <sarmover/bench.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace sarmover;

TEST (LsqSlope, ExactOnLines)
{
    EXPECT_NEAR (lsq_slope ({1, 2, 3, 4}, {3, 5, 7, 9}), 2.0, 1e-12);
    EXPECT_NEAR (lsq_slope ({5, 6, 7}, {1, 1, 1}), 0.0, 1e-12);
    EXPECT_THROW ((void)lsq_slope ({1}, {1}), DomainError);
    EXPECT_THROW ((void)lsq_slope ({2, 2}, {1, 3}), DomainError);
    EXPECT_THROW ((void)lsq_slope ({1, 2}, {1}), DomainError);
}

TEST (BenchSlopes, PowerLawRecordsGiveExponent)
{
    std::vector<BenchRecord> recs;
    for (int n : {16, 32, 64, 128})
    {
        recs.push_back ({"a", n, 2, 0, 1e-9 * std::pow (n, 3.0), 0});
        recs.push_back ({"b", n, 2, 0, 1e-6 * n * n, 0});
    }
    recs.push_back ({"single", 8, 2, 0, 1.0, 0});
    const auto s = bench_slopes (recs);
    EXPECT_NEAR (s.at ("a"), 3.0, 1e-9);
    EXPECT_NEAR (s.at ("b"), 2.0, 1e-9);
    EXPECT_FALSE (s.contains ("single"));
}

TEST (BenchCsv, HeaderAndRows)
{
    const std::string csv = bench_csv ({{"static2d", 32, 2, 5, 0.5, 1024}});
    std::istringstream is (csv);
    std::string header, row, extra;
    std::getline (is, header);
    std::getline (is, row);
    EXPECT_EQ (header, "algorithm,n,n_c,detection_level,seconds,ops");
    EXPECT_EQ (row, "static2d,32,2,5,0.5,1024");
    EXPECT_FALSE (std::getline (is, extra));
}

TEST (RunBench, Validation)
{
    BenchConfig c;
    c.algorithms = {"nope"};
    EXPECT_THROW ((void)run_bench (c), DomainError);
    c.algorithms = {"mldd_full4d"};
    c.sizes = {128};
    EXPECT_THROW ((void)run_bench (c), DomainError);
    EXPECT_THROW ((void)bench_one ("static2d", 24, 1), DomainError);
    EXPECT_THROW ((void)bench_one ("static2d", 16, 0), DomainError);
}

TEST (RunBench, SmallRunProducesRecords)
{
    BenchConfig c;
    c.sizes = {8, 16};
    c.algorithms = bench_algorithms ();
    c.repeats = 1;
    const auto recs = run_bench (c);
    ASSERT_EQ (recs.size (), 10u);
    for (const auto &r : recs)
    {
        EXPECT_GT (r.seconds, 0.0);
        EXPECT_GT (r.ops, 0.0);
        EXPECT_EQ (r.n_c, r.algorithm == "direct" ? 0 : 2);
    }
    EXPECT_EQ (recs[0].ops, std::pow (8.0, 4.0));
}

TEST (PyramidCells, CountsEachLevel)
{
    // N = 8, N_c = 2, 2-D: levels 1..3 hold 16*4 + 4*16 + 1*64 cells.
    EXPECT_EQ (detail::pyramid_cells (8, 2, 2, 3), 192.0);
    EXPECT_EQ (detail::pyramid_cells (8, 2, 4, 1), 16.0 * 16.0);
}
