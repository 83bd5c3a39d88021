#include <sarmover/io.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sarmover;

namespace
{
    GrayImage ramp (int rows, int cols)
    {
        GrayImage g (rows, cols, {0.5, {-3.0, 2.0}});
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                g (r, c) = 1.0 + r * cols + c;
        return g;
    }

    std::string slurp (const std::string &path)
    {
        std::ifstream is (path, std::ios::binary);
        std::ostringstream os;
        os << is.rdbuf ();
        return os.str ();
    }

    std::filesystem::path scratch (const std::string &name)
    {
        const auto dir = std::filesystem::temp_directory_path () / "sarmover_test_io";
        std::filesystem::create_directories (dir);
        return dir / name;
    }
} // namespace

TEST (QuantizeDb, PeakIsWhiteAndFloorIsBlack)
{
    GrayImage g (1, 3);
    g (0, 0) = 1.0;
    g (0, 1) = 0.01; // -40 dB
    g (0, 2) = 0.1;  // -20 dB
    const DbImage q = quantize_db (g, 40.0);
    EXPECT_FALSE (q.empty);
    EXPECT_EQ (q.pixels (0, 0), 65535);
    EXPECT_EQ (q.pixels (0, 1), 0);
    EXPECT_NEAR (q.pixels (0, 2), 32768, 1);
    EXPECT_NEAR (q.to_db (q.pixels (0, 2)), -20.0, 1e-3);
}

TEST (QuantizeDb, ZeroImageIsBlack)
{
    const DbImage q = quantize_db (GrayImage (4, 5));
    EXPECT_TRUE (q.empty);
    for (auto v : q.pixels.data ())
        EXPECT_EQ (v, 0);
    EXPECT_THROW ((void)quantize_db (GrayImage (1, 1), 0.0), DomainError);
}

TEST (QuantizeDb, ScaleInvariant)
{
    GrayImage a = ramp (6, 7);
    GrayImage b = a;
    for (auto &v : b.pixels.data ())
        v *= 1234.5;
    EXPECT_EQ (quantize_db (a).pixels.data (), quantize_db (b).pixels.data ());
}

TEST (Pgm, SixteenBitRoundTrip)
{
    Image16 img (3, 5);
    for (std::size_t k = 0; k < img.size (); ++k)
        img.data ()[k] = static_cast<std::uint16_t> (k * 4099 + 1);
    std::stringstream ss;
    write_pgm (ss, img);
    EXPECT_EQ (ss.str ().substr (0, 13), "P5\n5 3\n65535\n");
    int maxval = 0;
    const Image16 back = read_pgm (ss, &maxval);
    EXPECT_EQ (maxval, 65535);
    EXPECT_EQ (back.rows (), 3);
    EXPECT_EQ (back.cols (), 5);
    EXPECT_EQ (back.data (), img.data ());
}

TEST (Pgm, BinaryImageIsEightBit)
{
    BinaryImage b (2, 2);
    b (1, 0) = 1;
    std::stringstream ss;
    write_pgm (ss, b);
    int maxval = 0;
    const Image16 back = read_pgm (ss, &maxval);
    EXPECT_EQ (maxval, 255);
    EXPECT_EQ (back (1, 0), 255);
    EXPECT_EQ (back (0, 0), 0);
}

TEST (Pgm, RejectsBadInput)
{
    std::stringstream bad ("P2\n1 1\n255\n0");
    EXPECT_THROW ((void)read_pgm (bad), IoError);
    std::stringstream cut ("P5\n4 4\n65535\n\x01\x02");
    EXPECT_THROW ((void)read_pgm (cut), IoError);
    std::stringstream junk ("P5\nfour 4\n255\n");
    EXPECT_THROW ((void)read_pgm (junk), IoError);
}

TEST (DbImageFile, WritesSidecarAndIsDeterministic)
{
    const GrayImage g = ramp (8, 8);
    const auto a = scratch ("a.pgm").string ();
    const auto b = scratch ("b.pgm").string ();
    save_db_image (a, g, 30.0);
    save_db_image (b, g, 30.0);
    EXPECT_EQ (slurp (a), slurp (b));
    const std::string side = slurp (a + ".scale.txt");
    EXPECT_NE (side.find ("range_db 30"), std::string::npos);
    EXPECT_NE (side.find ("pitch_m 0.5"), std::string::npos);
    EXPECT_NE (side.find ("origin_x_m -3"), std::string::npos);
    std::istringstream ps (side);
    std::string line, key;
    double peak = 0.0;
    while (std::getline (ps, line))
    {
        std::istringstream ls (line);
        if (ls >> key && key == "peak_db")
            ls >> peak;
    }
    EXPECT_NEAR (peak, db20 (64.0), 1e-12);
    EXPECT_THROW (save_db_image ("/nonexistent/dir/x.pgm", g), IoError);
}

TEST (DbImageFile, OverlayBurnsWhite)
{
    GrayImage g (2, 2);
    g (0, 0) = 1.0;
    BinaryImage o (2, 2);
    o (1, 1) = 1;
    DbImage q = quantize_db (g);
    burn_overlay (q.pixels, o);
    EXPECT_EQ (q.pixels (1, 1), 65535);
    EXPECT_THROW (burn_overlay (q.pixels, BinaryImage (3, 2)), DomainError);
}

TEST (ReportFile, RoundTripAndErrors)
{
    Report r;
    r.timings["total"] = 1.5;
    r.config = config_json (PipelineConfig{});
    const auto path = scratch ("report.json").string ();
    save_report (path, r);
    EXPECT_EQ (to_json (load_report (path)), to_json (r));

    std::ofstream (scratch ("broken.json")) << "{ not json";
    EXPECT_THROW ((void)load_report (scratch ("broken.json").string ()), IoError);
    EXPECT_THROW ((void)load_report (scratch ("missing.json").string () + ".nope"), IoError);
}

TEST (SceneFile, LoadsFromDisk)
{
    const Scenario s = load_scene_file (std::string (SARMOVER_SCENES) + "/two_targets.json");
    EXPECT_EQ (s.radar.n, 64);
    EXPECT_EQ (s.scene.targets.size (), 2u);
    EXPECT_THROW ((void)load_scene_file ("/nonexistent.json"), IoError);
}
