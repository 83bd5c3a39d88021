// sarmover: command-line front end for simulation, imaging, detection,
// road extraction and the scaling benchmark.
//
// Exit codes: 0 ok, 1 domain error, 2 IO or parse error.

#include <sarmover/sarmover.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

using namespace sarmover;

namespace
{
    struct Options
    {
        int threads = 0;

        std::string scene_file;
        std::string profile_file;
        std::string out_file;

        std::string mode = "static";
        double range_db = 40.0;

        std::string report_file = "report.json";
        std::string image_file;
        std::string dump_prefix;
        bool known_roads = false;
        int n_c = 8;
        int road_level = -1;
        double kappa = 5.0;

        std::vector<int> sizes{32, 64, 128, 256};
        std::vector<std::string> algorithms{"road_based", "static2d"};
        int repeats = 3;
        double min_seconds = 0.25;
        int bench_nc = 2;
    };

    ImagingGrid grid_for (const RangeProfile &p, const Options &o)
    {
        if (!o.scene_file.empty ())
        {
            ImagingGrid g = load_scene_file (o.scene_file).grid;
            g.points_per_dim = p.n_freq ();
            return g;
        }
        return default_grid (p.config);
    }

    int cmd_simulate (const Options &o)
    {
        const Scenario s = load_scene_file (o.scene_file);
        save_profile (o.out_file, simulate (s));
        std::cout << "wrote " << o.out_file << " (N = " << s.radar.n << ", " << s.scene.targets.size () << " targets)\n";
        return 0;
    }

    int cmd_image (const Options &o)
    {
        const RangeProfile p = load_profile (o.profile_file);
        const ImagingGrid grid = grid_for (p, o);
        Array2<cplx> img;
        if (o.mode == "static")
            img = static_image (p, grid);
        else if (o.mode == "direct")
            img = direct_static (p, grid);
        else
            throw DomainError ("unknown image mode: " + o.mode);
        save_db_image (o.out_file, magnitude_raster (img, grid), o.range_db);
        std::cout << "wrote " << o.out_file << " and " << o.out_file << ".scale.txt\n";
        return 0;
    }

    int cmd_detect (const Options &o)
    {
        const RangeProfile p = load_profile (o.profile_file);
        const ImagingGrid grid = grid_for (p, o);
        PipelineConfig cfg;
        cfg.static_mldd.n_c = cfg.road_mldd.n_c = std::min (o.n_c, p.n_freq ());
        cfg.road_mldd.detection_level = o.road_level;
        cfg.road_mldd.kappa = cfg.fallback_mldd.kappa = o.kappa;
        cfg.fallback_mldd.n_c = std::min (cfg.fallback_mldd.n_c, p.n_freq ());
        if (o.known_roads)
        {
            if (o.scene_file.empty ())
                throw DomainError ("--known-roads needs --scene");
            cfg.known_roads = load_scene_file (o.scene_file).scene.roads;
        }
        const PipelineResult res = full_run (p, grid, cfg);
        save_report (o.report_file, res.report);
        if (!o.image_file.empty ())
        {
            save_db_image (o.image_file, magnitude_raster (res.final_image, grid), o.range_db, &res.overlay);
            save_db_image (o.image_file + ".initial.pgm", magnitude_raster (res.initial_image, grid), o.range_db);
        }
        if (!o.dump_prefix.empty ())
        {
            RoadStages stages;
            (void)detect_roads (magnitude_raster (res.initial_image, grid), cfg.roads, &stages);
            save_road_stages (o.dump_prefix, stages);
        }
        std::cout << res.report.detections.size () << " detections, " << res.report.roads.size () << " roads";
        if (res.report.fallback_4d)
            std::cout << " (4-D fallback)";
        std::cout << "\n";
        for (const auto &d : res.report.detections)
            std::cout << "  (" << d.position.x << ", " << d.position.y << ") v = (" << d.velocity.x << ", " << d.velocity.y << ") "
                      << db20 (std::abs (d.amplitude)) << " dB" << (d.moving ? " moving" : "") << "\n";
        for (const auto &e : res.report.errors)
            std::cerr << "warning: " << e << "\n";
        return 0;
    }

    int cmd_roads (const Options &o)
    {
        const RangeProfile p = load_profile (o.profile_file);
        const ImagingGrid grid = grid_for (p, o);
        const PipelineConfig cfg;
        RoadStages stages;
        const auto roads = detect_roads (magnitude_raster (static_image (p, grid), grid), cfg.roads, &stages);
        if (!o.dump_prefix.empty ())
            save_road_stages (o.dump_prefix, stages);
        nlohmann::json j = nlohmann::json::array ();
        for (const auto &r : roads)
            j.push_back ({{"rho", r.rho}, {"alpha_deg", r.alpha * 180.0 / std::numbers::pi}, {"support", r.support}, {"width", r.width}});
        if (o.out_file.empty ())
            std::cout << j.dump (2) << "\n";
        else
        {
            std::ofstream os (o.out_file);
            if (!(os << j.dump (2) << "\n"))
                throw IoError ("cannot write " + o.out_file);
        }
        return 0;
    }

    int cmd_bench (const Options &o)
    {
        BenchConfig cfg;
        cfg.sizes = o.sizes;
        cfg.algorithms = o.algorithms;
        cfg.repeats = o.repeats;
        cfg.min_seconds = o.min_seconds;
        cfg.n_c = o.bench_nc;
        const auto records = run_bench (cfg);
        const std::string csv = bench_csv (records);
        if (o.out_file.empty ())
            std::cout << csv;
        else
        {
            std::ofstream os (o.out_file);
            if (!(os << csv))
                throw IoError ("cannot write " + o.out_file);
        }
        for (const auto &[alg, slope] : bench_slopes (records))
            std::cerr << "slope " << alg << " " << slope << "\n";
        return 0;
    }
} // namespace

int main (int argc, char **argv)
{
    CLI::App app{"Backprojection imaging and detection of targets moving along roads"};
    app.require_subcommand (1);
    Options o;
    if (const char *env = std::getenv ("SARMOVER_THREADS"))
        o.threads = std::atoi (env);
    app.add_option ("--threads", o.threads, "worker thread cap, 0 = all cores (env SARMOVER_THREADS)");

    auto *sim = app.add_subcommand ("simulate", "scene file -> range profile file");
    sim->add_option ("scene", o.scene_file, "scene JSON")->required ();
    sim->add_option ("out", o.out_file, "output .sarp file")->required ();

    auto *img = app.add_subcommand ("image", "range profile -> 16-bit dB PGM plus .scale.txt");
    img->add_option ("profile", o.profile_file, "input .sarp file")->required ();
    img->add_option ("out", o.out_file, "output .pgm file")->required ();
    img->add_option ("--mode", o.mode, "static (multilevel) or direct")->check (CLI::IsMember ({"static", "direct"}));
    img->add_option ("--range-db", o.range_db, "displayed dynamic range");
    img->add_option ("--scene", o.scene_file, "take grid extents from this scene");

    auto *det = app.add_subcommand ("detect", "full procedure: report JSON and annotated image");
    det->add_option ("profile", o.profile_file, "input .sarp file")->required ();
    det->add_option ("--report", o.report_file, "report JSON path");
    det->add_option ("--image", o.image_file, "annotated final image (.pgm)");
    det->add_option ("--scene", o.scene_file, "take grid extents (and roads with --known-roads) from this scene");
    det->add_flag ("--known-roads", o.known_roads, "use the scene's roads instead of extracting them");
    det->add_option ("--nc", o.n_c, "initial block size N_c");
    det->add_option ("--level", o.road_level, "road detection level L_d, -1 = L_max");
    det->add_option ("--kappa", o.kappa, "detection threshold mu + kappa sigma");
    det->add_option ("--range-db", o.range_db, "displayed dynamic range");
    det->add_option ("--dump-stages", o.dump_prefix, "write road extraction stages as PGM with this prefix");

    auto *rd = app.add_subcommand ("roads", "extract roads from the static image");
    rd->add_option ("profile", o.profile_file, "input .sarp file")->required ();
    rd->add_option ("--out", o.out_file, "roads JSON path (default stdout)");
    rd->add_option ("--scene", o.scene_file, "take grid extents from this scene");
    rd->add_option ("--dump-stages", o.dump_prefix, "write stages as PGM with this prefix");

    auto *bn = app.add_subcommand ("bench", "time imaging paths over N; CSV to stdout or --out, slopes to stderr");
    bn->add_option ("--sizes", o.sizes, "N values (powers of two)")->delimiter (',');
    bn->add_option ("--algorithms", o.algorithms, "direct, mldd_full4d, adaptive4d, road_based, static2d")->delimiter (',');
    bn->add_option ("--repeats", o.repeats, "timed repeats after one warm-up (at least)");
    bn->add_option ("--min-seconds", o.min_seconds, "repeat short runs until this much time is measured");
    bn->add_option ("--nc", o.bench_nc, "initial block size N_c");
    bn->add_option ("--out", o.out_file, "CSV path");

    try
    {
        app.parse (argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit (e);
        return rc == 0 ? 0 : 2;
    }

    set_thread_limit (o.threads);
    try
    {
        if (*sim)
            return cmd_simulate (o);
        if (*img)
            return cmd_image (o);
        if (*det)
            return cmd_detect (o);
        if (*rd)
            return cmd_roads (o);
        if (*bn)
            return cmd_bench (o);
    }
    catch (const IoError &e)
    {
        std::cerr << "error: " << e.what () << "\n";
        return 2;
    }
    catch (const DomainError &e)
    {
        std::cerr << "error: " << e.what () << "\n";
        return 1;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what () << "\n";
        return 2;
    }
    return 0;
}
