#pragma once
/**
 * @file   io.hpp
 * @brief  Image export (binary PGM), dB quantization with a sidecar scale,
 *         and report files.
 */

#include <sarmover/image.hpp>
#include <sarmover/pipeline.hpp>
#include <sarmover/scene.hpp>
#include <sarmover/types.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace sarmover
{
    using Image16 = Array2<std::uint16_t>;

    /// Magnitude raster mapped to 16 bits: peak -> 65535, peak - range -> 0.
    struct DbImage
    {
        Image16 pixels;
        double peak_db = 0.0;  ///< dB value of 65535; meaningless when the input is all zero
        double range_db = 40.0;
        bool empty = true;     ///< input had no positive pixel

        [[nodiscard]] double floor_db () const noexcept { return peak_db - range_db; }
        [[nodiscard]] double to_db (std::uint16_t v) const noexcept { return floor_db () + range_db * v / 65535.0; }
    };

    [[nodiscard]] inline DbImage quantize_db (const GrayImage &magnitude, double range_db = 40.0)
    {
        if (!(range_db > 0.0))
            throw DomainError ("dynamic range must be positive");
        DbImage out;
        out.range_db = range_db;
        out.pixels = Image16 (magnitude.rows (), magnitude.cols ());
        double peak = 0.0;
        for (double v : magnitude.pixels.data ())
            peak = std::max (peak, v);
        if (!(peak > 0.0))
            return out;
        out.empty = false;
        out.peak_db = db20 (peak);
        for (std::size_t k = 0; k < out.pixels.size (); ++k)
        {
            const double v = magnitude.pixels.data ()[k];
            if (!(v > 0.0))
                continue;
            const double t = std::clamp ((db20 (v) - out.floor_db ()) / range_db, 0.0, 1.0);
            out.pixels.data ()[k] = static_cast<std::uint16_t> (std::lround (t * 65535.0));
        }
        return out;
    }

    /// Burn a binary overlay into a 16-bit image at full white.
    inline void burn_overlay (Image16 &img, const BinaryImage &overlay)
    {
        if (img.rows () != overlay.rows () || img.cols () != overlay.cols ())
            throw DomainError ("overlay size differs from image");
        for (std::size_t k = 0; k < img.size (); ++k)
            if (overlay.pixels.data ()[k])
                img.data ()[k] = 65535;
    }

    // -------------------------------------------------------------------------
    // PGM
    // -------------------------------------------------------------------------

    inline void write_pgm (std::ostream &os, const Image16 &img)
    {
        os << "P5\n" << img.cols () << ' ' << img.rows () << "\n65535\n";
        for (std::uint16_t v : img.data ())
        {
            const char be[2] = {static_cast<char> (v >> 8), static_cast<char> (v & 0xFF)};
            os.write (be, 2);
        }
        if (!os)
            throw IoError ("pgm: write failed");
    }

    /// 8-bit PGM; nonzero pixels become 255.
    inline void write_pgm (std::ostream &os, const BinaryImage &img)
    {
        os << "P5\n" << img.cols () << ' ' << img.rows () << "\n255\n";
        for (std::uint8_t v : img.pixels.data ())
            os.put (static_cast<char> (v ? 255 : 0));
        if (!os)
            throw IoError ("pgm: write failed");
    }

    /// 8-bit PGM of a gray image scaled so its range spans 0..255.
    inline void write_pgm (std::ostream &os, const GrayImage &img)
    {
        double lo = std::numeric_limits<double>::infinity ();
        double hi = -lo;
        for (double v : img.pixels.data ())
        {
            lo = std::min (lo, v);
            hi = std::max (hi, v);
        }
        const double span = hi > lo ? hi - lo : 1.0;
        os << "P5\n" << img.cols () << ' ' << img.rows () << "\n255\n";
        for (double v : img.pixels.data ())
            os.put (static_cast<char> (std::lround ((v - lo) / span * 255.0)));
        if (!os)
            throw IoError ("pgm: write failed");
    }

    /// Reads binary PGM with maxval up to 65535.
    [[nodiscard]] inline Image16 read_pgm (std::istream &is, int *maxval_out = nullptr)
    {
        const auto token = [&] {
            std::string t;
            char c;
            while (is.get (c))
            {
                if (c == '#')
                {
                    std::string skip;
                    std::getline (is, skip);
                    continue;
                }
                if (std::isspace (static_cast<unsigned char> (c)))
                {
                    if (!t.empty ())
                        break;
                    continue;
                }
                t.push_back (c);
            }
            return t;
        };
        if (token () != "P5")
            throw IoError ("pgm: expected P5 header");
        int w = 0, h = 0, maxval = 0;
        try
        {
            w = std::stoi (token ());
            h = std::stoi (token ());
            maxval = std::stoi (token ());
        }
        catch (const std::exception &)
        {
            throw IoError ("pgm: malformed header");
        }
        if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
            throw IoError ("pgm: invalid header values");
        Image16 img (h, w);
        for (auto &v : img.data ())
        {
            if (maxval < 256)
            {
                char c;
                if (!is.get (c))
                    throw IoError ("pgm: truncated data");
                v = static_cast<unsigned char> (c);
            }
            else
            {
                char be[2];
                if (!is.read (be, 2))
                    throw IoError ("pgm: truncated data");
                v = static_cast<std::uint16_t> ((static_cast<unsigned char> (be[0]) << 8) | static_cast<unsigned char> (be[1]));
            }
        }
        if (maxval_out)
            *maxval_out = maxval;
        return img;
    }

    /// Sidecar text describing the dB scale of a quantized image.
    [[nodiscard]] inline std::string scale_text (const DbImage &img, const ImageGeometry &geom)
    {
        std::ostringstream os;
        os << std::setprecision (17);
        os << "# value_db = floor_db + range_db * pixel / 65535\n";
        os << "empty " << (img.empty ? 1 : 0) << '\n';
        os << "peak_db " << img.peak_db << '\n';
        os << "floor_db " << img.floor_db () << '\n';
        os << "range_db " << img.range_db << '\n';
        os << "pitch_m " << geom.pitch << '\n';
        os << "origin_x_m " << geom.origin.x << '\n';
        os << "origin_y_m " << geom.origin.y << '\n';
        return os.str ();
    }

    namespace detail
    {
        inline std::ofstream open_out (const std::string &path)
        {
            std::ofstream os (path, std::ios::binary);
            if (!os)
                throw IoError ("cannot open " + path + " for writing");
            return os;
        }
    } // namespace detail

    template <typename Img> void save_pgm (const std::string &path, const Img &img)
    {
        auto os = detail::open_out (path);
        write_pgm (os, img);
    }

    /// Writes `path` and `path + ".scale.txt"`.
    inline void save_db_image (const std::string &path, const GrayImage &magnitude, double range_db = 40.0, const BinaryImage *overlay = nullptr)
    {
        DbImage q = quantize_db (magnitude, range_db);
        if (overlay)
            burn_overlay (q.pixels, *overlay);
        save_pgm (path, q.pixels);
        auto os = detail::open_out (path + ".scale.txt");
        os << scale_text (q, magnitude.geometry);
    }

    inline void save_road_stages (const std::string &prefix, const RoadStages &s)
    {
        save_pgm (prefix + "gray.pgm", s.gray);
        save_pgm (prefix + "edges.pgm", s.edges);
        save_pgm (prefix + "dilated.pgm", s.dilated);
        save_pgm (prefix + "filtered.pgm", s.filtered);
        GrayImage votes (s.hough.votes.rows (), s.hough.votes.cols ());
        for (std::size_t k = 0; k < votes.pixels.size (); ++k)
            votes.pixels.data ()[k] = s.hough.votes.data ()[k];
        save_pgm (prefix + "hough.pgm", votes);
    }

    [[nodiscard]] inline Scenario load_scene_file (const std::string &path)
    {
        std::ifstream is (path);
        if (!is)
            throw IoError ("cannot open " + path);
        std::ostringstream text;
        text << is.rdbuf ();
        return load_scene (text.str ());
    }

    /// Range profile of a scenario, noise included.
    [[nodiscard]] inline RangeProfile simulate (const Scenario &s, const AntennaPattern &pattern = {})
    {
        RangeProfile p = simulate (s.scene, s.grid, s.radar, pattern);
        if (s.noise)
            add_noise (p, s.noise->power, s.noise->seed);
        return p;
    }

    // -------------------------------------------------------------------------
    // Reports
    // -------------------------------------------------------------------------

    inline void save_report (const std::string &path, const Report &r)
    {
        auto os = detail::open_out (path);
        os << to_json (r).dump (2) << '\n';
        if (!os)
            throw IoError ("report: write failed");
    }

    [[nodiscard]] inline Report load_report (const std::string &path)
    {
        std::ifstream is (path);
        if (!is)
            throw IoError ("cannot open " + path);
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse (is);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw IoError (std::string ("report: ") + e.what ());
        }
        return report_from_json (j);
    }

} // namespace sarmover
