#pragma once
/**
 * @file   image.hpp
 * @brief  Raster images with world geometry.
 *
 * Rasters are stored row-major with row 0 at the top (largest world y).
 * Pixel (row, col) has world centre (origin.x + col * pitch, origin.y - row * pitch).
 */

#include <sarmover/geometry.hpp>
#include <sarmover/types.hpp>

#include <cstdint>

namespace sarmover
{
    struct ImageGeometry
    {
        double pitch = 1.0; ///< metres per pixel
        Vec2 origin{};      ///< world centre of pixel (0, 0)

        [[nodiscard]] Vec2 world (double row, double col) const noexcept { return {origin.x + col * pitch, origin.y - row * pitch}; }
        [[nodiscard]] Vec2 pixel (const Vec2 &w) const noexcept
        {
            return {(origin.y - w.y) / pitch, (w.x - origin.x) / pitch}; // (row, col)
        }
    };

    template <typename T> struct Raster
    {
        Array2<T> pixels;
        ImageGeometry geometry;

        Raster () = default;
        Raster (int rows, int cols, ImageGeometry geom = {}, T fill = T{}) : pixels (rows, cols, fill), geometry (geom) {}

        [[nodiscard]] int rows () const noexcept { return pixels.rows (); }
        [[nodiscard]] int cols () const noexcept { return pixels.cols (); }
        T &operator() (int r, int c) noexcept { return pixels (r, c); }
        const T &operator() (int r, int c) const noexcept { return pixels (r, c); }
        [[nodiscard]] bool same_shape (const Raster &o) const noexcept { return pixels.same_shape (o.pixels); }
    };

    using GrayImage = Raster<double>;
    using BinaryImage = Raster<std::uint8_t>;

    /// Geometry of a raster that shows the spatial grid with one pixel per cell.
    [[nodiscard]] inline ImageGeometry raster_geometry (const ImagingGrid &grid) noexcept
    {
        return {grid.dx (), {grid.x (0), grid.y (grid.points_per_dim - 1)}};
    }

    /// Raster row/col of spatial grid cell (jx, jy).
    [[nodiscard]] constexpr int raster_row (int jy, int n) noexcept { return n - 1 - jy; }

    /// Convert an (x, y)-indexed array to a raster in display orientation.
    template <typename T> [[nodiscard]] Raster<T> to_raster (const Array2<T> &xy, const ImageGeometry &geom)
    {
        const int nx = xy.rows ();
        const int ny = xy.cols ();
        Raster<T> out (ny, nx, geom);
        for (int jx = 0; jx < nx; ++jx)
            for (int jy = 0; jy < ny; ++jy)
                out (raster_row (jy, ny), jx) = xy (jx, jy);
        return out;
    }

} // namespace sarmover
