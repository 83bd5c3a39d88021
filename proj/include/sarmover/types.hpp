#pragma once
/**
 * @file   types.hpp
 * @brief  Small value types shared by every module: vectors, complex
 *         samples, dense 2-D/4-D arrays and the error hierarchy.
 */

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sarmover
{
    using cplx = std::complex<double>;

    // -------------------------------------------------------------------------
    // Errors
    // -------------------------------------------------------------------------

    /// Violated precondition or infeasible request (CLI exit code 1).
    class DomainError : public std::runtime_error
    {
      public:
        using std::runtime_error::runtime_error;
    };

    /// File, parse or format problem (CLI exit code 2).
    class IoError : public std::runtime_error
    {
      public:
        using std::runtime_error::runtime_error;
    };

    class DegenerateAngle : public DomainError
    {
      public:
        using DomainError::DomainError;
    };

    class OutputTooLarge : public DomainError
    {
      public:
        using DomainError::DomainError;
    };

    // -------------------------------------------------------------------------
    // Vectors
    // -------------------------------------------------------------------------

    struct Vec2
    {
        double x = 0.0;
        double y = 0.0;

        constexpr Vec2 operator+ (const Vec2 &o) const noexcept { return {x + o.x, y + o.y}; }
        constexpr Vec2 operator- (const Vec2 &o) const noexcept { return {x - o.x, y - o.y}; }
        constexpr Vec2 operator* (double s) const noexcept { return {x * s, y * s}; }
        constexpr bool operator== (const Vec2 &) const noexcept = default;

        [[nodiscard]] double norm () const noexcept { return std::hypot (x, y); }
    };

    struct Vec3
    {
        double x = 0.0;
        double y = 0.0;
        double z = 0.0;

        constexpr Vec3 operator+ (const Vec3 &o) const noexcept { return {x + o.x, y + o.y, z + o.z}; }
        constexpr Vec3 operator- (const Vec3 &o) const noexcept { return {x - o.x, y - o.y, z - o.z}; }
        constexpr Vec3 operator* (double s) const noexcept { return {x * s, y * s, z * s}; }
        constexpr bool operator== (const Vec3 &) const noexcept = default;

        [[nodiscard]] constexpr double norm2 () const noexcept { return x * x + y * y + z * z; }
        [[nodiscard]] double norm () const noexcept { return std::sqrt (norm2 ()); }
    };

    /// Lift a ground-plane point to z = 0.
    [[nodiscard]] constexpr Vec3 on_ground (const Vec2 &p) noexcept { return {p.x, p.y, 0.0}; }

    // -------------------------------------------------------------------------
    // Dense arrays
    // -------------------------------------------------------------------------

    /// Row-major 2-D array.
    template <typename T> class Array2
    {
      public:
        Array2 () = default;
        Array2 (int rows, int cols, T fill = T{})
            : rows_ (rows), cols_ (cols), data_ (static_cast<std::size_t> (rows) * static_cast<std::size_t> (cols), fill)
        {
        }

        [[nodiscard]] int rows () const noexcept { return rows_; }
        [[nodiscard]] int cols () const noexcept { return cols_; }
        [[nodiscard]] std::size_t size () const noexcept { return data_.size (); }
        [[nodiscard]] bool empty () const noexcept { return data_.empty (); }

        T &operator() (int r, int c) noexcept { return data_[index (r, c)]; }
        const T &operator() (int r, int c) const noexcept { return data_[index (r, c)]; }

        [[nodiscard]] std::vector<T> &data () noexcept { return data_; }
        [[nodiscard]] const std::vector<T> &data () const noexcept { return data_; }

        [[nodiscard]] bool same_shape (const Array2 &o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }
        bool operator== (const Array2 &) const = default;

      private:
        [[nodiscard]] std::size_t index (int r, int c) const noexcept
        {
            return static_cast<std::size_t> (r) * static_cast<std::size_t> (cols_) + static_cast<std::size_t> (c);
        }

        int rows_ = 0;
        int cols_ = 0;
        std::vector<T> data_;
    };

    using Shape4 = std::array<int, 4>;

    [[nodiscard]] inline std::size_t shape_volume (const Shape4 &s) noexcept
    {
        std::size_t v = 1;
        for (int n : s)
            v *= static_cast<std::size_t> (n);
        return v;
    }

    /// Row-major 4-D array; axis order is (x, y, vx, vy) throughout the library.
    template <typename T> class Array4
    {
      public:
        Array4 () = default;
        explicit Array4 (const Shape4 &shape, T fill = T{}) : shape_ (shape), data_ (shape_volume (shape), fill) {}

        [[nodiscard]] const Shape4 &shape () const noexcept { return shape_; }
        [[nodiscard]] int extent (int axis) const noexcept { return shape_[static_cast<std::size_t> (axis)]; }
        [[nodiscard]] std::size_t size () const noexcept { return data_.size (); }

        [[nodiscard]] std::size_t linear (int a, int b, int c, int d) const noexcept
        {
            return ((static_cast<std::size_t> (a) * shape_[1] + static_cast<std::size_t> (b)) * shape_[2] + static_cast<std::size_t> (c)) * shape_[3] +
                   static_cast<std::size_t> (d);
        }

        [[nodiscard]] Shape4 unravel (std::size_t idx) const noexcept
        {
            Shape4 out{};
            for (int ax = 3; ax >= 0; --ax)
            {
                const auto n = static_cast<std::size_t> (shape_[static_cast<std::size_t> (ax)]);
                out[static_cast<std::size_t> (ax)] = static_cast<int> (idx % n);
                idx /= n;
            }
            return out;
        }

        T &operator() (int a, int b, int c, int d) noexcept { return data_[linear (a, b, c, d)]; }
        const T &operator() (int a, int b, int c, int d) const noexcept { return data_[linear (a, b, c, d)]; }
        T &operator[] (std::size_t i) noexcept { return data_[i]; }
        const T &operator[] (std::size_t i) const noexcept { return data_[i]; }

        [[nodiscard]] std::vector<T> &data () noexcept { return data_; }
        [[nodiscard]] const std::vector<T> &data () const noexcept { return data_; }

      private:
        Shape4 shape_{1, 1, 1, 1};
        std::vector<T> data_ = std::vector<T> (1);
    };

    // -------------------------------------------------------------------------
    // Misc helpers
    // -------------------------------------------------------------------------

    [[nodiscard]] constexpr bool is_power_of_two (long long n) noexcept { return n > 0 && (n & (n - 1)) == 0; }

    [[nodiscard]] constexpr int ilog2 (long long n) noexcept
    {
        int l = 0;
        while (n > 1)
        {
            n >>= 1;
            ++l;
        }
        return l;
    }

    [[nodiscard]] inline double db10 (double power_ratio) { return 10.0 * std::log10 (power_ratio); }
    [[nodiscard]] inline double db20 (double amplitude_ratio) { return 20.0 * std::log10 (amplitude_ratio); }

    /// splitmix64 finalizer; counter-based so parallel generation is order-free.
    [[nodiscard]] constexpr std::uint64_t mix64 (std::uint64_t z) noexcept
    {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) derived from (seed, counter).
    [[nodiscard]] constexpr double counter_uniform (std::uint64_t seed, std::uint64_t counter) noexcept
    {
        return static_cast<double> (mix64 (mix64 (seed) ^ counter) >> 11) * 0x1.0p-53;
    }

} // namespace sarmover
