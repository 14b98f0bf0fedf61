#ifndef PANOSWEEP_RASTER_HPP
#define PANOSWEEP_RASTER_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace panosweep {

// Error hierarchy. Each family maps onto one CLI exit code.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 3; }
};

class ConfigError : public Error
{
public:
    using Error::Error;
    int exit_code() const noexcept override { return 1; }
};

class IoError : public Error
{
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

class NumericalError : public Error
{
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

/// Raised for inputs outside an operation's mathematical domain
/// (zero-length vectors, non-positive radii, pole singularities).
class DomainError : public NumericalError
{
public:
    using NumericalError::NumericalError;
};

/// Row-major 2-D raster with value semantics.
template <class T>
class Raster
{
public:
    Raster() = default;
    Raster(int width, int height, const T& fill = T{})
        : width_(width), height_(height)
    {
        if (width < 0 || height < 0)
            throw ConfigError("raster dimensions must be non-negative");
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(int x, int y) { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const { return data_[index(x, y)]; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }

    std::size_t index(int x, int y) const noexcept
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    std::vector<T>& data() noexcept { return data_; }
    const std::vector<T>& data() const noexcept { return data_; }

    bool same_shape(int w, int h) const noexcept { return w == width_ && h == height_; }
    template <class U>
    bool same_shape(const Raster<U>& o) const noexcept { return same_shape(o.width(), o.height()); }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

struct Rgb
{
    float r = 0.f;
    float g = 0.f;
    float b = 0.f;

    friend bool operator==(const Rgb&, const Rgb&) = default;

    float& operator[](int c) { return c == 0 ? r : (c == 1 ? g : b); }
    float operator[](int c) const { return c == 0 ? r : (c == 1 ? g : b); }
    float luminance() const noexcept { return 0.299f * r + 0.587f * g + 0.114f * b; }
};

inline void check_erp_shape(int width, int height)
{
    if (height <= 0 || width != 2 * height)
        throw ConfigError("equirectangular raster must satisfy width == 2 * height (got " +
                          std::to_string(width) + "x" + std::to_string(height) + ")");
}

/// Equirectangular RGB image; width == 2 * height, channels in [0, 1].
class ErpImage
{
public:
    ErpImage() = default;
    ErpImage(int width, int height, Rgb fill = {}) : pixels_(width, height, fill)
    {
        check_erp_shape(width, height);
    }

    int width() const noexcept { return pixels_.width(); }
    int height() const noexcept { return pixels_.height(); }
    Rgb& operator()(int x, int y) { return pixels_(x, y); }
    const Rgb& operator()(int x, int y) const { return pixels_(x, y); }
    Raster<Rgb>& pixels() noexcept { return pixels_; }
    const Raster<Rgb>& pixels() const noexcept { return pixels_; }

    friend bool operator==(const ErpImage&, const ErpImage&) = default;

private:
    Raster<Rgb> pixels_;
};

/// Per-pixel radial depth in meters, a validity mask and the range
/// that valid pixels are guaranteed to respect.
struct DepthMap
{
    Raster<double> depth;
    Raster<std::uint8_t> valid;
    double d_min = 0.2;
    double d_max = 8.0;

    DepthMap() = default;
    DepthMap(int width, int height, double dmin, double dmax)
        : depth(width, height, 0.0), valid(width, height, 0), d_min(dmin), d_max(dmax)
    {
        if (!(dmin > 0.0) || !(dmax > dmin))
            throw ConfigError("depth range requires 0 < d_min < d_max");
    }

    int width() const noexcept { return depth.width(); }
    int height() const noexcept { return depth.height(); }

    bool is_valid(int x, int y) const { return valid(x, y) != 0; }

    /// Stores `d` and marks the pixel valid iff it lies in [d_min, d_max].
    void set(int x, int y, double d)
    {
        depth(x, y) = d;
        valid(x, y) = (std::isfinite(d) && d >= d_min && d <= d_max) ? 1 : 0;
    }

    void invalidate(int x, int y)
    {
        depth(x, y) = 0.0;
        valid(x, y) = 0;
    }

    std::size_t valid_count() const
    {
        return static_cast<std::size_t>(std::count(valid.data().begin(), valid.data().end(), std::uint8_t{1}));
    }
};

inline int wrap_index(int i, int n) noexcept
{
    const int m = i % n;
    return m < 0 ? m + n : m;
}

inline double wrap_coord(double x, double period) noexcept
{
    double m = std::fmod(x, period);
    if (m < 0.0)
        m += period;
    return m >= period ? 0.0 : m;
}

/// Runs fn(row) for every row in [0, rows). Rows are split into contiguous
/// blocks, one per worker; each row is processed exactly once, so writes to
/// disjoint row storage are race-free and the result is thread-count
/// independent.
template <class Fn>
void parallel_rows(int rows, int threads, Fn&& fn)
{
    const int workers = std::clamp(threads, 1, std::max(1, rows));
    if (workers == 1) {
        for (int y = 0; y < rows; ++y)
            fn(y);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(workers));
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        const int begin = rows * w / workers;
        const int end = rows * (w + 1) / workers;
        pool.emplace_back([begin, end, &fn, &failure = failures[static_cast<std::size_t>(w)]] {
            try {
                for (int y = begin; y < end; ++y)
                    fn(y);
            } catch (...) {
                failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto& f : failures)
        if (f)
            std::rethrow_exception(f);
}

} // namespace panosweep

#endif // PANOSWEEP_RASTER_HPP
