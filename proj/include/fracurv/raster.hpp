#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace fracurv {

/// Foreground/background raster on the unit-spaced pixel lattice. Row-major, one
/// byte per pixel (0 or 1). Pixel (x, y) has its centre at integer coordinates.
class BinaryImage {
public:
    BinaryImage() = default;
    BinaryImage(int width, int height);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return bits_.size(); }

    bool get(int x, int y) const { return bits_[index(x, y)] != 0; }
    void set(int x, int y, bool v = true) { bits_[index(x, y)] = v ? 1 : 0; }

    std::span<const std::uint8_t> row(int y) const {
        return {bits_.data() + static_cast<std::size_t>(y) * width_, static_cast<std::size_t>(width_)};
    }
    std::span<const std::uint8_t> data() const noexcept { return bits_; }
    std::span<std::uint8_t> data() noexcept { return bits_; }

    std::size_t foreground_count() const;

    friend bool operator==(const BinaryImage&, const BinaryImage&) = default;

private:
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> bits_;
};

/// Squared Euclidean distance (in pixel widths squared) from every pixel centre
/// to the nearest foreground pixel centre.
class DistanceField {
public:
    DistanceField(int width, int height, std::vector<std::int64_t> d2);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::int64_t at(int x, int y) const { return d2_[static_cast<std::size_t>(y) * width_ + x]; }
    std::span<const std::int64_t> data() const noexcept { return d2_; }

private:
    int width_;
    int height_;
    std::vector<std::int64_t> d2_;
};

// PBM: P1 (ASCII) and P4 (packed). 1 is black and black is foreground.
BinaryImage read_pbm(std::istream& in);
BinaryImage load_pbm(const std::filesystem::path& path);
void write_pbm(std::ostream& out, const BinaryImage& img, bool ascii = false);
void save_pbm(const BinaryImage& img, const std::filesystem::path& path, bool ascii = false);

/// Exact squared EDT (separable lower-envelope algorithm in integer arithmetic).
/// Throws EmptyForeground for an image without foreground pixels.
DistanceField distance_transform(const BinaryImage& img);

/// Integer threshold used by dilate: floor(r^2 + 1e-9).
std::int64_t squared_radius_threshold(double r);

/// Parallel set {p : d2(p) <= r^2}.
BinaryImage dilate(const DistanceField& field, double r);

/// Number of lattice points p with |p| <= r.
std::int64_t discrete_disk_area(double r);

struct OptimalRadius {
    double r;
    std::int64_t area;
};

/// Every zero of D(r) = discrete_disk_area(r) - pi r^2 with r <= r_max.
std::vector<OptimalRadius> optimal_area_radii(double r_max);

/// Zeros of D(r) lying at least `margin` away from every discontinuity of the
/// discrete area. With the default margin this is the commonly tabulated list
/// 0.5642, 1.262, 1.696, 2.585, ...
std::vector<OptimalRadius> stable_optimal_area_radii(double r_max, double margin = 0.05);

/// Optimal-area radii thinned to multiplicative spacing of about 1.5 starting at 0.5642.
std::vector<double> quick_radii(double r_max);

enum class RadiusPolicy { QuickOptimalArea, Geometric };

struct RadiusSchedule {
    std::vector<double> radii;
    RadiusPolicy policy = RadiusPolicy::Geometric;
    double r_min = 0.0;
    double step = 0.0;
    double r_max = 0.0;
};

inline constexpr double kDefaultRMin = 1.2616;
inline constexpr double kDefaultStep = 1.05;

/// max(0.06 * min(w, h), 20)
double default_r_max(int width, int height);

/// Geometric radii r_min * step^j <= r_max. Throws InvalidInput when step <= 1.
RadiusSchedule default_radii(int width, int height, double r_min = kDefaultRMin, double step = kDefaultStep,
                             std::optional<double> r_max_override = std::nullopt);

RadiusSchedule quick_schedule(int width, int height, std::optional<double> r_max_override = std::nullopt);

void write_radii_csv(std::ostream& out, std::span<const double> radii);

}  // namespace fracurv
