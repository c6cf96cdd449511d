#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fracurv/raster.hpp"

namespace fracurv {

/// Contracting similarity of the plane: p -> ratio * R(rotation) * F * p + translation,
/// where F is the reflection about the x-axis when `reflected` is set.
struct Similarity {
    double ratio = 0.5;
    double rotation = 0.0;  // radians
    bool reflected = false;
    Eigen::Vector2d translation = Eigen::Vector2d::Zero();

    Eigen::Matrix2d linear() const;
    Eigen::Vector2d fixed_point() const;
};

Eigen::Vector2d apply(const Similarity& map, const Eigen::Vector2d& p);

class IteratedFunctionSystem {
public:
    /// Throws InvalidInput unless there are at least two maps, all with ratio in (0,1).
    explicit IteratedFunctionSystem(std::vector<Similarity> maps, std::string name = {});

    const std::vector<Similarity>& maps() const noexcept { return maps_; }
    const std::string& name() const noexcept { return name_; }
    std::size_t size() const noexcept { return maps_.size(); }
    std::vector<double> ratios() const;

private:
    std::vector<Similarity> maps_;
    std::string name_;
};

/// Solves sum r_i^s = 1 by bisection. A single ratio yields s = 0.
double similarity_dimension(std::span<const double> ratios);

struct ArithmeticClass {
    bool arithmetic = false;
    double h = 0.0;  // lattice spacing of the log-ratios, valid when arithmetic
};

/// Real GCD of {-log r_i}; NonArithmetic when the Euclid iteration falls below
/// 1e-6 * max|log r_i| before terminating.
ArithmeticClass arithmetic_class(std::span<const double> ratios, double tol = 1e-9);

std::string to_string(const ArithmeticClass& c);

enum class SampleSetId {
    SierpinskiGasket,
    SierpinskiCarpet,
    SierpinskiTree,
    CantorDust,
    KochCurve,
    ModifiedCarpet,
    Tripet,
    TriangleDelta,
    ShearedGasket,
};

/// Every catalog set is scaled so that its reference edge (base, hypotenuse) has length 1.
IteratedFunctionSystem catalog(SampleSetId id);

std::span<const SampleSetId> all_sample_sets();
std::string_view sample_set_name(SampleSetId id);
std::optional<SampleSetId> parse_sample_set(std::string_view name);

/// Plain-text IFS format: one map per line, `ratio rotation_deg reflect tx ty`.
/// Blank lines and lines starting with '#' are ignored.
IteratedFunctionSystem read_ifs(std::istream& in, std::string name = {});
void write_ifs(std::ostream& out, const IteratedFunctionSystem& ifs);

struct ChaosGameOptions {
    int width = 512;
    int height = 512;
    std::uint64_t seed = 1;
    std::size_t burn_in = 100;
    std::size_t n_points = 0;  // 0 selects default_point_count
};

struct Framing {
    double scale = 1.0;  // pixels per model unit
    double x_min = 0.0;
    double y_max = 0.0;
    double offset_x = 1.0;  // pixel coordinate of x_min
    double offset_y = 1.0;  // pixel coordinate of y_max
};

struct ChaosGameResult {
    BinaryImage image;
    Framing framing;
    std::size_t n_points = 0;
    double dimension = 0.0;
};

inline constexpr std::string_view kChaosGameRng = "mt19937_64";

/// 50 * (width*height)^(s/2), capped at 1e8.
std::size_t default_point_count(int width, int height, double s);

/// Fits the attractor's bounding box into the image with a one pixel margin.
Framing fit_framing(const IteratedFunctionSystem& ifs, int width, int height);

/// Random iteration with map probabilities r_i^s, starting at the fixed point of map 0.
ChaosGameResult chaos_game(const IteratedFunctionSystem& ifs, const ChaosGameOptions& opts);

}  // namespace fracurv
