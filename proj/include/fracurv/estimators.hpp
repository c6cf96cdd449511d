#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fracurv/minkowski.hpp"
#include "fracurv/raster.hpp"

namespace fracurv {

// ---------------------------------------------------------------------------
// Box counting

/// Integer grid offsets used by box_count: the first n points of the Halton(2,3)
/// sequence scaled to [0, delta)^2, duplicates dropped. Nested in n.
std::vector<std::array<int, 2>> box_offsets(int delta, int n_shifts);

/// Minimum over grid offsets of the number of delta-boxes meeting the foreground.
std::int64_t box_count(const BinaryImage& img, int delta, int n_shifts = 1);

struct BoxDimensionOptions {
    int delta_min = 1;
    int delta_max = 0;  // 0: a quarter of the image diameter
    double factor = 1.4;
    int n_shifts = 4;
};

struct BoxDimensionResult {
    double dimension = 0.0;
    std::vector<int> deltas;
    std::vector<std::int64_t> counts;
};

BoxDimensionResult box_dimension(const BinaryImage& img, const BoxDimensionOptions& opts = {});

// ---------------------------------------------------------------------------
// Least squares

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Ordinary least squares y = intercept + slope * x. Throws on constant x or m < 2.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// 2 - slope of log c2 against log r.
double sausage_dimension(const FunctionalProfile& profile);

// ---------------------------------------------------------------------------
// Joint regression on y_k = D_k + s x

struct UseFlags {
    bool euler = false;
    bool boundary = true;
    bool area = true;

    bool uses(int k) const { return k == 0 ? euler : k == 1 ? boundary : area; }
    int count() const { return int(euler) + int(boundary) + int(area); }
};

inline constexpr UseFlags kAreaOnly{false, false, true};
inline constexpr UseFlags kBoundaryOnly{false, true, false};
inline constexpr UseFlags kEulerOnly{true, false, false};
inline constexpr UseFlags kJoint2{false, true, true};
inline constexpr UseFlags kJoint3{true, true, true};

struct RegressionResult {
    double s_hat = 0.0;
    std::array<std::optional<double>, 3> d_hat;  // indexed by k
    UseFlags used;
    double residual = 0.0;  // mean squared error over all used points
    std::size_t m = 0;      // number of (k, j) points used
};

/// One dataset of the joint model: pairs (x_j, Y_kj).
struct RegressionData {
    std::vector<double> x;
    std::vector<double> y;
};

/// Shared slope, one intercept per dataset; closed form
///   s = sum_k sum_j (x_kj - xbar_k) Y_kj / sum_k sum_j (x_kj - xbar_k)^2,
///   D_k = Ybar_k - xbar_k s,
/// which on a complete panel is the familiar m(d+1)(mean(x^2) - mean(x)^2) denominator.
/// Empty datasets are skipped (their D stays undefined).
RegressionResult joint_regression(const std::array<RegressionData, 3>& data, UseFlags use);

/// Uses y_k from the profile; samples with undefined y_k are dropped for that k only.
RegressionResult joint_regression(const FunctionalProfile& profile, UseFlags use);

// ---------------------------------------------------------------------------
// Averaged fractal curvatures

struct CurvatureEstimates {
    std::array<double, 3> gamma{};  // pixel^s units at pixel scale
    std::optional<double> xi0;
    std::optional<double> xi1;
    double s_used = 0.0;
};

/// Histogram-weighted average of sgn(C_k) exp(log|C_k| + k x_j - s x_j), with cell
/// edges at the midpoints between successive x_j and half the median step at the ends.
CurvatureEstimates gamma_estimates(const FunctionalProfile& profile, double s_hat);

/// Same estimator over raw (x_j, C_k(x_j)) samples for one k.
double gamma_estimate(std::span<const double> x, std::span<const double> curvature, int k, double s);

// ---------------------------------------------------------------------------
// Local dimension (nearest-neighbour statistics)

struct LocalDimOptions {
    std::size_t m_test = 1050;
    std::size_t n_sample = 0;  // 0: 80% of the foreground pixel count
    double a = 1.0;
    double b = 2.0;
    std::uint64_t seed = 1;
    double bin_width = 0.0025;
};

struct LocalDimReport {
    std::vector<double> estimates;  // one per test point; +inf when undefined
    std::vector<double> bin_edges;
    std::vector<std::int64_t> counts;
    double mean = 0.0;
    double mode_bin = 0.0;  // left edge of the fullest bin
    std::size_t n_sample = 0;
    bool saturated = false;  // n_sample > 10 * foreground
};

LocalDimReport local_dimension(const BinaryImage& img, const LocalDimOptions& opts = {});

// ---------------------------------------------------------------------------
// Gliding-box lacunarity

struct LacunarityPoint {
    int r;
    double lambda;
};

std::vector<LacunarityPoint> gliding_box_lacunarity(const BinaryImage& img, std::span<const int> box_sizes);

// ---------------------------------------------------------------------------
// Output

struct EstimateRow {
    std::string estimator;
    double value;
    std::string aux;
};

void write_estimates_csv(std::ostream& out, std::span<const EstimateRow> rows);
void write_histogram_csv(std::ostream& out, const LocalDimReport& report);
/// Whitespace separated `x y0 y1 y2`, '#' header, "nan" for undefined cells.
void write_yk_plot(std::ostream& out, const FunctionalProfile& profile);

}  // namespace fracurv
