#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "fracurv/raster.hpp"

namespace fracurv {

/// Counts of the 16 2x2 neighbourhood configurations over the image padded by one
/// background ring. Index bit order: 1 = top-left, 2 = top-right, 4 = bottom-left,
/// 8 = bottom-right.
using ConfigurationHistogram = std::array<std::int64_t, 16>;

ConfigurationHistogram configuration_histogram(const BinaryImage& img);

/// Per-configuration weights for half the boundary length.
///
///   single pixel (1 set)        1/2
///   edge (2 set, side by side)  1/2
///   diagonal pair (2 set)       1
///   three set                   (pi/8 - sqrt(2)/4) / (1 - sqrt(2)/2)
///   empty / full                0
///
/// A w x h pixel rectangle measures exactly w + h. The three-set weight makes the
/// orientation average of a straight digital edge equal 1/2 per unit length, so
/// digitised disks converge to pi r.
std::array<double, 16> boundary_weights();

std::int64_t area(const BinaryImage& img);
double boundary_length(const BinaryImage& img);
/// Foreground 8-connected, background 4-connected.
std::int64_t euler_number(const BinaryImage& img);

struct ComponentsAndHoles {
    std::int64_t components = 0;
    std::int64_t holes = 0;
};

ComponentsAndHoles components_and_holes(const BinaryImage& img);
std::int64_t c0_var_estimate(const BinaryImage& img);

struct FunctionalSample {
    double r = 0.0;
    double x = 0.0;  // -log r
    double c2 = 0.0;
    double c1 = 0.0;
    std::int64_t c0 = 0;
    std::int64_t n_components = 0;
    std::int64_t n_holes = 0;
    std::int64_t c0var = 0;
    /// y[k] = log(C_k^var / r^k) with C_0^var = c0var, C_1^var = c1, C_2^var = c2;
    /// empty where the measured value is not positive.
    std::array<std::optional<double>, 3> y;

    /// Signed total curvature C_k: Euler number, half boundary, area.
    double curvature(int k) const;
};

/// Fills x and y from r and the measured functionals.
FunctionalSample make_sample(double r, double c2, double c1, std::int64_t c0, std::int64_t n_components,
                             std::int64_t n_holes);

FunctionalSample measure_sample(const BinaryImage& dilated, double r);

struct FunctionalProfile {
    std::vector<FunctionalSample> samples;
    bool truncated_by_break = false;
};

struct ProfileOptions {
    bool brk = true;
    unsigned threads = 1;
};

/// Dilates at each radius in increasing order and measures all functionals. With
/// brk set, stops after the first sample with N + Q <= 2 (that sample is kept).
FunctionalProfile measure_profile(const DistanceField& field, std::span<const double> radii,
                                  const ProfileOptions& opts = {});
FunctionalProfile measure_profile(const DistanceField& field, const RadiusSchedule& schedule, bool brk);

/// Header `r,x,c2,c1,c0,N,Q,c0var,y2,y1,y0`, 12 significant digits, empty cells for undefined y.
void write_profile_csv(std::ostream& out, const FunctionalProfile& profile);
/// Re-derives x and y from the measured columns.
FunctionalProfile read_profile_csv(std::istream& in);

}  // namespace fracurv
