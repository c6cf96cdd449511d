#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include "fracurv/ifs.hpp"

namespace fracurv {

/// Piecewise polynomial on (0, 1]. Piece i lives on (breakpoints[i], breakpoints[i+1]]
/// and holds coefficients c0 + c1 e + c2 e^2.
class PiecewisePoly {
public:
    using Coefficients = std::array<double, 3>;

    PiecewisePoly(std::vector<double> breakpoints, std::vector<Coefficients> pieces);

    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    const std::vector<Coefficients>& pieces() const noexcept { return pieces_; }

    double operator()(double eps) const;

private:
    std::vector<double> breakpoints_;
    std::vector<Coefficients> pieces_;
};

/// Average-curvature normaliser -sum r_i^s log r_i. Throws when sum r_i^s != 1 (1e-9).
double eta(std::span<const double> ratios, double s);

/// (1/eta) int_0^1 e^(s-k-1) R_k(e) de, integrated monomial by monomial.
/// Throws Divergence if a nonzero coefficient on the first piece has exponent <= -1.
double curvature_integral(const PiecewisePoly& rk, double s, int k, double eta);

struct TriangleScaling {
    std::array<PiecewisePoly, 3> r;  // R_0, R_1, R_2
    double s;
    std::array<double, 3> ratios;
};

/// Curvature scaling functions of the non-arithmetic right triangle with legs
/// 0.6, 0.8 and unit hypotenuse (breakpoints 4/41, 16/41, 20/41, 25/41).
TriangleScaling scaling_functions_triangle();

struct TheoreticalCurvatures {
    double s = 0.0;
    double eta = 0.0;
    std::array<double, 3> x{};
};

TheoreticalCurvatures curvatures_from_scaling(std::span<const PiecewisePoly> rk, std::span<const double> ratios);

/// c * lambda^s
double rescale_curvature(double c, double lambda, double s);

enum class CurvatureFixture { Gasket, Carpet, ModifiedCarpet, Triangle, Window, Gate };

/// Published values on the unit-reference-edge scale; the triangle is recomputed.
TheoreticalCurvatures reference_curvatures(CurvatureFixture id);
/// Throws NotAvailable for catalog sets without published values.
TheoreticalCurvatures reference_curvatures(SampleSetId id);

/// Rows `b_lo,b_hi,c0,c1,c2`, one per piece, contiguous and covering (0, 1].
PiecewisePoly read_scaling_csv(std::istream& in);
void write_scaling_csv(std::ostream& out, const PiecewisePoly& p);

}  // namespace fracurv
