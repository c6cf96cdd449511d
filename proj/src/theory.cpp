#include "fracurv/theory.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "fracurv/error.hpp"

namespace fracurv {

PiecewisePoly::PiecewisePoly(std::vector<double> breakpoints, std::vector<Coefficients> pieces)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)) {
    if (pieces_.empty() || breakpoints_.size() != pieces_.size() + 1)
        throw Error(ErrorKind::InvalidInput, "piecewise polynomial needs one more breakpoint than pieces");
    if (breakpoints_.front() != 0.0 || breakpoints_.back() != 1.0)
        throw Error(ErrorKind::InvalidInput, "piecewise polynomial must cover (0, 1]");
    for (std::size_t i = 1; i < breakpoints_.size(); ++i)
        if (!(breakpoints_[i] > breakpoints_[i - 1]))
            throw Error(ErrorKind::InvalidInput, "breakpoints must be strictly increasing");
}

double PiecewisePoly::operator()(double eps) const {
    if (!(eps > 0.0 && eps <= 1.0)) throw Error(ErrorKind::InvalidInput, "argument outside (0, 1]");
    // Piece i is (b_i, b_{i+1}]: the first breakpoint not below eps closes it.
    const auto it = std::lower_bound(breakpoints_.begin() + 1, breakpoints_.end(), eps);
    const auto& c = pieces_[static_cast<std::size_t>(it - breakpoints_.begin() - 1)];
    return c[0] + eps * (c[1] + eps * c[2]);
}

double eta(std::span<const double> ratios, double s) {
    if (ratios.empty()) throw Error(ErrorKind::InvalidInput, "eta: no ratios");
    double sum = 0.0, out = 0.0;
    for (double r : ratios) {
        if (!(r > 0.0 && r < 1.0)) throw Error(ErrorKind::InvalidInput, "eta: ratios must lie in (0, 1)");
        const double w = std::pow(r, s);
        sum += w;
        out -= w * std::log(r);
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw Error(ErrorKind::InvalidInput, "eta: sum of r^s differs from 1; s is not the similarity dimension");
    return out;
}

double curvature_integral(const PiecewisePoly& rk, double s, int k, double eta) {
    if (k < 0 || k > 2) throw Error(ErrorKind::InvalidInput, "curvature index must be 0, 1 or 2");
    if (!(eta > 0.0)) throw Error(ErrorKind::InvalidInput, "eta must be > 0");
    const auto& b = rk.breakpoints();
    double total = 0.0;
    for (std::size_t i = 0; i < rk.pieces().size(); ++i) {
        const double lo = b[i], hi = b[i + 1];
        for (int j = 0; j < 3; ++j) {
            const double c = rk.pieces()[i][j];
            if (c == 0.0) continue;
            const double p = s - k + j;  // antiderivative exponent of e^(s-k-1+j)
            if (p <= 0.0 && lo == 0.0)
                throw Error(ErrorKind::Divergence, "curvature integral diverges at 0");
            if (p == 0.0)
                total += c * (std::log(hi) - std::log(lo));
            else
                total += c * (std::pow(hi, p) - std::pow(lo, p)) / p;
        }
    }
    return total / eta;
}

TriangleScaling scaling_functions_triangle() {
    constexpr double pi = std::numbers::pi;
    constexpr double inradius = 4.0 / 41.0;
    constexpr double r3 = 16.0 / 41.0;
    constexpr double r2 = 20.0 / 41.0;
    constexpr double r1 = 25.0 / 41.0;
    constexpr double A = 0.24;  // area
    constexpr double S = 2.4;   // perimeter
    const std::vector<double> bp{0.0, inradius, r3, r2, r1, 1.0};

    // Pieces listed from (0, inradius] up to (r1, 1].
    PiecewisePoly euler(bp, {{{-3, 0, 0}}, {{-2, 0, 0}}, {{-1, 0, 0}}, {{0, 0, 0}}, {{1, 0, 0}}});
    PiecewisePoly half_boundary(bp, {{{0, -(6 + 2 * pi), 0}},
                                     {{(1 - r1 - r2 - r3) * S / 2, -2 * pi, 0}},
                                     {{(1 - r1 - r2) * S / 2, -pi, 0}},
                                     {{(1 - r1) * S / 2, 0, 0}},
                                     {{S / 2, pi, 0}}});
    PiecewisePoly area(bp, {{{0, 0, -(6 + 2 * pi)}},
                            {{(1 - r1 * r1 - r2 * r2 - r3 * r3) * A, (1 - r1 - r2 - r3) * S, -2 * pi}},
                            {{(1 - r1 * r1 - r2 * r2) * A, (1 - r1 - r2) * S, -pi}},
                            {{(1 - r1 * r1) * A, (1 - r1) * S, 0}},
                            {{A, S, pi}}});

    TriangleScaling out{{std::move(euler), std::move(half_boundary), std::move(area)}, 0.0, {r1, r2, r3}};
    out.s = similarity_dimension(out.ratios);
    return out;
}

TheoreticalCurvatures curvatures_from_scaling(std::span<const PiecewisePoly> rk, std::span<const double> ratios) {
    if (rk.size() != 3) throw Error(ErrorKind::InvalidInput, "expected three scaling functions");
    TheoreticalCurvatures out;
    out.s = similarity_dimension(ratios);
    out.eta = eta(ratios, out.s);
    for (int k = 0; k < 3; ++k) out.x[k] = curvature_integral(rk[k], out.s, k, out.eta);
    return out;
}

double rescale_curvature(double c, double lambda, double s) {
    if (!(lambda > 0.0)) throw Error(ErrorKind::InvalidInput, "scale factor must be > 0");
    return c * std::pow(lambda, s);
}

TheoreticalCurvatures reference_curvatures(CurvatureFixture id) {
    const double l2 = std::log(2.0), l3 = std::log(3.0), l7 = std::log(7.0);
    switch (id) {
        case CurvatureFixture::Gasket: return {std::log(3.0) / l2, l2, {-0.042345, 0.37615, 1.81}};
        case CurvatureFixture::Carpet: return {std::log(8.0) / l3, l3, {-0.0162, 0.0725, 1.352}};
        case CurvatureFixture::ModifiedCarpet: return {std::log(8.0) / l3, l3, {-0.014, 0.0720, 1.344}};
        case CurvatureFixture::Window:
            return {std::log(40.0) / l7, l7, {-0.0146171712902, 0.0652764265706, 1.251813666054}};
        case CurvatureFixture::Gate:
            return {std::log(40.0) / l7, l7, {-0.0163916537451, 0.0732007965716, 1.403780236274}};
        case CurvatureFixture::Triangle: {
            const auto tri = scaling_functions_triangle();
            return curvatures_from_scaling(tri.r, tri.ratios);
        }
    }
    throw Error(ErrorKind::InvalidInput, "unknown curvature fixture");
}

TheoreticalCurvatures reference_curvatures(SampleSetId id) {
    switch (id) {
        case SampleSetId::SierpinskiGasket: return reference_curvatures(CurvatureFixture::Gasket);
        case SampleSetId::SierpinskiCarpet: return reference_curvatures(CurvatureFixture::Carpet);
        case SampleSetId::ModifiedCarpet: return reference_curvatures(CurvatureFixture::ModifiedCarpet);
        case SampleSetId::TriangleDelta: return reference_curvatures(CurvatureFixture::Triangle);
        default:
            throw Error(ErrorKind::NotAvailable,
                        "no reference curvatures for '" + std::string(sample_set_name(id)) + "'");
    }
}

PiecewisePoly read_scaling_csv(std::istream& in) {
    std::vector<double> bp;
    std::vector<PiecewisePoly::Coefficients> pieces;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#' || line.rfind("b_lo", 0) == 0) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> v;
        try {
            while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::Parse, "scaling CSV: bad number on line " + std::to_string(line_no));
        }
        if (v.size() < 3 || v.size() > 5)
            throw Error(ErrorKind::Parse, "scaling CSV: expected b_lo,b_hi,c0[,c1[,c2]] on line " +
                                              std::to_string(line_no));
        if (bp.empty())
            bp.push_back(v[0]);
        else if (std::abs(bp.back() - v[0]) > 1e-12)
            throw Error(ErrorKind::Parse, "scaling CSV: pieces not contiguous at line " + std::to_string(line_no));
        bp.push_back(v[1]);
        pieces.push_back({v[2], v.size() > 3 ? v[3] : 0.0, v.size() > 4 ? v[4] : 0.0});
    }
    if (pieces.empty()) throw Error(ErrorKind::Parse, "scaling CSV: no pieces");
    try {
        return PiecewisePoly(std::move(bp), std::move(pieces));
    } catch (const Error& e) {
        throw Error(ErrorKind::Parse, std::string("scaling CSV: ") + e.what());
    }
}

void write_scaling_csv(std::ostream& out, const PiecewisePoly& p) {
    out << "b_lo,b_hi,c0,c1,c2\n" << std::setprecision(17);
    for (std::size_t i = 0; i < p.pieces().size(); ++i) {
        const auto& c = p.pieces()[i];
        out << p.breakpoints()[i] << ',' << p.breakpoints()[i + 1] << ',' << c[0] << ',' << c[1] << ',' << c[2]
            << '\n';
    }
}

}  // namespace fracurv
