#include "fracurv/ifs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "fracurv/error.hpp"

namespace fracurv {

namespace {

using Eigen::Matrix2d;
using Eigen::Vector2d;

constexpr double kPi = std::numbers::pi;

Matrix2d rotation_matrix(double theta) {
    Matrix2d m;
    m << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return m;
}

void check_ratios(std::span<const double> ratios) {
    if (ratios.empty()) throw Error(ErrorKind::InvalidInput, "no similarity ratios given");
    for (double r : ratios) {
        if (!(r > 0.0 && r < 1.0)) {
            throw Error(ErrorKind::InvalidInput, "similarity ratio outside (0,1): " + std::to_string(r));
        }
    }
}

Similarity map(double ratio, double rotation, bool reflected, double tx, double ty) {
    return Similarity{ratio, rotation, reflected, Vector2d(tx, ty)};
}

// Copy of the unit shape scaled by `ratio`, rotated by `rotation` about its own
// centre `c`, and placed with its (unrotated) origin at `origin`.
Similarity cell_map(double ratio, double rotation, Vector2d origin, Vector2d c) {
    const Matrix2d rot = rotation_matrix(rotation);
    const Vector2d t = origin + ratio * (c - rot * c);
    return Similarity{ratio, rotation, false, t};
}

IteratedFunctionSystem gasket() {
    const double h = std::sqrt(3.0) / 2.0;
    return IteratedFunctionSystem({map(0.5, 0, false, 0, 0), map(0.5, 0, false, 0.5, 0), map(0.5, 0, false, 0.25, h / 2.0)},
                                  "gasket");
}

IteratedFunctionSystem carpet() {
    std::vector<Similarity> maps;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i)
            if (!(i == 1 && j == 1)) maps.push_back(map(1.0 / 3.0, 0, false, i / 3.0, j / 3.0));
    return IteratedFunctionSystem(std::move(maps), "carpet");
}

IteratedFunctionSystem tree() {
    const Vector2d c(0.5, 0.5);
    return IteratedFunctionSystem({cell_map(0.5, -kPi / 2, Vector2d(0.0, 0.5), c),
                                   cell_map(0.5, 0.0, Vector2d(0.0, 0.0), c),
                                   cell_map(0.5, kPi / 2, Vector2d(0.5, 0.0), c)},
                                  "tree");
}

IteratedFunctionSystem cantor_dust() {
    const double t = 2.0 / 3.0;
    return IteratedFunctionSystem({map(1.0 / 3, 0, false, 0, 0), map(1.0 / 3, 0, false, t, 0),
                                   map(1.0 / 3, 0, false, 0, t), map(1.0 / 3, 0, false, t, t)},
                                  "cantor");
}

IteratedFunctionSystem koch() {
    const double third = 1.0 / 3.0;
    return IteratedFunctionSystem({map(third, 0, false, 0, 0), map(third, kPi / 3, false, third, 0),
                                   map(third, -kPi / 3, false, 0.5, std::sqrt(3.0) / 6.0),
                                   map(third, 0, false, 2 * third, 0)},
                                  "koch");
}

// Eight of the nine grid cells (the top-middle one is left open), the centre
// cell occupied, three copies turned by quarter or half turns.
IteratedFunctionSystem modified_carpet() {
    const Vector2d c(0.5, 0.5);
    std::vector<Similarity> maps;
    for (int j = 0; j < 3; ++j) {
        for (int i = 0; i < 3; ++i) {
            if (i == 1 && j == 2) continue;
            double rot = 0.0;
            if (i == 1 && j == 1) rot = kPi / 2;
            if (i == 0 && j == 2) rot = kPi;
            if (i == 2 && j == 0) rot = -kPi / 2;
            maps.push_back(cell_map(1.0 / 3.0, rot, Vector2d(i / 3.0, j / 3.0), c));
        }
    }
    return IteratedFunctionSystem(std::move(maps), "modcarpet");
}

// Right isosceles triangle {x, y >= 0, x + y <= 1} split into nine ratio-1/3
// triangles; the inverted one in the corner cell is removed.
IteratedFunctionSystem tripet() {
    std::vector<Similarity> maps;
    const double third = 1.0 / 3.0;
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i + j <= 2; ++i) maps.push_back(map(third, 0, false, i * third, j * third));
    maps.push_back(map(third, kPi, false, 2 * third, third));  // inverted, cell (1, 0)
    maps.push_back(map(third, kPi, false, third, 2 * third));  // inverted, cell (0, 1)
    return IteratedFunctionSystem(std::move(maps), "tripet");
}

// Right angle at the origin, legs 0.6 (x) and 0.8 (y), hypotenuse 1. Copies:
// 25/41 at (0.6, 0), a reflected 20/41 copy at (0, 0.8), 16/41 at the origin.
IteratedFunctionSystem triangle_delta() {
    const Vector2d x_vertex(0.6, 0.0);
    const Vector2d y_vertex(0.0, 0.8);
    const double r1 = 25.0 / 41.0;
    const double r2 = 20.0 / 41.0;
    const double r3 = 16.0 / 41.0;

    // Reflection swapping the directions from the top vertex towards the origin
    // and towards (0.6, 0): mirror line along their bisector.
    const Vector2d bisector = Vector2d(0.0, -1.0) + (x_vertex - y_vertex);
    const double theta = 2.0 * std::atan2(bisector.y(), bisector.x());
    Similarity top{r2, theta, true, Vector2d::Zero()};
    top.translation = y_vertex - top.linear() * y_vertex;

    return IteratedFunctionSystem({Similarity{r1, 0.0, false, x_vertex - r1 * x_vertex}, top,
                                   Similarity{r3, 0.0, false, Vector2d::Zero()}},
                                  "triangle");
}

IteratedFunctionSystem sheared_gasket() {
    return IteratedFunctionSystem({map(0.5, 0, false, 0, 0), map(0.5, 0, false, 0.3, 0), map(0.5, 0, false, 0, 0.4)},
                                  "sheared");
}

constexpr std::array kAllSets = {SampleSetId::SierpinskiGasket, SampleSetId::SierpinskiCarpet,
                                 SampleSetId::SierpinskiTree,    SampleSetId::CantorDust,
                                 SampleSetId::KochCurve,         SampleSetId::ModifiedCarpet,
                                 SampleSetId::Tripet,            SampleSetId::TriangleDelta,
                                 SampleSetId::ShearedGasket};

// Uniform double in [0, 1) from the top 53 bits.
double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class MapSampler {
public:
    explicit MapSampler(const IteratedFunctionSystem& ifs) {
        const auto ratios = ifs.ratios();
        const double s = similarity_dimension(ratios);
        double acc = 0.0;
        for (double r : ratios) {
            acc += std::pow(r, s);
            cumulative_.push_back(acc);
        }
        for (double& c : cumulative_) c /= acc;
        cumulative_.back() = 1.0;
    }

    std::size_t operator()(std::mt19937_64& rng) const {
        const double u = unit_uniform(rng);
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cumulative_.begin(),
                                                                 std::ssize(cumulative_) - 1));
    }

private:
    std::vector<double> cumulative_;
};

}  // namespace

Matrix2d Similarity::linear() const {
    Matrix2d m = ratio * rotation_matrix(rotation);
    if (reflected) m.col(1) = -m.col(1);
    return m;
}

Vector2d Similarity::fixed_point() const {
    return (Matrix2d::Identity() - linear()).lu().solve(translation);
}

Vector2d apply(const Similarity& map, const Vector2d& p) {
    Vector2d q = p;
    if (map.reflected) q.y() = -q.y();
    return map.ratio * (rotation_matrix(map.rotation) * q) + map.translation;
}

IteratedFunctionSystem::IteratedFunctionSystem(std::vector<Similarity> maps, std::string name)
    : maps_(std::move(maps)), name_(std::move(name)) {
    if (maps_.size() < 2) throw Error(ErrorKind::InvalidInput, "an IFS needs at least two maps");
    check_ratios(ratios());
}

std::vector<double> IteratedFunctionSystem::ratios() const {
    std::vector<double> r;
    r.reserve(maps_.size());
    for (const auto& m : maps_) r.push_back(m.ratio);
    return r;
}

double similarity_dimension(std::span<const double> ratios) {
    check_ratios(ratios);
    if (ratios.size() == 1) return 0.0;

    auto excess = [&](double s) {
        double sum = 0.0;
        for (double r : ratios) sum += std::pow(r, s);
        return sum - 1.0;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (excess(hi) > 0.0) hi *= 2.0;
    // Bisect to the resolution of double; the map is strictly decreasing.
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (excess(mid) > 0.0 ? lo : hi) = mid;
    }
    return std::abs(excess(lo)) < std::abs(excess(hi)) ? lo : hi;
}

ArithmeticClass arithmetic_class(std::span<const double> ratios, double tol) {
    check_ratios(ratios);
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidInput, "tolerance must be positive");

    std::vector<double> logs;
    for (double r : ratios) logs.push_back(-std::log(r));
    const double largest = *std::max_element(logs.begin(), logs.end());
    const double floor = 1e-6 * largest;

    auto real_gcd = [&](double a, double b) -> std::optional<double> {
        if (a < b) std::swap(a, b);
        while (b > tol) {
            if (b <= floor) return std::nullopt;
            double rem = std::fmod(a, b);
            if (b - rem <= tol) rem = 0.0;
            a = b;
            b = rem;
        }
        if (a <= floor) return std::nullopt;
        return a;
    };

    double h = logs.front();
    for (double v : logs) {
        const auto g = real_gcd(h, v);
        if (!g) return {};
        h = *g;
    }
    for (double v : logs) {
        const double q = v / h;
        if (std::abs(q - std::round(q)) * h > 10 * tol * std::max(1.0, q)) return {};
    }
    return {true, h};
}

std::string to_string(const ArithmeticClass& c) {
    if (!c.arithmetic) return "non-arithmetic";
    std::ostringstream os;
    os << std::setprecision(12) << "arithmetic(h=" << c.h << ")";
    return os.str();
}

IteratedFunctionSystem catalog(SampleSetId id) {
    switch (id) {
        case SampleSetId::SierpinskiGasket: return gasket();
        case SampleSetId::SierpinskiCarpet: return carpet();
        case SampleSetId::SierpinskiTree: return tree();
        case SampleSetId::CantorDust: return cantor_dust();
        case SampleSetId::KochCurve: return koch();
        case SampleSetId::ModifiedCarpet: return modified_carpet();
        case SampleSetId::Tripet: return tripet();
        case SampleSetId::TriangleDelta: return triangle_delta();
        case SampleSetId::ShearedGasket: return sheared_gasket();
    }
    throw Error(ErrorKind::InvalidInput, "unknown sample set");
}

std::span<const SampleSetId> all_sample_sets() { return kAllSets; }

std::string_view sample_set_name(SampleSetId id) {
    switch (id) {
        case SampleSetId::SierpinskiGasket: return "gasket";
        case SampleSetId::SierpinskiCarpet: return "carpet";
        case SampleSetId::SierpinskiTree: return "tree";
        case SampleSetId::CantorDust: return "cantor";
        case SampleSetId::KochCurve: return "koch";
        case SampleSetId::ModifiedCarpet: return "modcarpet";
        case SampleSetId::Tripet: return "tripet";
        case SampleSetId::TriangleDelta: return "triangle";
        case SampleSetId::ShearedGasket: return "sheared";
    }
    return "?";
}

std::optional<SampleSetId> parse_sample_set(std::string_view name) {
    for (SampleSetId id : kAllSets)
        if (sample_set_name(id) == name) return id;
    return std::nullopt;
}

IteratedFunctionSystem read_ifs(std::istream& in, std::string name) {
    std::vector<Similarity> maps;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        double ratio = 0, rot_deg = 0, tx = 0, ty = 0;
        int reflect = 0;
        if (!(ls >> ratio >> rot_deg >> reflect >> tx >> ty) || (reflect != 0 && reflect != 1)) {
            throw Error(ErrorKind::Parse, "IFS line " + std::to_string(lineno) +
                                              ": expected `ratio rotation_deg reflect(0|1) tx ty`");
        }
        maps.push_back(Similarity{ratio, rot_deg * kPi / 180.0, reflect == 1, Vector2d(tx, ty)});
    }
    return IteratedFunctionSystem(std::move(maps), std::move(name));
}

void write_ifs(std::ostream& out, const IteratedFunctionSystem& ifs) {
    out << "# ratio rotation_deg reflect tx ty\n";
    if (!ifs.name().empty()) out << "# " << ifs.name() << '\n';
    out << std::setprecision(17);
    for (const auto& m : ifs.maps()) {
        out << m.ratio << ' ' << m.rotation * 180.0 / kPi << ' ' << (m.reflected ? 1 : 0) << ' '
            << m.translation.x() << ' ' << m.translation.y() << '\n';
    }
}

std::size_t default_point_count(int width, int height, double s) {
    const double n = 50.0 * std::pow(static_cast<double>(width) * height, s / 2.0);
    return static_cast<std::size_t>(std::clamp(std::ceil(n), 1.0, 1e8));
}

Framing fit_framing(const IteratedFunctionSystem& ifs, int width, int height) {
    std::vector<Vector2d> probe;
    for (const auto& a : ifs.maps()) {
        probe.push_back(a.fixed_point());
        for (const auto& b : ifs.maps()) {
            const Matrix2d lin = a.linear() * b.linear();
            const Vector2d t = a.linear() * b.translation + a.translation;
            probe.push_back((Matrix2d::Identity() - lin).lu().solve(t));
        }
    }
    // Fixed probe seed so the framing does not depend on the caller's seed.
    std::mt19937_64 rng(0x5eedf00dULL);
    const MapSampler pick(ifs);
    Vector2d p = ifs.maps().front().fixed_point();
    for (int i = 0; i < 10000; ++i) {
        p = apply(ifs.maps()[pick(rng)], p);
        probe.push_back(p);
    }

    Vector2d lo = probe.front();
    Vector2d hi = probe.front();
    for (const auto& q : probe) {
        lo = lo.cwiseMin(q);
        hi = hi.cwiseMax(q);
    }
    const Vector2d extent = hi - lo;
    const double largest = extent.maxCoeff();
    if (!(largest > 1e-12) || !std::isfinite(largest)) {
        throw Error(ErrorKind::DegenerateGeometry, "attractor collapses to a point");
    }
    const double inner_w = width - 2.0;
    const double inner_h = height - 2.0;
    const double sx = extent.x() > 1e-12 * largest ? inner_w / extent.x() : std::numeric_limits<double>::infinity();
    const double sy = extent.y() > 1e-12 * largest ? inner_h / extent.y() : std::numeric_limits<double>::infinity();

    Framing f;
    f.scale = std::min(sx, sy);
    f.x_min = lo.x();
    f.y_max = hi.y();
    f.offset_x = 1.0 + 0.5 * (inner_w - extent.x() * f.scale);
    f.offset_y = 1.0 + 0.5 * (inner_h - extent.y() * f.scale);
    return f;
}

ChaosGameResult chaos_game(const IteratedFunctionSystem& ifs, const ChaosGameOptions& opts) {
    if (opts.width < 16 || opts.height < 16) throw Error(ErrorKind::InvalidInput, "image must be at least 16x16");

    ChaosGameResult result;
    result.dimension = similarity_dimension(ifs.ratios());
    result.n_points = opts.n_points ? opts.n_points : default_point_count(opts.width, opts.height, result.dimension);
    result.framing = fit_framing(ifs, opts.width, opts.height);
    result.image = BinaryImage(opts.width, opts.height);

    const Framing& f = result.framing;
    const MapSampler pick(ifs);
    // Precompute the affine parts once; apply() stays the reference definition.
    std::vector<Matrix2d> lin;
    std::vector<Vector2d> trans;
    for (const auto& m : ifs.maps()) {
        lin.push_back(m.linear());
        trans.push_back(m.translation);
    }

    std::mt19937_64 rng(opts.seed);
    Vector2d p = ifs.maps().front().fixed_point();
    for (std::size_t i = 0; i < opts.burn_in; ++i) {
        const std::size_t k = pick(rng);
        p = lin[k] * p + trans[k];
    }
    const int max_x = opts.width - 2;
    const int max_y = opts.height - 2;
    for (std::size_t i = 0; i < result.n_points; ++i) {
        const std::size_t k = pick(rng);
        p = lin[k] * p + trans[k];
        const double px = f.offset_x + (p.x() - f.x_min) * f.scale;
        const double py = f.offset_y + (f.y_max - p.y()) * f.scale;
        const int ix = std::clamp(static_cast<int>(std::floor(px)), 1, max_x);
        const int iy = std::clamp(static_cast<int>(std::floor(py)), 1, max_y);
        result.image.set(ix, iy);
    }
    return result;
}

}  // namespace fracurv
