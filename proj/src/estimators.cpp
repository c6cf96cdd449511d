#include "fracurv/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "fracurv/error.hpp"

namespace fracurv {

// ---------------------------------------------------------------------------
// Box counting

namespace {

double radical_inverse(unsigned i, unsigned base) {
    double inv = 1.0 / base, f = inv, out = 0.0;
    while (i > 0) {
        out += f * (i % base);
        i /= base;
        f *= inv;
    }
    return out;
}

}  // namespace

std::vector<std::array<int, 2>> box_offsets(int delta, int n_shifts) {
    if (delta < 1 || n_shifts < 1) throw Error(ErrorKind::InvalidInput, "box_offsets: delta and n_shifts must be >= 1");
    std::vector<std::array<int, 2>> out;
    for (unsigned i = 0; i < static_cast<unsigned>(n_shifts); ++i) {
        const std::array<int, 2> p{std::min(delta - 1, static_cast<int>(radical_inverse(i, 2) * delta)),
                                   std::min(delta - 1, static_cast<int>(radical_inverse(i, 3) * delta))};
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    }
    return out;
}

std::int64_t box_count(const BinaryImage& img, int delta, int n_shifts) {
    const int w = img.width();
    const int h = img.height();
    if (delta < 1) throw Error(ErrorKind::InvalidInput, "box size must be >= 1");
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    std::vector<char> hit;
    for (const auto& [ox, oy] : box_offsets(delta, n_shifts)) {
        const int nx = (w - 1 + ox) / delta + 1;
        const int ny = (h - 1 + oy) / delta + 1;
        hit.assign(static_cast<std::size_t>(nx) * ny, 0);
        std::int64_t count = 0;
        for (int y = 0; y < h; ++y) {
            const auto row = img.row(y);
            char* cells = hit.data() + static_cast<std::size_t>((y + oy) / delta) * nx;
            for (int x = 0; x < w; ++x) {
                if (!row[x]) continue;
                char& c = cells[(x + ox) / delta];
                if (!c) {
                    c = 1;
                    ++count;
                }
            }
        }
        best = std::min(best, count);
    }
    return best;
}

BoxDimensionResult box_dimension(const BinaryImage& img, const BoxDimensionOptions& opts) {
    if (opts.delta_min < 1) throw Error(ErrorKind::InvalidInput, "delta_min must be >= 1");
    if (!(opts.factor > 1.0)) throw Error(ErrorKind::InvalidInput, "box ladder factor must be > 1");
    if (img.foreground_count() == 0) throw Error(ErrorKind::EmptyForeground, "image has no foreground pixels");

    int delta = opts.delta_max;
    if (delta <= 0) delta = static_cast<int>(std::hypot(img.width(), img.height()) / 4.0);
    delta = std::min(delta, std::min(img.width(), img.height()));

    BoxDimensionResult res;
    std::vector<double> lx, ly;
    while (delta >= opts.delta_min) {
        const std::int64_t n = box_count(img, delta, opts.n_shifts);
        res.deltas.push_back(delta);
        res.counts.push_back(n);
        lx.push_back(-std::log(static_cast<double>(delta)));
        ly.push_back(std::log(static_cast<double>(n)));
        const int next = static_cast<int>(std::floor(delta / opts.factor));
        delta = next < delta ? next : delta - 1;
    }
    if (lx.size() < 2) throw Error(ErrorKind::InsufficientData, "box ladder has fewer than 2 sizes");
    res.dimension = fit_line(lx, ly).slope;
    return res;
}

// ---------------------------------------------------------------------------
// Least squares

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw Error(ErrorKind::InvalidInput, "fit_line: size mismatch");
    if (x.size() < 2) throw Error(ErrorKind::InsufficientData, "fit_line: need at least 2 points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw Error(ErrorKind::SingularDesign, "fit_line: constant abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

double sausage_dimension(const FunctionalProfile& profile) {
    std::vector<double> lr, la;
    for (const auto& s : profile.samples) {
        if (s.c2 > 0.0) {
            lr.push_back(std::log(s.r));
            la.push_back(std::log(s.c2));
        }
    }
    if (lr.size() < 2) throw Error(ErrorKind::InsufficientData, "sausage method needs 2 samples with positive area");
    return 2.0 - fit_line(lr, la).slope;
}

// ---------------------------------------------------------------------------
// Joint regression

RegressionResult joint_regression(const std::array<RegressionData, 3>& data, UseFlags use) {
    if (use.count() == 0) throw Error(ErrorKind::InvalidInput, "joint regression: no dataset enabled");
    RegressionResult res;
    res.used = use;

    std::array<double, 3> xbar{}, ybar{};
    double num = 0.0, den = 0.0;
    for (int k = 0; k < 3; ++k) {
        if (!use.uses(k)) continue;
        const auto& d = data[k];
        if (d.x.size() != d.y.size()) throw Error(ErrorKind::InvalidInput, "joint regression: size mismatch");
        if (d.x.empty()) continue;
        const double n = static_cast<double>(d.x.size());
        xbar[k] = std::accumulate(d.x.begin(), d.x.end(), 0.0) / n;
        ybar[k] = std::accumulate(d.y.begin(), d.y.end(), 0.0) / n;
        for (std::size_t j = 0; j < d.x.size(); ++j) {
            num += (d.x[j] - xbar[k]) * d.y[j];
            den += (d.x[j] - xbar[k]) * (d.x[j] - xbar[k]);
        }
        res.m += d.x.size();
    }
    if (res.m < 2) throw Error(ErrorKind::InsufficientData, "joint regression: fewer than 2 points");
    if (!(den > 0.0)) throw Error(ErrorKind::SingularDesign, "joint regression: constant x values");

    res.s_hat = num / den;
    double sse = 0.0;
    for (int k = 0; k < 3; ++k) {
        if (!use.uses(k) || data[k].x.empty()) continue;
        const double d_k = ybar[k] - xbar[k] * res.s_hat;
        res.d_hat[k] = d_k;
        for (std::size_t j = 0; j < data[k].x.size(); ++j) {
            const double e = data[k].y[j] - d_k - res.s_hat * data[k].x[j];
            sse += e * e;
        }
    }
    res.residual = sse / static_cast<double>(res.m);
    return res;
}

RegressionResult joint_regression(const FunctionalProfile& profile, UseFlags use) {
    std::array<RegressionData, 3> data;
    for (const auto& s : profile.samples) {
        for (int k = 0; k < 3; ++k) {
            if (use.uses(k) && s.y[k]) {
                data[k].x.push_back(s.x);
                data[k].y.push_back(*s.y[k]);
            }
        }
    }
    return joint_regression(data, use);
}

// ---------------------------------------------------------------------------
// Averaged curvatures

double gamma_estimate(std::span<const double> x, std::span<const double> curvature, int k, double s) {
    if (x.size() != curvature.size()) throw Error(ErrorKind::InvalidInput, "gamma: size mismatch");
    if (x.empty()) throw Error(ErrorKind::InsufficientData, "gamma: no samples");
    if (!std::isfinite(s)) throw Error(ErrorKind::InvalidInput, "gamma: dimension must be finite");

    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });

    // Sign-split form avoids overflow of C_k * exp(...) for large |C_k|.
    auto rescaled = [&](std::size_t i) {
        const double c = curvature[i];
        if (c == 0.0) return 0.0;
        return std::copysign(std::exp(std::log(std::abs(c)) + (k - s) * x[i]), c);
    };
    const std::size_t m = x.size();
    if (m == 1) return rescaled(0);

    std::vector<double> gaps;
    for (std::size_t j = 1; j < m; ++j) gaps.push_back(std::abs(x[order[j]] - x[order[j - 1]]));
    std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
    double med = gaps[gaps.size() / 2];
    if (gaps.size() % 2 == 0) {
        const double lo = *std::max_element(gaps.begin(), gaps.begin() + gaps.size() / 2);
        med = 0.5 * (med + lo);
    }
    const double a = med / 2.0;

    std::vector<double> edges(m + 1);
    edges[0] = x[order[0]] - a;
    edges[m] = x[order[m - 1]] + a;
    for (std::size_t j = 1; j < m; ++j) edges[j] = 0.5 * (x[order[j - 1]] + x[order[j]]);
    const double span = edges[m] - edges[0];
    if (!(span > 0.0)) throw Error(ErrorKind::SingularDesign, "gamma: all samples at the same x");

    double sum = 0.0;
    for (std::size_t j = 0; j < m; ++j) sum += rescaled(order[j]) * (edges[j + 1] - edges[j]);
    return sum / span;
}

CurvatureEstimates gamma_estimates(const FunctionalProfile& profile, double s_hat) {
    CurvatureEstimates out;
    out.s_used = s_hat;
    std::vector<double> x;
    std::array<std::vector<double>, 3> c;
    for (const auto& s : profile.samples) {
        x.push_back(s.x);
        for (int k = 0; k < 3; ++k) c[k].push_back(s.curvature(k));
    }
    for (int k = 0; k < 3; ++k) out.gamma[k] = gamma_estimate(x, c[k], k, s_hat);
    if (out.gamma[2] > 0.0) {
        out.xi0 = out.gamma[0] / out.gamma[2];
        out.xi1 = out.gamma[1] / out.gamma[2];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Local dimension

namespace {

// Uniform bucket grid over [0, 1]^2 for nearest-neighbour queries.
class PointGrid {
public:
    PointGrid(const std::vector<std::array<double, 2>>& pts, int cells_per_side)
        : n_(cells_per_side), start_(static_cast<std::size_t>(n_) * n_ + 1, 0) {
        std::vector<int> cell_of(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            cell_of[i] = cell(pts[i]);
            ++start_[cell_of[i] + 1];
        }
        std::partial_sum(start_.begin(), start_.end(), start_.begin());
        sorted_.resize(pts.size());
        std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
        for (std::size_t i = 0; i < pts.size(); ++i) sorted_[fill[cell_of[i]]++] = pts[i];
    }

    double nearest(const std::array<double, 2>& q) const {
        const int cx = clampi(static_cast<int>(q[0] * n_));
        const int cy = clampi(static_cast<int>(q[1] * n_));
        double best2 = std::numeric_limits<double>::infinity();
        const double h = 1.0 / n_;
        for (int ring = 0; ring <= n_; ++ring) {
            // Every point outside the current square of rings is at least this far away.
            const double reach = (ring - 1) * h;
            if (ring > 0 && reach > 0 && reach * reach > best2) break;
            for (int gy = cy - ring; gy <= cy + ring; ++gy) {
                if (gy < 0 || gy >= n_) continue;
                const bool edge_row = gy == cy - ring || gy == cy + ring;
                for (int gx = cx - ring; gx <= cx + ring; gx += edge_row ? 1 : 2 * std::max(ring, 1)) {
                    if (gx >= 0 && gx < n_) scan(gy * n_ + gx, q, best2);
                    if (ring == 0) break;
                }
            }
        }
        return std::sqrt(best2);
    }

private:
    int clampi(int c) const { return std::clamp(c, 0, n_ - 1); }
    int cell(const std::array<double, 2>& p) const {
        return clampi(static_cast<int>(p[1] * n_)) * n_ + clampi(static_cast<int>(p[0] * n_));
    }
    void scan(int c, const std::array<double, 2>& q, double& best2) const {
        for (std::size_t i = start_[c]; i < start_[c + 1]; ++i) {
            const double dx = sorted_[i][0] - q[0], dy = sorted_[i][1] - q[1];
            best2 = std::min(best2, dx * dx + dy * dy);
        }
    }

    int n_;
    std::vector<std::size_t> start_;
    std::vector<std::array<double, 2>> sorted_;
};

}  // namespace

LocalDimReport local_dimension(const BinaryImage& img, const LocalDimOptions& opts) {
    std::vector<std::array<int, 2>> fg;
    for (int y = 0; y < img.height(); ++y) {
        const auto row = img.row(y);
        for (int x = 0; x < img.width(); ++x)
            if (row[x]) fg.push_back({x, y});
    }
    if (fg.size() < 2) throw Error(ErrorKind::EmptyForeground, "local dimension needs at least 2 foreground pixels");
    if (opts.m_test < 1) throw Error(ErrorKind::InvalidInput, "m_test must be >= 1");
    if (!(opts.bin_width > 0.0)) throw Error(ErrorKind::InvalidInput, "bin width must be > 0");

    LocalDimReport rep;
    rep.n_sample = opts.n_sample ? opts.n_sample : static_cast<std::size_t>(0.8 * static_cast<double>(fg.size()));
    if (rep.n_sample < 2) throw Error(ErrorKind::InvalidInput, "n_sample must be >= 2");
    rep.saturated = rep.n_sample > 10 * fg.size();

    std::mt19937_64 rng(opts.seed);
    std::uniform_int_distribution<std::size_t> pick(0, fg.size() - 1);
    std::uniform_real_distribution<double> jitter(0.0, 1.0);
    const double scale = 1.0 / std::max(img.width(), img.height());
    auto draw = [&] {
        const auto& p = fg[pick(rng)];
        return std::array<double, 2>{(p[0] + jitter(rng)) * scale, (p[1] + jitter(rng)) * scale};
    };

    std::vector<std::array<double, 2>> tests(opts.m_test);
    for (auto& t : tests) t = draw();
    std::vector<std::array<double, 2>> sample(rep.n_sample);
    for (auto& s : sample) s = draw();

    const int cells = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(rep.n_sample) / 4.0)), 1, 4096);
    const PointGrid grid(sample, cells);
    const double log_n = std::log(static_cast<double>(rep.n_sample));

    rep.estimates.reserve(tests.size());
    double sum = 0.0;
    std::size_t finite = 0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& t : tests) {
        const double rho = grid.nearest(t);
        const double l = std::log(opts.b * rho) / (-opts.a * log_n);
        const double est = (rho > 0.0 && l > 0.0) ? 1.0 / l : std::numeric_limits<double>::infinity();
        rep.estimates.push_back(est);
        if (std::isfinite(est)) {
            sum += est;
            ++finite;
            lo = std::min(lo, est);
            hi = std::max(hi, est);
        }
    }
    if (finite == 0) return rep;
    rep.mean = sum / static_cast<double>(finite);

    const double first = std::floor(lo / opts.bin_width) * opts.bin_width;
    const auto n_bins = static_cast<std::size_t>(std::floor((hi - first) / opts.bin_width)) + 1;
    rep.counts.assign(n_bins, 0);
    for (std::size_t i = 0; i <= n_bins; ++i) rep.bin_edges.push_back(first + static_cast<double>(i) * opts.bin_width);
    for (double e : rep.estimates) {
        if (!std::isfinite(e)) continue;
        const auto b = std::min(n_bins - 1, static_cast<std::size_t>(std::floor((e - first) / opts.bin_width)));
        ++rep.counts[b];
    }
    const auto top = std::max_element(rep.counts.begin(), rep.counts.end()) - rep.counts.begin();
    rep.mode_bin = rep.bin_edges[static_cast<std::size_t>(top)];
    return rep;
}

// ---------------------------------------------------------------------------
// Lacunarity

std::vector<LacunarityPoint> gliding_box_lacunarity(const BinaryImage& img, std::span<const int> box_sizes) {
    const int w = img.width();
    const int h = img.height();
    std::vector<std::int64_t> integral(static_cast<std::size_t>(w + 1) * (h + 1), 0);
    auto I = [&](int x, int y) -> std::int64_t& { return integral[static_cast<std::size_t>(y) * (w + 1) + x]; };
    for (int y = 0; y < h; ++y) {
        const auto row = img.row(y);
        std::int64_t acc = 0;
        for (int x = 0; x < w; ++x) {
            acc += row[x];
            I(x + 1, y + 1) = I(x + 1, y) + acc;
        }
    }

    std::vector<LacunarityPoint> out;
    for (int r : box_sizes) {
        if (r < 1 || r > std::min(w, h)) throw Error(ErrorKind::InvalidInput, "box size out of range");
        double z1 = 0.0, z2 = 0.0;
        for (int y = 0; y + r <= h; ++y) {
            for (int x = 0; x + r <= w; ++x) {
                const double m = static_cast<double>(I(x + r, y + r) - I(x, y + r) - I(x + r, y) + I(x, y));
                z1 += m;
                z2 += m * m;
            }
        }
        const double positions = static_cast<double>(w - r + 1) * (h - r + 1);
        z1 /= positions;
        z2 /= positions;
        out.push_back({r, z1 > 0.0 ? z2 / (z1 * z1) : std::numeric_limits<double>::quiet_NaN()});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Output

void write_estimates_csv(std::ostream& out, std::span<const EstimateRow> rows) {
    out << "estimator,value,aux\n" << std::setprecision(12);
    for (const auto& r : rows) out << r.estimator << ',' << r.value << ',' << r.aux << '\n';
}

void write_histogram_csv(std::ostream& out, const LocalDimReport& report) {
    out << "bin_left,count\n" << std::setprecision(12);
    for (std::size_t i = 0; i < report.counts.size(); ++i) out << report.bin_edges[i] << ',' << report.counts[i] << '\n';
}

void write_yk_plot(std::ostream& out, const FunctionalProfile& profile) {
    out << "# x y0 y1 y2\n" << std::setprecision(12);
    for (const auto& s : profile.samples) {
        out << s.x;
        for (int k = 0; k < 3; ++k) {
            out << ' ';
            if (s.y[k])
                out << *s.y[k];
            else
                out << "nan";
        }
        out << '\n';
    }
}

}  // namespace fracurv
