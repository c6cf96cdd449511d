#include "fracurv/minkowski.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

#include "fracurv/error.hpp"

namespace fracurv {

ConfigurationHistogram configuration_histogram(const BinaryImage& img) {
    ConfigurationHistogram hist{};
    const int w = img.width();
    const int h = img.height();
    auto px = [&](int x, int y) -> int {
        if (x < 0 || y < 0 || x >= w || y >= h) return 0;
        return img.get(x, y) ? 1 : 0;
    };
    // Window with top-left corner at (x, y) for x in [-1, w-1], y in [-1, h-1].
    for (int y = -1; y < h; ++y) {
        for (int x = -1; x < w; ++x) {
            const int idx = px(x, y) | (px(x + 1, y) << 1) | (px(x, y + 1) << 2) | (px(x + 1, y + 1) << 3);
            ++hist[idx];
        }
    }
    return hist;
}

std::array<double, 16> boundary_weights() {
    const double three = (std::numbers::pi / 8.0 - std::numbers::sqrt2 / 4.0) / (1.0 - std::numbers::sqrt2 / 2.0);
    std::array<double, 16> wt{};
    for (int c = 0; c < 16; ++c) {
        switch (std::popcount(static_cast<unsigned>(c))) {
            case 1: wt[c] = 0.5; break;
            case 2: wt[c] = (c == 0b1001 || c == 0b0110) ? 1.0 : 0.5; break;
            case 3: wt[c] = three; break;
            default: wt[c] = 0.0;
        }
    }
    return wt;
}

std::int64_t area(const BinaryImage& img) { return static_cast<std::int64_t>(img.foreground_count()); }

namespace {

double boundary_from_histogram(const ConfigurationHistogram& hist) {
    static const auto wt = boundary_weights();
    double sum = 0.0;
    for (int c = 0; c < 16; ++c) sum += wt[c] * static_cast<double>(hist[c]);
    return sum;
}

std::int64_t euler_from_histogram(const ConfigurationHistogram& hist) {
    std::int64_t q1 = 0, q3 = 0;
    for (int c = 0; c < 16; ++c) {
        const int n = std::popcount(static_cast<unsigned>(c));
        if (n == 1) q1 += hist[c];
        if (n == 3) q3 += hist[c];
    }
    const std::int64_t qd = hist[0b1001] + hist[0b0110];
    return (q1 - q3 - 2 * qd) / 4;
}

// Union-find over row runs.
class RunForest {
public:
    int add() {
        parent_.push_back(static_cast<int>(parent_.size()));
        return parent_.back();
    }
    int find(int a) {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }
    std::size_t size() const { return parent_.size(); }

private:
    std::vector<int> parent_;
};

struct Run {
    int begin;  // inclusive
    int end;    // exclusive
    int label;
};

// Counts connected components of pixels equal to `value`. With eight set, runs in
// adjacent rows touching diagonally are joined. Optionally also reports how many
// components touch the image border.
std::int64_t count_components(const BinaryImage& img, bool value, bool eight, std::int64_t* touching_border) {
    const int w = img.width();
    const int h = img.height();
    RunForest forest;
    std::vector<char> on_border;
    std::vector<Run> prev, cur;
    const std::uint8_t want = value ? 1 : 0;
    const int reach = eight ? 1 : 0;
    for (int y = 0; y < h; ++y) {
        cur.clear();
        const auto row = img.row(y);
        int x = 0;
        while (x < w) {
            if (row[x] != want) {
                ++x;
                continue;
            }
            const int b = x;
            while (x < w && row[x] == want) ++x;
            const int label = forest.add();
            on_border.push_back(y == 0 || y == h - 1 || b == 0 || x == w);
            cur.push_back({b, x, label});
        }
        // Merge with overlapping runs of the previous row (both lists are sorted).
        std::size_t p = 0;
        for (const Run& run : cur) {
            while (p < prev.size() && prev[p].end + reach <= run.begin) ++p;
            for (std::size_t q = p; q < prev.size() && prev[q].begin < run.end + reach; ++q)
                forest.unite(run.label, prev[q].label);
        }
        std::swap(prev, cur);
    }
    std::int64_t count = 0;
    std::vector<char> root_on_border(forest.size(), 0);
    for (std::size_t i = 0; i < forest.size(); ++i) {
        const int root = forest.find(static_cast<int>(i));
        if (root == static_cast<int>(i)) ++count;
        if (on_border[i]) root_on_border[root] = 1;
    }
    if (touching_border) {
        std::int64_t t = 0;
        for (std::size_t i = 0; i < forest.size(); ++i)
            if (forest.find(static_cast<int>(i)) == static_cast<int>(i) && root_on_border[i]) ++t;
        *touching_border = t;
    }
    return count;
}

}  // namespace

double boundary_length(const BinaryImage& img) { return 2.0 * boundary_from_histogram(configuration_histogram(img)); }

std::int64_t euler_number(const BinaryImage& img) { return euler_from_histogram(configuration_histogram(img)); }

ComponentsAndHoles components_and_holes(const BinaryImage& img) {
    ComponentsAndHoles out;
    out.components = count_components(img, true, true, nullptr);
    // The padded ring joins every border-touching background component into the
    // unbounded one; the rest are holes.
    std::int64_t touching = 0;
    const std::int64_t bg = count_components(img, false, false, &touching);
    out.holes = bg - touching;
    return out;
}

std::int64_t c0_var_estimate(const BinaryImage& img) {
    const auto ch = components_and_holes(img);
    return ch.components + ch.holes;
}

double FunctionalSample::curvature(int k) const {
    switch (k) {
        case 0: return static_cast<double>(c0);
        case 1: return c1;
        case 2: return c2;
        default: throw Error(ErrorKind::InvalidInput, "curvature index must be 0, 1 or 2");
    }
}

FunctionalSample make_sample(double r, double c2, double c1, std::int64_t c0, std::int64_t n_components,
                             std::int64_t n_holes) {
    if (!(r > 0.0)) throw Error(ErrorKind::InvalidInput, "sample radius must be > 0");
    FunctionalSample s;
    s.r = r;
    s.x = 0.0 - std::log(r);  // no negative zero at r = 1
    s.c2 = c2;
    s.c1 = c1;
    s.c0 = c0;
    s.n_components = n_components;
    s.n_holes = n_holes;
    s.c0var = n_components + n_holes;
    const std::array<double, 3> var{static_cast<double>(s.c0var), c1, c2};
    for (int k = 0; k < 3; ++k)
        if (var[k] > 0.0) s.y[k] = std::log(var[k]) - k * std::log(r);
    return s;
}

FunctionalSample measure_sample(const BinaryImage& dilated, double r) {
    const auto hist = configuration_histogram(dilated);
    const auto ch = components_and_holes(dilated);
    return make_sample(r, static_cast<double>(area(dilated)), boundary_from_histogram(hist),
                       ch.components - ch.holes, ch.components, ch.holes);
}

FunctionalProfile measure_profile(const DistanceField& field, std::span<const double> radii,
                                  const ProfileOptions& opts) {
    for (std::size_t i = 1; i < radii.size(); ++i)
        if (!(radii[i] > radii[i - 1])) throw Error(ErrorKind::InvalidInput, "radii must be strictly increasing");

    FunctionalProfile profile;
    const unsigned threads = std::max(1u, opts.threads);
    auto run_one = [&](std::size_t i) { return measure_sample(dilate(field, radii[i]), radii[i]); };

    // Work proceeds in batches of `threads` radii so that a break stops the scan early.
    for (std::size_t start = 0; start < radii.size(); start += threads) {
        const std::size_t stop = std::min(radii.size(), start + threads);
        std::vector<FunctionalSample> batch(stop - start);
        if (threads == 1) {
            batch[0] = run_one(start);
        } else {
            std::vector<std::thread> pool;
            for (std::size_t i = start; i < stop; ++i)
                pool.emplace_back([&, i] { batch[i - start] = run_one(i); });
            for (auto& t : pool) t.join();
        }
        for (auto& s : batch) {
            const bool hit = opts.brk && s.c0var <= 2;
            profile.samples.push_back(std::move(s));
            if (hit) {
                profile.truncated_by_break = true;
                return profile;
            }
        }
    }
    return profile;
}

FunctionalProfile measure_profile(const DistanceField& field, const RadiusSchedule& schedule, bool brk) {
    return measure_profile(field, schedule.radii, ProfileOptions{brk, 1});
}

void write_profile_csv(std::ostream& out, const FunctionalProfile& profile) {
    out << "r,x,c2,c1,c0,N,Q,c0var,y2,y1,y0\n" << std::setprecision(12);
    for (const auto& s : profile.samples) {
        out << s.r << ',' << s.x << ',' << s.c2 << ',' << s.c1 << ',' << s.c0 << ',' << s.n_components << ','
            << s.n_holes << ',' << s.c0var;
        for (int k = 2; k >= 0; --k) {
            out << ',';
            if (s.y[k]) out << *s.y[k];
        }
        out << '\n';
    }
    out << "# truncated_by_break=" << (profile.truncated_by_break ? "true" : "false") << '\n';
}

FunctionalProfile read_profile_csv(std::istream& in) {
    FunctionalProfile profile;
    std::string line;
    bool header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (line.find("truncated_by_break=true") != std::string::npos) profile.truncated_by_break = true;
            continue;
        }
        if (!header) {
            if (line.rfind("r,x,c2,c1,c0,N,Q", 0) != 0)
                throw Error(ErrorKind::Parse, "profile CSV: unexpected header '" + line + "'");
            header = true;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 7)
            throw Error(ErrorKind::Parse, "profile CSV: too few columns on line " + std::to_string(line_no));
        try {
            profile.samples.push_back(make_sample(std::stod(cells[0]), std::stod(cells[2]), std::stod(cells[3]),
                                                  std::stoll(cells[4]), std::stoll(cells[5]), std::stoll(cells[6])));
        } catch (const std::logic_error&) {
            throw Error(ErrorKind::Parse, "profile CSV: bad number on line " + std::to_string(line_no));
        }
    }
    if (!header) throw Error(ErrorKind::Parse, "profile CSV: missing header");
    for (std::size_t i = 1; i < profile.samples.size(); ++i)
        if (!(profile.samples[i].r > profile.samples[i - 1].r))
            throw Error(ErrorKind::Parse, "profile CSV: radii not strictly increasing");
    return profile;
}

}  // namespace fracurv
