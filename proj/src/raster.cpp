#include "fracurv/raster.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include "fracurv/error.hpp"

namespace fracurv {

BinaryImage::BinaryImage(int width, int height) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw Error(ErrorKind::InvalidInput, "negative image size");
    bits_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
}

std::size_t BinaryImage::foreground_count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

DistanceField::DistanceField(int width, int height, std::vector<std::int64_t> d2)
    : width_(width), height_(height), d2_(std::move(d2)) {
    if (d2_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw Error(ErrorKind::InvalidInput, "distance field size mismatch");
    }
}

// ---------------------------------------------------------------------------
// PBM

namespace {

class PbmCursor {
public:
    explicit PbmCursor(const std::string& buf) : buf_(buf) {}

    std::size_t pos() const { return pos_; }
    bool done() const { return pos_ >= buf_.size(); }

    void skip_space_and_comments() {
        while (pos_ < buf_.size()) {
            const char c = buf_[pos_];
            if (c == '#') {
                while (pos_ < buf_.size() && buf_[pos_] != '\n') ++pos_;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    int read_positive_int(const char* what) {
        skip_space_and_comments();
        const std::size_t start = pos_;
        long long v = 0;
        while (pos_ < buf_.size() && std::isdigit(static_cast<unsigned char>(buf_[pos_]))) {
            v = v * 10 + (buf_[pos_] - '0');
            if (v > (1LL << 30)) throw ParseError(start, std::string("PBM ") + what + " too large");
            ++pos_;
        }
        if (pos_ == start) throw ParseError(start, std::string("PBM: expected ") + what);
        if (v <= 0) throw ParseError(start, std::string("PBM ") + what + " must be positive");
        return static_cast<int>(v);
    }

    char peek() const { return buf_[pos_]; }
    char get() { return buf_[pos_++]; }

private:
    const std::string& buf_;
    std::size_t pos_ = 0;
};

}  // namespace

BinaryImage read_pbm(std::istream& in) {
    const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (buf.size() < 2 || buf[0] != 'P' || (buf[1] != '1' && buf[1] != '4')) {
        throw ParseError(0, "PBM: expected magic P1 or P4");
    }
    const bool ascii = buf[1] == '1';
    PbmCursor cur(buf);
    cur.get();
    cur.get();
    const int width = cur.read_positive_int("width");
    const int height = cur.read_positive_int("height");
    BinaryImage img(width, height);

    if (ascii) {
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                cur.skip_space_and_comments();
                if (cur.done()) throw ParseError(cur.pos(), "PBM: truncated pixel data");
                const char c = cur.get();
                if (c != '0' && c != '1') throw ParseError(cur.pos() - 1, "PBM: invalid pixel character");
                img.set(x, y, c == '1');
            }
        }
        return img;
    }

    if (cur.done() || !std::isspace(static_cast<unsigned char>(cur.peek()))) {
        throw ParseError(cur.pos(), "PBM: expected single whitespace before raster");
    }
    cur.get();
    const std::size_t row_bytes = (static_cast<std::size_t>(width) + 7) / 8;
    const std::size_t start = cur.pos();
    if (buf.size() - start < row_bytes * height) {
        throw ParseError(buf.size(), "PBM: truncated raster, expected " + std::to_string(row_bytes * height) +
                                         " bytes");
    }
    for (int y = 0; y < height; ++y) {
        const auto* row = reinterpret_cast<const unsigned char*>(buf.data() + start + row_bytes * y);
        for (int x = 0; x < width; ++x) img.set(x, y, (row[x / 8] >> (7 - x % 8)) & 1);
    }
    return img;
}

BinaryImage load_pbm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    return read_pbm(in);
}

void write_pbm(std::ostream& out, const BinaryImage& img, bool ascii) {
    out << (ascii ? "P1" : "P4") << '\n' << img.width() << ' ' << img.height() << '\n';
    if (ascii) {
        for (int y = 0; y < img.height(); ++y) {
            const auto row = img.row(y);
            for (int x = 0; x < img.width(); ++x) {
                out << (row[x] ? '1' : '0');
                // keep lines under 70 characters
                out << ((x + 1) % 34 == 0 || x + 1 == img.width() ? '\n' : ' ');
            }
        }
        return;
    }
    const std::size_t row_bytes = (static_cast<std::size_t>(img.width()) + 7) / 8;
    std::string packed(row_bytes, '\0');
    for (int y = 0; y < img.height(); ++y) {
        std::fill(packed.begin(), packed.end(), '\0');
        const auto row = img.row(y);
        for (int x = 0; x < img.width(); ++x)
            if (row[x]) packed[x / 8] = static_cast<char>(packed[x / 8] | (0x80 >> (x % 8)));
        out.write(packed.data(), static_cast<std::streamsize>(packed.size()));
    }
}

void save_pbm(const BinaryImage& img, const std::filesystem::path& path, bool ascii) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
    write_pbm(out, img, ascii);
    if (!out) throw Error(ErrorKind::Io, "write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Distance transform

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

DistanceField distance_transform(const BinaryImage& img) {
    const int w = img.width();
    const int h = img.height();
    if (img.foreground_count() == 0) throw Error(ErrorKind::EmptyForeground, "image has no foreground pixels");

    const std::int64_t inf = static_cast<std::int64_t>(w) + h;
    std::vector<std::int64_t> g(static_cast<std::size_t>(w) * h);
    auto G = [&](int x, int y) -> std::int64_t& { return g[static_cast<std::size_t>(y) * w + x]; };

    // Column scans: distance to the nearest foreground pixel in the same column.
    for (int x = 0; x < w; ++x) {
        G(x, 0) = img.get(x, 0) ? 0 : inf;
        for (int y = 1; y < h; ++y) G(x, y) = img.get(x, y) ? 0 : std::min(inf, G(x, y - 1) + 1);
        for (int y = h - 2; y >= 0; --y)
            if (G(x, y + 1) < G(x, y)) G(x, y) = G(x, y + 1) + 1;
    }

    // Row scans: lower envelope of the parabolas (x - i)^2 + g(i)^2.
    std::vector<std::int64_t> d2(static_cast<std::size_t>(w) * h);
    std::vector<int> s(w);
    std::vector<std::int64_t> t(w);
    std::vector<std::int64_t> gr(w);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) gr[x] = G(x, y);
        auto f = [&](std::int64_t x, int i) { return (x - i) * (x - i) + gr[i] * gr[i]; };
        auto sep = [&](int i, int u) {
            return floor_div(std::int64_t(u) * u - std::int64_t(i) * i + gr[u] * gr[u] - gr[i] * gr[i],
                             2 * std::int64_t(u - i));
        };
        int q = 0;
        s[0] = 0;
        t[0] = 0;
        for (int u = 1; u < w; ++u) {
            while (q >= 0 && f(t[q], s[q]) > f(t[q], u)) --q;
            if (q < 0) {
                q = 0;
                s[0] = u;
            } else {
                const std::int64_t start = 1 + sep(s[q], u);
                if (start < w) {
                    ++q;
                    s[q] = u;
                    t[q] = start;
                }
            }
        }
        for (int u = w - 1; u >= 0; --u) {
            d2[static_cast<std::size_t>(y) * w + u] = f(u, s[q]);
            if (u == t[q]) --q;
        }
    }
    return DistanceField(w, h, std::move(d2));
}

std::int64_t squared_radius_threshold(double r) {
    if (!(r >= 0.0)) throw Error(ErrorKind::InvalidInput, "dilation radius must be >= 0");
    return static_cast<std::int64_t>(std::floor(r * r + 1e-9));
}

BinaryImage dilate(const DistanceField& field, double r) {
    const std::int64_t limit = squared_radius_threshold(r);
    BinaryImage out(field.width(), field.height());
    const auto src = field.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] <= limit ? 1 : 0;
    return out;
}

// ---------------------------------------------------------------------------
// Radii

std::int64_t discrete_disk_area(double r) {
    const std::int64_t limit = squared_radius_threshold(r);
    std::int64_t count = 0;
    for (std::int64_t x = 0; x * x <= limit; ++x) {
        std::int64_t y = static_cast<std::int64_t>(std::sqrt(static_cast<double>(limit - x * x)));
        while (y * y > limit - x * x) --y;
        while ((y + 1) * (y + 1) <= limit - x * x) ++y;
        count += (x == 0 ? 1 : 2) * (2 * y + 1);
    }
    return count;
}

namespace {

struct AreaZero {
    double r;
    std::int64_t area;
    double jump_below;  // radius of the discontinuity just below r
    double jump_above;  // radius of the next discontinuity
};

std::vector<AreaZero> area_zeros(double r_max) {
    if (r_max < 0) return {};
    const auto n_max = static_cast<std::int64_t>(std::ceil(r_max * r_max)) + 2;
    // Count lattice points by squared norm, then look for A(n) / pi in [n, next n).
    std::vector<std::int64_t> reps(static_cast<std::size_t>(n_max + 1), 0);
    for (std::int64_t x = -n_max; x <= n_max; ++x) {
        if (x * x > n_max) continue;
        for (std::int64_t y = -n_max; y <= n_max; ++y) {
            const std::int64_t n = x * x + y * y;
            if (n <= n_max) ++reps[static_cast<std::size_t>(n)];
        }
    }
    std::vector<std::int64_t> norms;
    for (std::int64_t n = 0; n <= n_max; ++n)
        if (reps[static_cast<std::size_t>(n)]) norms.push_back(n);

    std::vector<AreaZero> zeros;
    std::int64_t area = 0;
    for (std::size_t i = 0; i + 1 < norms.size(); ++i) {
        area += reps[static_cast<std::size_t>(norms[i])];
        const double r2 = static_cast<double>(area) / std::numbers::pi;
        if (r2 >= static_cast<double>(norms[i]) && r2 < static_cast<double>(norms[i + 1])) {
            const double r = std::sqrt(r2);
            if (r > r_max) break;
            zeros.push_back({r, area, std::sqrt(double(norms[i])), std::sqrt(double(norms[i + 1]))});
        }
    }
    return zeros;
}

}  // namespace

std::vector<OptimalRadius> optimal_area_radii(double r_max) {
    std::vector<OptimalRadius> out;
    for (const auto& z : area_zeros(r_max)) out.push_back({z.r, z.area});
    return out;
}

std::vector<OptimalRadius> stable_optimal_area_radii(double r_max, double margin) {
    std::vector<OptimalRadius> out;
    for (const auto& z : area_zeros(r_max))
        if (z.r - z.jump_below >= margin && z.jump_above - z.r >= margin) out.push_back({z.r, z.area});
    return out;
}

std::vector<double> quick_radii(double r_max) {
    const auto zeros = optimal_area_radii(r_max);
    std::vector<double> out;
    if (zeros.empty()) return out;
    out.push_back(zeros.front().r);
    std::size_t i = 0;
    while (true) {
        // Nearest zero (in log) to 1.5x the previous one, but never closer than 1.25x.
        const double target = 1.5 * out.back();
        std::size_t best = zeros.size();
        double best_err = 0.0;
        for (std::size_t j = i + 1; j < zeros.size(); ++j) {
            if (zeros[j].r < 1.25 * out.back()) continue;
            const double err = std::abs(std::log(zeros[j].r / target));
            if (best == zeros.size() || err < best_err) {
                best = j;
                best_err = err;
            }
            if (zeros[j].r > target) break;
        }
        if (best == zeros.size()) break;
        out.push_back(zeros[best].r);
        i = best;
    }
    return out;
}

double default_r_max(int width, int height) { return std::max(0.06 * std::min(width, height), 20.0); }

RadiusSchedule default_radii(int width, int height, double r_min, double step, std::optional<double> r_max_override) {
    if (!(step > 1.0)) throw Error(ErrorKind::InvalidInput, "radius step must be > 1");
    if (!(r_min > 0.0)) throw Error(ErrorKind::InvalidInput, "r_min must be > 0");
    RadiusSchedule sched;
    sched.policy = RadiusPolicy::Geometric;
    sched.r_min = r_min;
    sched.step = step;
    sched.r_max = r_max_override.value_or(default_r_max(width, height));
    for (int j = 0;; ++j) {
        const double r = r_min * std::pow(step, j);
        if (r > sched.r_max * (1.0 + 1e-12)) break;
        sched.radii.push_back(r);
    }
    return sched;
}

RadiusSchedule quick_schedule(int width, int height, std::optional<double> r_max_override) {
    RadiusSchedule sched;
    sched.policy = RadiusPolicy::QuickOptimalArea;
    sched.r_max = r_max_override.value_or(default_r_max(width, height));
    sched.radii = quick_radii(sched.r_max);
    sched.r_min = sched.radii.empty() ? 0.0 : sched.radii.front();
    sched.step = 1.5;
    return sched;
}

void write_radii_csv(std::ostream& out, std::span<const double> radii) {
    out << "r\n" << std::setprecision(12);
    for (double r : radii) out << r << '\n';
}

}  // namespace fracurv
