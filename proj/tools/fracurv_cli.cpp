// Command-line front end: generate, measure, estimate, theory, radii.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fracurv/error.hpp"
#include "fracurv/estimators.hpp"
#include "fracurv/ifs.hpp"
#include "fracurv/minkowski.hpp"
#include "fracurv/raster.hpp"
#include "fracurv/theory.hpp"

namespace fs = std::filesystem;
using namespace fracurv;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidInput: return kExitUsage;
        case ErrorKind::InsufficientData:
        case ErrorKind::SingularDesign:
        case ErrorKind::Divergence: return kExitNumeric;
        default: return kExitData;
    }
}

std::string catalog_names() {
    std::string out;
    for (auto id : all_sample_sets()) {
        if (!out.empty()) out += ", ";
        out += sample_set_name(id);
    }
    return out;
}

SampleSetId require_set(const std::string& name) {
    if (auto id = parse_sample_set(name)) return *id;
    throw Error(ErrorKind::InvalidInput, "unknown set '" + name + "'; catalog: " + catalog_names());
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
    return out;
}

std::ifstream open_in(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + p.string());
    return in;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string set;
    std::string ifs_file;
    int size = 512;
    std::uint64_t seed = 1;
    std::size_t points = 0;
    std::string out;
    bool ascii = false;
};

int run_generate(const GenerateArgs& a) {
    if (a.size < 16) throw Error(ErrorKind::InvalidInput, "--size must be >= 16");
    if (a.set.empty() == a.ifs_file.empty()) throw Error(ErrorKind::InvalidInput, "give exactly one of --set or --ifs");
    std::optional<IteratedFunctionSystem> ifs;
    if (!a.set.empty()) {
        ifs = catalog(require_set(a.set));
    } else {
        auto in = open_in(a.ifs_file);
        ifs = read_ifs(in, fs::path(a.ifs_file).stem().string());
    }
    ChaosGameOptions opts;
    opts.width = opts.height = a.size;
    opts.seed = a.seed;
    opts.n_points = a.points;
    const auto res = chaos_game(*ifs, opts);
    save_pbm(res.image, a.out, a.ascii);

    const auto ratios = ifs->ratios();
    auto meta = open_out(a.out + ".meta");
    meta << std::setprecision(12) << "ifs=" << ifs->name() << '\n'
         << "seed=" << a.seed << '\n'
         << "rng=" << kChaosGameRng << '\n'
         << "n_points=" << res.n_points << '\n'
         << "width=" << a.size << '\n'
         << "height=" << a.size << '\n'
         << "s=" << res.dimension << '\n'
         << "arithmetic=" << to_string(arithmetic_class(ratios)) << '\n'
         << "scale=" << res.framing.scale << '\n';
    std::cout << "wrote " << a.out << " (" << res.image.foreground_count() << " foreground pixels, s=" << std::setprecision(6)
              << res.dimension << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct MeasureArgs {
    std::string image;
    std::string out;
    bool quick = false;
    bool brk = true;
    double r_min = kDefaultRMin;
    double step = kDefaultStep;
    std::optional<double> r_max;
    unsigned threads = 1;
};

int run_measure(const MeasureArgs& a) {
    const auto img = load_pbm(a.image);
    const auto field = distance_transform(img);
    const auto sched = a.quick ? quick_schedule(img.width(), img.height(), a.r_max)
                               : default_radii(img.width(), img.height(), a.r_min, a.step, a.r_max);
    const auto profile = measure_profile(field, sched.radii, ProfileOptions{a.brk, a.threads});
    auto out = open_out(a.out);
    write_profile_csv(out, profile);
    if (a.brk && !profile.truncated_by_break)
        std::cerr << "warning: N+Q never dropped to 2; the largest radius might already have grown too big\n";
    std::cout << "wrote " << a.out << " (" << profile.samples.size() << " radii)\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
    std::string profile;
    std::string out_dir = ".";
    bool use_euler = false;
    bool use_bdlength = true;
    bool use_area = true;
    std::optional<double> scale;
    std::string image;
    std::uint64_t seed = 1;
};

std::string flags_string(UseFlags u) {
    std::string s;
    if (u.euler) s += "euler";
    if (u.boundary) s += s.empty() ? "boundary" : "+boundary";
    if (u.area) s += s.empty() ? "area" : "+area";
    return s;
}

int run_estimate(const EstimateArgs& a) {
    const UseFlags use{a.use_euler, a.use_bdlength, a.use_area};
    if (use.count() == 0) throw Error(ErrorKind::InvalidInput, "enable at least one of the use flags");
    auto in = open_in(a.profile);
    const auto profile = read_profile_csv(in);

    std::vector<EstimateRow> rows;
    rows.push_back({"sausage", sausage_dimension(profile), "area vs r"});
    const auto reg = joint_regression(profile, use);
    rows.push_back({"joint", reg.s_hat, flags_string(use)});
    for (int k = 0; k < 3; ++k)
        if (reg.d_hat[k]) rows.push_back({"D" + std::to_string(k), *reg.d_hat[k], "intercept"});
    rows.push_back({"residual", reg.residual, "m=" + std::to_string(reg.m)});

    const auto ce = gamma_estimates(profile, reg.s_hat);
    for (int k = 0; k < 3; ++k) {
        rows.push_back({"gamma" + std::to_string(k), ce.gamma[k], "pixel scale"});
        if (a.scale)
            rows.push_back({"gamma" + std::to_string(k) + "_unit", ce.gamma[k] / std::pow(*a.scale, reg.s_hat),
                            "reference edge 1"});
    }
    if (ce.xi0) rows.push_back({"xi0", *ce.xi0, ""});
    if (ce.xi1) rows.push_back({"xi1", *ce.xi1, ""});
    if (!ce.xi0) std::cerr << "warning: gamma2 <= 0, specific curvatures undefined\n";

    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);
    if (!a.image.empty()) {
        const auto img = load_pbm(a.image);
        const auto box = box_dimension(img);
        rows.push_back({"box", box.dimension, std::to_string(box.deltas.size()) + " sizes"});
        LocalDimOptions lo;
        lo.seed = a.seed;
        const auto ld = local_dimension(img, lo);
        rows.push_back({"local_dim_mean", ld.mean, "n_sample=" + std::to_string(ld.n_sample)});
        rows.push_back({"local_dim_mode", ld.mode_bin, "bin left edge"});
        if (ld.saturated) std::cerr << "warning: n_sample exceeds 10x the foreground count\n";
        auto hist = open_out(dir / "histogram.csv");
        write_histogram_csv(hist, ld);
        std::vector<int> sizes;
        for (int r = 1; r <= std::min(img.width(), img.height()) / 4; r *= 2) sizes.push_back(r);
        for (const auto& p : gliding_box_lacunarity(img, sizes))
            rows.push_back({"lacunarity", p.lambda, "r=" + std::to_string(p.r)});
    }

    auto est = open_out(dir / "estimates.csv");
    write_estimates_csv(est, rows);
    auto plot = open_out(dir / "yk_vs_x.dat");
    write_yk_plot(plot, profile);
    std::cout << "s_hat=" << std::setprecision(6) << reg.s_hat << " (" << flags_string(use) << "), wrote "
              << (dir / "estimates.csv").string() << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct TheoryArgs {
    std::string set;
    std::vector<std::string> scaling;
    std::vector<double> ratios;
    std::optional<double> rescale;
};

int run_theory(const TheoryArgs& a) {
    TheoreticalCurvatures t;
    if (!a.scaling.empty()) {
        if (a.scaling.size() != 3 || a.ratios.empty())
            throw Error(ErrorKind::InvalidInput, "--scaling needs three CSV files (R0,R1,R2) and --ratios");
        std::vector<PiecewisePoly> rk;
        for (const auto& f : a.scaling) {
            auto in = open_in(f);
            rk.push_back(read_scaling_csv(in));
        }
        t = curvatures_from_scaling(rk, a.ratios);
    } else if (!a.set.empty()) {
        t = reference_curvatures(require_set(a.set));
    } else {
        throw Error(ErrorKind::InvalidInput, "give --set or --scaling");
    }

    std::cout << "quantity,value\n" << std::setprecision(12);
    std::cout << "s," << t.s << "\neta," << t.eta << '\n';
    for (int k = 0; k < 3; ++k) std::cout << 'X' << k << ',' << t.x[k] << '\n';
    if (t.x[2] > 0.0) std::cout << "Xi0," << t.x[0] / t.x[2] << "\nXi1," << t.x[1] / t.x[2] << '\n';
    if (a.rescale)
        for (int k = 0; k < 3; ++k)
            std::cout << 'X' << k << "_rescaled," << rescale_curvature(t.x[k], *a.rescale, t.s) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct RadiiArgs {
    double max = 6.0;
    bool all = false;
    double margin = 0.05;
};

int run_radii(const RadiiArgs& a) {
    const auto radii = a.all ? optimal_area_radii(a.max) : stable_optimal_area_radii(a.max, a.margin);
    std::cout << "r,area\n" << std::setprecision(6);
    for (const auto& r : radii) std::cout << r.r << ',' << r.area << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractal dimension and curvature estimation on binary images"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Render a self-similar set with the chaos game");
    g->add_option("--set", gen.set, "Catalog set: " + catalog_names());
    g->add_option("--ifs", gen.ifs_file, "IFS text file (ratio rotation_deg reflect tx ty per line)");
    g->add_option("--size", gen.size, "Image width and height")->capture_default_str();
    g->add_option("--seed", gen.seed, "RNG seed")->capture_default_str();
    g->add_option("--points", gen.points, "Number of iterates (0: automatic)");
    g->add_option("--out", gen.out, "Output PBM")->required();
    g->add_flag("--ascii", gen.ascii, "Write P1 instead of P4");

    MeasureArgs mea;
    auto* m = app.add_subcommand("measure", "Dilate over a radius schedule and record Minkowski functionals");
    m->add_option("--image", mea.image, "Input PBM")->required();
    m->add_option("--out", mea.out, "Profile CSV")->required();
    m->add_flag("--quick-evaluate", mea.quick, "Use the thinned optimal-area radii");
    m->add_option("--brk", mea.brk, "Stop once N+Q <= 2")->capture_default_str();
    m->add_option("--r-min", mea.r_min, "Smallest radius")->capture_default_str();
    m->add_option("--step", mea.step, "Radius ratio between steps")->capture_default_str();
    m->add_option("--r-max", mea.r_max, "Largest radius (default max(0.06 min(w,h), 20))");
    m->add_option("--threads", mea.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);

    EstimateArgs est;
    auto* e = app.add_subcommand("estimate", "Dimension and curvature estimates from a profile CSV");
    e->add_option("--profile", est.profile, "Profile CSV from measure")->required();
    e->add_option("--out-dir", est.out_dir, "Output directory")->capture_default_str();
    e->add_option("--use-euler", est.use_euler, "Include y0")->capture_default_str();
    e->add_option("--use-bdlength", est.use_bdlength, "Include y1")->capture_default_str();
    e->add_option("--use-area", est.use_area, "Include y2")->capture_default_str();
    e->add_option("--scale", est.scale, "Pixels per model unit, to report curvatures at reference edge 1");
    e->add_option("--image", est.image, "PBM for box counting, local dimension and lacunarity");
    e->add_option("--seed", est.seed, "Seed for local dimension sampling")->capture_default_str();

    TheoryArgs th;
    auto* t = app.add_subcommand("theory", "Exact fractal curvatures");
    t->add_option("--set", th.set, "Set with known values: gasket, carpet, modcarpet, triangle");
    t->add_option("--scaling", th.scaling, "Three scaling-function CSVs R0 R1 R2")->expected(3);
    t->add_option("--ratios", th.ratios, "Contraction ratios for --scaling");
    t->add_option("--rescale", th.rescale, "Also print values scaled by lambda^s");

    RadiiArgs ra;
    auto* r = app.add_subcommand("radii", "Optimal-area radii");
    r->add_option("--max", ra.max, "Largest radius")->capture_default_str();
    r->add_flag("--all", ra.all, "Every zero, including those close to a jump of the discrete area");
    r->add_option("--margin", ra.margin, "Minimum distance to a jump")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*g) return run_generate(gen);
        if (*m) return run_measure(mea);
        if (*e) return run_estimate(est);
        if (*t) return run_theory(th);
        if (*r) return run_radii(ra);
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << '\n';
        return exit_code(err.kind());
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}
