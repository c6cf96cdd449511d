#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fracurv/estimators.hpp"
#include "fracurv/minkowski.hpp"
#include "fracurv/raster.hpp"

namespace fs = std::filesystem;
using namespace fracurv;

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(FRACURV_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    Run r{-1, {}};
    if (!pipe) return r;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("fracurv_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenerateIsDeterministic) {
    ASSERT_EQ(run("generate --set gasket --size 16 --seed 1 --out " + path("a.pbm")).code, 0);
    ASSERT_EQ(run("generate --set gasket --size 16 --seed 1 --out " + path("b.pbm")).code, 0);
    EXPECT_EQ(slurp(path("a.pbm")), slurp(path("b.pbm")));
    EXPECT_EQ(load_pbm(path("a.pbm")).width(), 16);
}

TEST_F(Cli, GenerateSidecar) {
    ASSERT_EQ(run("generate --set carpet --size 729 --seed 7 --out " + path("c.pbm")).code, 0);
    const auto meta = slurp(path("c.pbm.meta"));
    EXPECT_NE(meta.find("s=1.8927"), std::string::npos) << meta;
    EXPECT_NE(meta.find("seed=7"), std::string::npos);
    EXPECT_NE(meta.find("arithmetic(h=1.0986"), std::string::npos);
    EXPECT_NE(meta.find("rng=mt19937_64"), std::string::npos);
    EXPECT_EQ(load_pbm(path("c.pbm")).width(), 729);
}

TEST_F(Cli, UnknownSetIsUsageError) {
    const auto r = run("generate --set dragon --size 32 --out " + path("d.pbm"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.out.find("gasket"), std::string::npos);
    EXPECT_EQ(run("generate --set gasket --size 8 --out " + path("d.pbm")).code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, MeasureDisk) {
    BinaryImage img(64, 64);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) img.set(x, y, (x - 32) * (x - 32) + (y - 32) * (y - 32) <= 100);
    save_pbm(img, path("disk.pbm"));
    ASSERT_EQ(run("measure --image " + path("disk.pbm") + " --out " + path("p.csv")).code, 0);
    std::ifstream in(path("p.csv"));
    const auto prof = read_profile_csv(in);
    ASSERT_FALSE(prof.samples.empty());
    EXPECT_EQ(prof.samples[0].n_components, 1);
    EXPECT_EQ(prof.samples[0].n_holes, 0);
}

TEST_F(Cli, MeasureMissingImageIsDataError) {
    EXPECT_EQ(run("measure --image " + path("none.pbm") + " --out " + path("p.csv")).code, 3);
}

TEST_F(Cli, PipelineMatchesInProcess) {
    ASSERT_EQ(run("generate --set carpet --size 243 --seed 3 --out " + path("c.pbm")).code, 0);
    const auto m = run("measure --image " + path("c.pbm") + " --out " + path("p.csv") + " --threads 2");
    ASSERT_EQ(m.code, 0) << m.out;
    const auto e = run("estimate --profile " + path("p.csv") + " --out-dir " + path("est"));
    ASSERT_EQ(e.code, 0) << e.out;

    const auto img = load_pbm(path("c.pbm"));
    const auto prof = measure_profile(distance_transform(img), default_radii(243, 243).radii);
    EXPECT_GE(prof.samples.size(), 20u);
    const auto reg = joint_regression(prof, kJoint2);

    std::ifstream est(path("est/estimates.csv"));
    std::string line;
    bool found = false;
    while (std::getline(est, line)) {
        if (line.rfind("joint,", 0) == 0) {
            const double v = std::stod(line.substr(6));
            EXPECT_NEAR(v, reg.s_hat, 1e-9);
            found = true;
        }
    }
    EXPECT_TRUE(found);
    EXPECT_TRUE(fs::exists(path("est/yk_vs_x.dat")));
}

TEST_F(Cli, EstimateWithoutEulerAndWithImage) {
    ASSERT_EQ(run("generate --set tree --size 128 --seed 2 --out " + path("t.pbm")).code, 0);
    ASSERT_EQ(run("measure --image " + path("t.pbm") + " --out " + path("p.csv")).code, 0);
    const auto e = run("estimate --profile " + path("p.csv") + " --use-euler=false --image " + path("t.pbm") +
                       " --out-dir " + path("est"));
    ASSERT_EQ(e.code, 0) << e.out;
    const auto est = slurp(path("est/estimates.csv"));
    EXPECT_EQ(est.find("D0,"), std::string::npos);
    EXPECT_NE(est.find("box,"), std::string::npos);
    EXPECT_NE(est.find("local_dim_mean,"), std::string::npos);
    EXPECT_TRUE(fs::exists(path("est/histogram.csv")));

    EXPECT_EQ(run("estimate --profile " + path("p.csv") +
                  " --use-area=false --use-bdlength=false --out-dir " + path("est"))
                  .code,
              2);
}

TEST_F(Cli, TheoryTriangle) {
    const auto r = run("theory --set triangle --rescale 2920");
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("X0,-0.02345910"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("X1,0.23931291"), std::string::npos);
    const auto pos = r.out.find("X2_rescaled,");
    ASSERT_NE(pos, std::string::npos);
    const double expect = 1.1621688453 * std::pow(2920.0, 1.588161539);
    EXPECT_NEAR(std::stod(r.out.substr(pos + 12)) / expect, 1.0, 1e-6);
}

TEST_F(Cli, TheoryWithoutFixture) { EXPECT_EQ(run("theory --set tree").code, 3); }

TEST_F(Cli, TheoryFromScalingFiles) {
    for (int k = 0; k < 3; ++k) {
        std::ofstream out(path("r" + std::to_string(k) + ".csv"));
        out << "b_lo,b_hi,c0,c1,c2\n0,1," << (k == 0 ? "1,0,0" : k == 1 ? "0,1,0" : "0,0,1") << "\n";
    }
    const auto r = run("theory --scaling " + path("r0.csv") + " " + path("r1.csv") + " " + path("r2.csv") +
                       " --ratios 0.5 0.5 0.5");
    ASSERT_EQ(r.code, 0) << r.out;
    // Each integrand is e^(s-1): integral 1/s over eta = log 2.
    const double expect = 1.0 / (std::log(3.0) / std::log(2.0)) / std::log(2.0);
    const auto pos = r.out.find("X2,");
    ASSERT_NE(pos, std::string::npos);
    EXPECT_NEAR(std::stod(r.out.substr(pos + 3)), expect, 1e-10);
}

TEST_F(Cli, RadiiList) {
    const auto r = run("radii --max 6");
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "r,area");
    const int areas[] = {1, 5, 9, 21, 37, 45, 61, 69, 89};
    for (int a : areas) {
        ASSERT_TRUE(std::getline(in, line));
        EXPECT_EQ(std::stoi(line.substr(line.find(',') + 1)), a);
    }
}
