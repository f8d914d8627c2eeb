#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

#include "anisoflow/cli.hpp"
#include "anisoflow/io.hpp"
#include "test_support.hpp"

using namespace anisoflow;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("anisoflow_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }

    void write_image(const std::string& name, const ScalarField& f) {
        save_pgm(image_from_field(f), dir_ / name, 65535);
    }

    fs::path write_config(const std::string& body) {
        fs::path p = dir_ / "run.cfg";
        write_file_atomic(p, body);
        return p;
    }

    int cli(std::vector<std::string> args) {
        out_.str("");
        err_.str("");
        return run_cli(args, out_, err_);
    }

    fs::path dir_;
    std::ostringstream out_, err_;
};

const char* kBaseConfig =
    "kappa = 2\nmu = 0.001\nnu = 0.01\nlambda = 5\np = 3\ntau = 0.01\nt_final = 0.03\n"
    "anisotropy = smoothed-l1\nepsilon = 0.1\ninput = noisy.pgm\noutput_dir = out\n";

}  // namespace

TEST_F(CliTest, DenoiseWritesOutputs) {
    write_image("noisy.pgm", testsupport::noisy_bump(10, 1));
    fs::path cfg = write_config(kBaseConfig);
    ASSERT_EQ(cli({"denoise", "--config", cfg.string()}), 0) << err_.str();
    for (const char* name : {"u_final.pgm", "alpha_final.pgm", "alpha_final.range", "energy_trace.csv", "run_report.txt"})
        EXPECT_TRUE(fs::exists(dir_ / "out" / name)) << name;
    auto rows = parse_energy_trace_csv(read_file(dir_ / "out" / "energy_trace.csv"));
    ASSERT_EQ(rows.size(), 4u);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i].energy.total, rows[i - 1].energy.total);
    ImageBuffer u = load_pgm(dir_ / "out" / "u_final.pgm");
    EXPECT_EQ(u.width, 10);
}

TEST_F(CliTest, DenoiseOfZeroImageHasZeroTrace) {
    write_image("noisy.pgm", ScalarField(GridSpec::unit_square(6, 6)));
    fs::path cfg = write_config(kBaseConfig);
    ASSERT_EQ(cli({"denoise", "-c", cfg.string()}), 0) << err_.str();
    for (const auto& row : parse_energy_trace_csv(read_file(dir_ / "out" / "energy_trace.csv")))
        EXPECT_EQ(row.energy.total, 0.0);
}

TEST_F(CliTest, ValidationFailureNamesAssumption) {
    write_image("noisy.pgm", testsupport::noisy_bump(6, 2));
    fs::path cfg = write_config(std::string(kBaseConfig) + "# bad\n" + "unused = 1\n");
    EXPECT_EQ(cli({"denoise", "--config", cfg.string()}), 1);
    cfg = write_config("p = 2\ninput = noisy.pgm\n");
    EXPECT_EQ(cli({"denoise", "--config", cfg.string()}), 1);
    EXPECT_NE(err_.str().find("(A0)"), std::string::npos);
    EXPECT_NE(err_.str().find("p > 2"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(CliTest, MissingFilesAreIoErrors) {
    fs::path cfg = write_config(kBaseConfig);
    EXPECT_EQ(cli({"denoise", "--config", cfg.string()}), 3);
    EXPECT_EQ(cli({"denoise", "--config", (dir_ / "absent.cfg").string()}), 3);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(cli({}), 1);
    EXPECT_EQ(cli({"frobnicate"}), 1);
    EXPECT_EQ(cli({"denoise"}), 1);
    EXPECT_EQ(cli({"--help"}), 0);
}

TEST_F(CliTest, ConvergenceFailureExitCode) {
    write_image("noisy.pgm", testsupport::noisy_bump(8, 3));
    fs::path cfg = write_config(std::string(kBaseConfig) + "max_outer = 1\nmax_inner = 1\ntol_res = 1e-14\n");
    EXPECT_EQ(cli({"denoise", "--config", cfg.string()}), 2);
}

TEST_F(CliTest, SeparateInitialImage) {
    write_image("noisy.pgm", testsupport::noisy_bump(6, 4));
    write_image("start.pgm", ScalarField(GridSpec::unit_square(6, 6), 0.5));
    write_image("small.pgm", ScalarField(GridSpec::unit_square(5, 6), 0.5));
    fs::path cfg = write_config(kBaseConfig);
    EXPECT_EQ(cli({"denoise", "--config", cfg.string(), "--u0", (dir_ / "start.pgm").string()}), 0) << err_.str();
    EXPECT_EQ(cli({"denoise", "--config", cfg.string(), "--u0", (dir_ / "small.pgm").string()}), 1);
    EXPECT_NE(err_.str().find("(A3)"), std::string::npos);
}

TEST_F(CliTest, InitOrientation) {
    write_image("noisy.pgm", testsupport::diagonal_ramp(8));
    fs::path cfg = write_config(kBaseConfig);
    ASSERT_EQ(cli({"init-orientation", "--config", cfg.string(), "--multistart", "2"}), 0) << err_.str();
    EXPECT_TRUE(fs::exists(dir_ / "out" / "alpha0.pgm"));
    EXPECT_TRUE(fs::exists(dir_ / "out" / "alpha0.range"));
    EXPECT_NE(read_file(dir_ / "out" / "alpha0_report.txt").find("residual"), std::string::npos);
}

TEST_F(CliTest, CheckConditionsWorkedCase) {
    write_image("noisy.pgm", ScalarField(GridSpec::unit_square(4, 4)));
    fs::path cfg = write_config(
        "kappa = 1\nmu = 1\nnu = 1\nlambda = 1\np = 3\ntau = 1\nt_final = 1\n"
        "c_poincare = 1\nc_sob_1 = 1\nc_sob_2 = 1\ngamma_w1inf = 1\ninput = noisy.pgm\noutput_dir = out\n");
    ASSERT_EQ(cli({"check-conditions", "--config", cfg.string()}), 0) << err_.str();
    const std::string csv = read_file(dir_ / "out" / "conditions.csv");
    const auto at = csv.find("\nkappa_hat,");
    ASSERT_NE(at, std::string::npos);
    const double kh = std::stod(csv.substr(at + 11));
    EXPECT_NEAR(kh, 128 * std::numbers::sqrt2, 1e-12 * kh);
    EXPECT_NE(csv.find("\nc1,0.0000000000000000e+00"), std::string::npos);
    EXPECT_NE(csv.find("\nc1_proof,"), std::string::npos);
    EXPECT_NE(csv.find("\nkappa_ok,0.0"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir_ / "out" / "conditions.txt"));
}

TEST_F(CliTest, TwinRun) {
    write_image("noisy.pgm", testsupport::noisy_bump(8, 5));
    fs::path cfg = write_config(kBaseConfig);
    ASSERT_EQ(cli({"twin-run", "--config", cfg.string(), "--perturb", "1e-3"}), 0) << err_.str();
    EXPECT_NE(read_file(dir_ / "out" / "j_trace.csv").find("step,t,J,alpha_gap"), std::string::npos);
    EXPECT_NE(out_.str().find("stability_ratio"), std::string::npos);
    EXPECT_EQ(cli({"twin-run", "--config", cfg.string(), "--perturb", "0.5"}), 1);
}

TEST_F(CliTest, SelftestBinaryExitsZero) {
    const std::string cmd = std::string(ANISOFLOW_CLI_PATH) + " selftest > " + (dir_ / "log").string();
    const int status = std::system(cmd.c_str());
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 0) << read_file(dir_ / "log");
}
