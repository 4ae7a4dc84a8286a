#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "banach_ar1/errors.hpp"
#include "banach_ar1/harness.hpp"

#include <fstream>
#include <sstream>

using namespace banach_ar1;
using namespace banach_ar1::harness;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("banach_ar1_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

ExperimentConfig small_config() {
    return parse_config_text(
        "modes = 10\n"
        "grid_len = 256\n"
        "sample_sizes = 200, 800\n"
        "replications = 10\n"
        "kernel_points = 6\n");
}

}  // namespace

TEST_CASE("empty config gives the documented defaults") {
    const auto cfg = parse_config_text("");
    CHECK(cfg.model.beta_exponent == 0.6);
    CHECK(cfg.model.gamma == 1.21);
    CHECK(cfg.model.width == 0.4);
    CHECK(cfg.model.modes == 50);
    CHECK(cfg.model.grid_len == 2048);
    CHECK(cfg.wavelet.order == 10);
    CHECK(cfg.wavelet.coarse_level == 2);
    CHECK(cfg.wavelet.max_level == 10);
    CHECK(cfg.truncation.kind == estimation::TruncationRule::Kind::LogCeil);
    CHECK(cfg.initial_condition == InitialCondition::TruncatedGaussian);
    CHECK(cfg.effective_burn_in() == 0);
    CHECK_FALSE(cfg.spline_mode);
    CHECK(cfg.coarse_step == 0.0372);
}

TEST_CASE("config keys and comments") {
    const auto cfg = parse_config_text(
        "# header\n"
        "replications = 250   # trailing comment\n"
        "  truncation = fixed:6\n"
        "initial_condition = zero\n"
        "seed = 18446744073709551615\n"
        "grid_len = 512\n"
        "sample_sizes = 10,20, 40\n"
        "spline_mode = yes\n");
    CHECK(cfg.replications == 250);
    CHECK(cfg.truncation.kind == estimation::TruncationRule::Kind::Fixed);
    CHECK(cfg.truncation.fixed == 6);
    CHECK(cfg.effective_burn_in() == 500);
    CHECK(cfg.master_seed == 18446744073709551615ULL);
    CHECK(cfg.model.seed == cfg.master_seed);
    CHECK(cfg.wavelet.max_level == 8);
    CHECK(cfg.sample_sizes == std::vector<int>{10, 20, 40});
    CHECK(cfg.spline_mode);
}

TEST_CASE("config errors carry line numbers") {
    const auto expect_error = [](const std::string& text, const std::string& fragment) {
        try {
            parse_config_text(text, "cfg");
            FAIL("expected ConfigError for: " << text);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(fragment) != std::string::npos);
        }
    };
    expect_error("beta = 0.3\n", "cfg:1:");
    expect_error("\n\nbogus = 1\n", "cfg:3: unknown key");
    expect_error("replications\n", "cfg:1:");
    expect_error("replications = ten\n", "expects an integer");
    expect_error("grid_len = 1000\n", "power of two");
    expect_error("sample_sizes = 100, 50\n", "ascending");
    expect_error("truncation = sqrt\n", "truncation");
    expect_error("grid_len = 256\nmax_level = 9\n", "2^(max_level+1)");
    CHECK_THROWS_AS(parse_config("/nonexistent/file.cfg"), ConfigError);
}

TEST_CASE("replication seeds are distinct and stable") {
    CHECK(replication_seed(1, 100, 0) == replication_seed(1, 100, 0));
    CHECK(replication_seed(1, 100, 0) != replication_seed(1, 100, 1));
    CHECK(replication_seed(1, 100, 0) != replication_seed(1, 200, 0));
    CHECK(replication_seed(1, 100, 0) != replication_seed(2, 100, 0));
}

TEST_CASE("model gate") {
    auto cfg = parse_config_text("modes = 10\ngrid_len = 256\n");
    const auto setup = build_model(cfg);
    CHECK(setup.stationarity.holds);
    CHECK(setup.tail_mass > 0.0);
    CHECK(setup.trace.modes == 10);
    cfg.j0_max = 1;
    cfg.model.width = 5.0;  // off-diagonal entries near 1 make ||rho^j|| blow up
    CHECK_THROWS_AS(build_model(cfg), ModelGateError);
}

TEST_CASE("smoke run emits every table") {
    const auto cfg = small_config();
    const auto out = run_experiment(cfg, 2);
    REQUIRE(out.results.size() == 20);
    for (std::size_t i = 0; i < out.results.size(); ++i) {
        CHECK(out.results[i].n == (i < 10 ? 200 : 800));
        CHECK(out.results[i].replication == static_cast<int>(i % 10));
        CHECK(out.results[i].error_B >= 0.0);
    }
    for (const auto& r : out.reports) {
        CHECK(r.xi > 0.0);
        CHECK(r.xi < 1.0);
        CHECK(std::isfinite(r.ratio));
    }
    CHECK(out.kernel.size() == 36);

    const auto dir = scratch("smoke");
    write_outputs(out, dir);
    CHECK(first_line(slurp(dir / "exceedance_table.csv")) == "n,total,exceeded,proportion");
    CHECK(first_line(slurp(dir / "mse_curve.csv")) == "n,mean_sq_error_B,ref_n_pow_minus_quarter");
    CHECK(first_line(slurp(dir / "consistency.csv")) == "n,k_n,lambda_kn,a_sum,ratio,xi,trace_sum,N_sup,V_sup,mode");
    CHECK(first_line(slurp(dir / "results.csv")) == "n,replication,error_B,xi,exceeded");
    CHECK(first_line(slurp(dir / "eigen_decay.csv")) == "n,j,C_nj");
    CHECK(first_line(slurp(dir / "kernel_surface.csv")) == "s,t,value");
    for (const char* svg : {"exceedance.svg", "mse_curve.svg", "eigen_decay.svg", "consistency_ratio.svg"}) {
        CHECK(slurp(dir / svg).rfind("<svg", 0) == 0);
    }
    const auto log = slurp(dir / "run_log.txt");
    CHECK(log.find("stationarity: holds j0=1") != std::string::npos);
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        CHECK(slurp(entry.path()).find('\r') == std::string::npos);
    }
    std::filesystem::remove_all(dir);
}

TEST_CASE("runs are deterministic across repeats and thread counts") {
    auto cfg = parse_config_text("modes = 8\ngrid_len = 128\nsample_sizes = 100\nreplications = 1\n");
    const auto a = run_experiment(cfg, 1);
    const auto b = run_experiment(cfg, 1);
    CHECK(results_csv(a.results) == results_csv(b.results));

    cfg = small_config();
    const auto serial = run_experiment(cfg, 1);
    const auto parallel = run_experiment(cfg, 4);
    CHECK(results_csv(serial.results) == results_csv(parallel.results));
    CHECK(eigen_decay_csv(serial.eigen_decay) == eigen_decay_csv(parallel.eigen_decay));
    cfg.master_seed += 1;
    cfg.model.seed = cfg.master_seed;
    CHECK(results_csv(run_experiment(cfg, 1).results) != results_csv(serial.results));
}

TEST_CASE("spline mode runs") {
    auto cfg = small_config();
    cfg.spline_mode = true;
    cfg.replications = 2;
    const auto out = run_experiment(cfg, 1);
    CHECK(out.results.size() == 4);
}

TEST_CASE("numeric failures surface as exceptions") {
    auto cfg = parse_config_text("modes = 4\ngrid_len = 64\nsample_sizes = 3\nreplications = 1\ntruncation = fixed:4\n");
    CHECK_THROWS_AS(run_experiment(cfg, 1), NumericError);
}

TEST_CASE("CSV formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.5) == "0.5");
    const std::vector<diagnostics::ExperimentResult> rows{diagnostics::ExperimentResult::make(10, 0, 2.0, 1.0)};
    CHECK(results_csv(rows) == "n,replication,error_B,xi,exceeded\n10,0,2,1,1\n");
}

TEST_CASE("estimator bundle save and load") {
    Eigen::MatrixXd states = Eigen::MatrixXd::Random(5, 40);
    const auto fit = estimation::fit_estimator(states, estimation::TruncationRule::fixed_order(3));
    const auto dir = scratch("bundle");
    save_estimator(fit, dir);
    const auto back = load_estimator(dir);
    CHECK(back.n == fit.n);
    CHECK(back.k_n == fit.k_n);
    CHECK(back.eigenvalues == fit.eigenvalues);
    CHECK(back.eigenvectors == fit.eigenvectors);
    CHECK(back.d_matrix == fit.d_matrix);
    CHECK(back.rho_hat == fit.rho_hat);
    write_text_file(dir / "estimator_rho_hat.csv", "c1\n1,2\n");
    CHECK_THROWS_AS(load_estimator(dir), IoError);
    std::filesystem::remove_all(dir);
    CHECK_THROWS_AS(load_estimator(dir), IoError);
}

TEST_CASE("unwritable output directory is an I/O error") {
    const auto dir = scratch("blocked");
    write_text_file(dir.string() + "_file", "x");
    CHECK_THROWS_AS(write_text_file(std::filesystem::path(dir.string() + "_file") / "a.csv", "x"), IoError);
    std::filesystem::remove(dir.string() + "_file");
}

TEST_CASE("SVG chart") {
    const std::vector<Series> s{{"a<b", {1, 10, 100}, {1, 0.1, 0.01}, "#000", false},
                                {"flat", {1, 2}, {0, 0}, "#f00", true}};
    const auto svg = svg_line_chart(s, {"title & more", "n", "y", true, true});
    CHECK(svg.find("a&lt;b") != std::string::npos);
    CHECK(svg.find("title &amp; more") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);
    CHECK(svg.find("nan") == std::string::npos);
}

TEST_CASE("kernel surface is symmetric") {
    const auto cfg = parse_config_text("modes = 10\ngrid_len = 256\nkernel_points = 5\n");
    const auto setup = build_model(cfg);
    const auto k = kernel_surface(setup.covariance, 5);
    for (int a = 0; a < 5; ++a) {
        for (int b = 0; b < 5; ++b) {
            CHECK(k[a * 5 + b].value == doctest::Approx(k[b * 5 + a].value).epsilon(1e-14));
        }
    }
}
