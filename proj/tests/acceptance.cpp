// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any fails.

#include "banach_ar1/errors.hpp"
#include "banach_ar1/harness.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <thread>

using namespace banach_ar1;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> z;
    std::vector<double> x(n);
    for (double& v : x) {
        v = z(rng);
    }
    return x;
}

wavelet::BasisSpec spec_for(int order, std::size_t len) {
    wavelet::BasisSpec s;
    s.order = order;
    s.coarse_level = 2;
    s.max_level = static_cast<int>(std::log2(static_cast<double>(len))) - 1;
    return s;
}

Outcome dwt_correctness() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(1);
    double worst_round = 0.0;
    double worst_parseval = 0.0;
    for (int order : {1, 2, 4, 10}) {
        for (std::size_t len = 16; len <= 4096; len *= 2) {
            const auto x = random_vector(len, rng);
            const auto c = wavelet::dwt_forward(x, spec_for(order, len));
            const auto y = wavelet::dwt_inverse(c);
            double ex = 0.0;
            for (std::size_t i = 0; i < len; ++i) {
                worst_round = std::max(worst_round, std::abs(x[i] - y[i]));
                ex += x[i] * x[i] / static_cast<double>(len);
            }
            const auto flat = c.flatten();
            const double ec = std::inner_product(flat.begin(), flat.end(), flat.begin(), 0.0);
            worst_parseval = std::max(worst_parseval, std::abs(ec - ex));
        }
    }
    double worst_dense = 0.0;
    for (int order : {1, 2, 4, 10}) {
        const auto spec = spec_for(order, 256);
        const auto basis = oracle::cascade_basis(wavelet::daubechies_filter(order), 2, spec.max_level);
        for (int t = 0; t < 3; ++t) {
            const auto x = random_vector(256, rng);
            const auto dense = oracle::dense_transform(basis, x);
            const auto fast = wavelet::dwt_forward(x, spec).flatten();
            for (std::size_t i = 0; i < dense.size(); ++i) {
                worst_dense = std::max(worst_dense, std::abs(dense[i] - fast[i]));
            }
        }
    }
    const double secs = seconds_since(t0);
    return {worst_round < 1e-10 && worst_parseval < 1e-10 && worst_dense < 1e-8 && secs < 10.0,
            "round-trip " + fmt(worst_round) + ", Parseval " + fmt(worst_parseval) + ", dense oracle " +
                fmt(worst_dense) + ", " + fmt(secs) + " s"};
}

Outcome oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2);
    std::normal_distribution<double> z;
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int p = 2 + static_cast<int>(rng() % 5);
        const int n = 6 + static_cast<int>(rng() % 45);
        const int k = 1 + static_cast<int>(rng() % p);
        Eigen::MatrixXd states(p, n + 1);
        oracle::Matrix rows(n + 1, std::vector<double>(p));
        for (int i = 0; i <= n; ++i) {
            for (int a = 0; a < p; ++a) {
                states(a, i) = rows[i][a] = z(rng);
            }
        }
        const auto fit = estimation::fit_estimator(states, estimation::TruncationRule::fixed_order(k));
        const auto ref = oracle::estimator(rows, k);
        for (int a = 0; a < p; ++a) {
            for (int b = 0; b < p; ++b) {
                worst = std::max(worst, std::abs(fit.rho_hat(a, b) - ref[a][b]));
            }
        }
    }
    const double secs = seconds_since(t0);
    return {worst < 1e-10 && secs < 30.0, "max entry difference " + fmt(worst) + " over 100 instances, " +
                                              fmt(secs) + " s"};
}

Outcome noiseless_recovery() {
    model::ModelParams params;
    params.modes = 5;
    const auto rho = model::build_rho(params).matrix;
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    Eigen::MatrixXd states(5, 101);
    for (int a = 0; a < 5; ++a) {
        states(a, 0) = z(rng);
    }
    for (int i = 1; i <= 100; ++i) {
        states.col(i) = rho * states.col(i - 1);
    }
    const auto fit = estimation::fit_estimator(states, estimation::TruncationRule::fixed_order(5));
    const double err = (fit.rho_hat - rho).cwiseAbs().maxCoeff();
    return {err < 1e-8, "max |rho_hat - rho| = " + fmt(err)};
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

Outcome hs_rate() {
    const auto t0 = std::chrono::steady_clock::now();
    auto cfg = harness::parse_config_text("modes = 20\n");
    const auto setup = harness::build_model(cfg);
    const model::SpectralOperator sigma{model::stationary_covariance(setup.rho, setup.noise.op), true};
    const model::SpectralOperator lag{setup.rho.matrix * sigma.matrix, false};
    const std::vector<int> sizes{512, 2048, 8192, 32768};
    const int reps = 20;
    std::vector<double> log_n;
    std::vector<double> log_c;
    std::vector<double> log_d;
    for (int n : sizes) {
        double c_sum = 0.0;
        double d_sum = 0.0;
        for (int r = 0; r < reps; ++r) {
            model::Rng rng(harness::replication_seed(cfg.master_seed, n, r));
            const auto x0 = model::sample_initial_condition(setup.covariance, rng);
            const auto traj = model::simulate_trajectory(n, setup.rho, setup.noise.op, x0, rng, 0, cfg.model);
            c_sum += diagnostics::hs_distance(estimation::empirical_covariance(traj.states.leftCols(n)), sigma);
            d_sum += diagnostics::hs_distance(estimation::empirical_cross_covariance(traj.states), lag);
        }
        log_n.push_back(std::log(static_cast<double>(n)));
        log_c.push_back(std::log(c_sum / reps));
        log_d.push_back(std::log(d_sum / reps));
    }
    const double sc = ls_slope(log_n, log_c);
    const double sd = ls_slope(log_n, log_d);
    const double secs = seconds_since(t0);
    const auto in = [](double s) { return s >= -0.65 && s <= -0.35; };
    return {in(sc) && in(sd) && secs < 300.0,
            "slope C_n " + fmt(sc) + ", slope D_n " + fmt(sd) + ", " + fmt(secs) + " s"};
}

struct DeskRun {
    std::vector<diagnostics::ExceedanceRow> exceedance;
    std::vector<diagnostics::MseRow> mse;
    double seconds = 0.0;
    bool identical = false;
    std::string identical_detail;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

DeskRun desk_run() {
    DeskRun out;
    auto cfg = harness::parse_config_text(
        "sample_sizes = 500, 2000, 8000\n"
        "replications = 50\n"
        "seed = 20240601\n");
    const auto root = std::filesystem::temp_directory_path() / "banach_ar1_acceptance";
    std::filesystem::remove_all(root);
    const int threads = static_cast<int>(std::max(2u, std::thread::hardware_concurrency()));

    const auto t0 = std::chrono::steady_clock::now();
    const auto first = harness::run_experiment(cfg, 1);
    out.seconds = seconds_since(t0);
    harness::write_outputs(first, root / "serial");
    harness::write_outputs(harness::run_experiment(cfg, 1), root / "serial_again");
    harness::write_outputs(harness::run_experiment(cfg, threads), root / "parallel");

    out.exceedance = diagnostics::exceedance_table(first.results);
    out.mse = diagnostics::empirical_mse_curve(first.results);

    out.identical = true;
    int files = 0;
    for (const auto& entry : std::filesystem::directory_iterator(root / "serial")) {
        if (entry.path().extension() != ".csv") {
            continue;
        }
        ++files;
        const auto name = entry.path().filename();
        const auto a = slurp(entry.path());
        if (a != slurp(root / "serial_again" / name) || a != slurp(root / "parallel" / name)) {
            out.identical = false;
            out.identical_detail += "; " + name.string() + " differs";
        }
    }
    out.identical = out.identical && files == 6;
    out.identical_detail = std::to_string(files) + " CSV files compared across 2 serial runs and a " +
                           std::to_string(threads) + "-thread run" + out.identical_detail;
    std::filesystem::remove_all(root);
    return out;
}

Outcome exceedance_trend(const DeskRun& run) {
    bool monotone = true;
    std::string props;
    for (std::size_t i = 0; i < run.exceedance.size(); ++i) {
        props += (i ? " " : "") + std::to_string(run.exceedance[i].exceeded) + "/" +
                 std::to_string(run.exceedance[i].total);
        if (i > 0 && run.exceedance[i].proportion > run.exceedance[i - 1].proportion) {
            monotone = false;
        }
    }
    const double first = run.exceedance.front().proportion;
    const double last = run.exceedance.back().proportion;
    const bool drop = last <= first - 0.02 || (first == 0.0 && last == 0.0);
    return {monotone && drop && run.seconds < 600.0,
            "exceeded " + props + ", " + fmt(run.seconds) + " s per run"};
}

Outcome mse_decay(const DeskRun& run) {
    const double first = run.mse.front().mean_sq_error_B;
    const double last = run.mse.back().mean_sq_error_B;
    return {last < first, "MSE n=" + std::to_string(run.mse.front().n) + ": " + fmt(first) +
                              ", n=" + std::to_string(run.mse.back().n) + ": " + fmt(last)};
}

double ratio_at(int n, int k) {
    std::vector<double> spectrum;
    for (int j = 1; j <= k + 1; ++j) {
        spectrum.push_back(model::covariance_eigenvalue(1.21, j));
    }
    const auto a = estimation::spectral_gap_a(spectrum, k);
    return diagnostics::consistency_ratio(n, k, spectrum, a);
}

Outcome ratio_trend(std::string& info) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<double> ratios;
    std::string values;
    for (int e : {10, 14, 18}) {
        const int n = 1 << e;
        const int k = estimation::truncation_order(n, estimation::TruncationRule::log_ceil(), 1000);
        ratios.push_back(ratio_at(n, k));
        values += (values.empty() ? "" : ", ") + std::string("n=2^") + std::to_string(e) + " k=" +
                  std::to_string(k) + " ratio=" + fmt(ratios.back());
    }
    const bool decreasing = ratios[1] < ratios[0] && ratios[2] < ratios[1];
    const double secs = seconds_since(t0);

    // Same formula with ln n = k for k in the 30..40 range, where the curve has turned over.
    std::string tail;
    bool tail_decreasing = true;
    double prev = 0.0;
    for (int k = 30; k <= 40; k += 5) {
        const double n = std::exp(static_cast<double>(k));
        std::vector<double> spectrum;
        for (int j = 1; j <= k + 1; ++j) {
            spectrum.push_back(model::covariance_eigenvalue(1.21, j));
        }
        const auto a = estimation::spectral_gap_a(spectrum, k);
        const double q = k * std::accumulate(a.begin(), a.end(), 0.0) / spectrum[k - 1];
        const double r = q / std::sqrt(n / std::log(n));
        tail += (tail.empty() ? "" : ", ") + std::string("k=") + std::to_string(k) + " ratio=" + fmt(r);
        if (k > 30 && r >= prev) {
            tail_decreasing = false;
        }
        prev = r;
    }
    info = "INFO criterion 7: with n = e^k, " + tail + (tail_decreasing ? " (decreasing)" : " (not decreasing)");
    return {decreasing && secs < 1.0, values};
}

Outcome norm_chain() {
    const auto t0 = std::chrono::steady_clock::now();
    wavelet::BasisSpec spec;
    const auto w = wavelet::make_gelfand_weights(spec, 0.6, true);
    std::mt19937_64 rng(8);
    std::normal_distribution<double> z;
    int violations = 0;
    for (int t = 0; t < 1000; ++t) {
        auto c = wavelet::Coeffs::zeros(spec);
        for (double& v : c.alpha) {
            v = z(rng);
        }
        for (auto& lvl : c.beta) {
            for (double& v : lvl) {
                v = z(rng);
            }
        }
        const double direct = wavelet::weighted_norm(c, w, wavelet::NormMode::Direct);
        const double sup = wavelet::besov_sup_norm(c);
        const double flat = wavelet::weighted_norm(c, w, wavelet::NormMode::Flat);
        const double l1 = wavelet::besov_l1_norm(c);
        const double dual = wavelet::weighted_norm(c, w, wavelet::NormMode::Dual);
        violations += !(direct <= sup) + !(sup <= flat) + !(flat <= l1) + !(l1 <= dual);
    }
    const double secs = seconds_since(t0);
    return {violations == 0 && secs < 5.0,
            std::to_string(violations) + " violations over 1000 vectors, " + fmt(secs) + " s"};
}

}  // namespace

int main() {
    int failures = 0;
    const auto report = [&](int id, const std::string& name, const std::function<Outcome()>& check) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << name << " (" << o.detail << ")"
                  << std::endl;
    };

    report(1, "DWT round trip, Parseval and dense oracle", dwt_correctness);
    report(2, "estimator equals the literal-sum oracle", oracle_equivalence);
    report(3, "noiseless exact recovery", noiseless_recovery);
    report(4, "Hilbert-Schmidt convergence rate", hs_rate);

    DeskRun desk;
    std::string desk_error;
    try {
        desk = desk_run();
    } catch (const std::exception& e) {
        desk_error = e.what();
    }
    const auto with_desk = [&](const std::function<Outcome()>& f) {
        return [&, f]() -> Outcome {
            if (!desk_error.empty()) {
                return {false, "desk-scale run failed: " + desk_error};
            }
            return f();
        };
    };
    report(5, "exceedance proportion trend", with_desk([&] { return exceedance_trend(desk); }));
    report(6, "MSE decay", with_desk([&] { return mse_decay(desk); }));

    std::string info;
    report(7, "consistency ratio decreasing over n = 2^10, 2^14, 2^18", [&] { return ratio_trend(info); });
    if (!info.empty()) {
        std::cout << info << std::endl;
    }
    report(8, "norm chain", norm_chain);
    report(9, "byte-identical outputs", with_desk([&]() -> Outcome { return {desk.identical, desk.identical_detail}; }));

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criterion(s) failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
