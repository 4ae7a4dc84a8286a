#include "banach_ar1/errors.hpp"
#include "banach_ar1/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <thread>

namespace banach_ar1::harness {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::vector<double> model_spectrum(double gamma, int count) {
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int j = 1; j <= count; ++j) {
        out[j - 1] = model::covariance_eigenvalue(gamma, j);
    }
    return out;
}

double spectral_tail(double gamma, int modes) {
    // Terms decay like j^{-2 gamma}; the remainder past the loop is bounded by the integral.
    constexpr int kTerms = 200000;
    double tail = 0.0;
    for (int j = kTerms; j > modes; --j) {
        tail += model::covariance_eigenvalue(gamma, j);
    }
    const double last = static_cast<double>(kTerms);
    tail += std::pow(std::numbers::pi * std::numbers::pi, -gamma) * std::pow(last, 1.0 - 2.0 * gamma) / (2.0 * gamma - 1.0);
    return tail;
}

}  // namespace

std::uint64_t replication_seed(std::uint64_t master_seed, int n, int replication) {
    std::uint64_t s = splitmix64(master_seed);
    s = splitmix64(s ^ static_cast<std::uint64_t>(n));
    s = splitmix64(s ^ (static_cast<std::uint64_t>(replication) << 1));
    return s;
}

ModelSetup build_model(const ExperimentConfig& config) {
    config.validate();
    ModelSetup setup;
    setup.params = config.model;
    setup.covariance = model::build_covariance(config.model);
    setup.rho = model::build_rho(config.model);
    setup.stationarity = model::check_stationarity(setup.rho, config.j0_max);
    if (!setup.stationarity.holds) {
        throw ModelGateError("stationarity gate failed: ||rho^j|| >= 1 for all j <= " +
                             std::to_string(config.j0_max) + " (last norm " +
                             std::to_string(setup.stationarity.norm) + ")");
    }
    setup.noise = model::build_noise_covariance(config.model, setup.covariance, setup.rho, config.psd_repair);
    setup.tail_mass = spectral_tail(config.model.gamma, config.model.modes);
    setup.trace = diagnostics::basis_trace_diagnostics(
        model::eigenbasis_on_grid(config.model.modes, config.model.grid_len), config.wavelet);
    return setup;
}

std::vector<KernelPoint> kernel_surface(const model::SpectralOperator& covariance, int points) {
    std::vector<KernelPoint> out;
    out.reserve(static_cast<std::size_t>(points) * points);
    for (int a = 0; a < points; ++a) {
        const double s = (a + 0.5) / points;
        for (int b = 0; b < points; ++b) {
            const double t = (b + 0.5) / points;
            out.push_back({s, t, model::covariance_kernel(covariance, s, t)});
        }
    }
    return out;
}

ExperimentOutput run_experiment(const ExperimentConfig& config, int threads) {
    const ModelSetup setup = build_model(config);
    const int p = config.model.modes;
    ExperimentOutput out;

    auto& log = out.log_lines;
    log.push_back("stationarity: holds j0=" + std::to_string(setup.stationarity.j0) +
                  " norm=" + format_double(setup.stationarity.norm));
    log.push_back("noise covariance: min_eigenvalue=" + format_double(setup.noise.min_eigenvalue) +
                  " repaired=" + (setup.noise.repaired ? std::string("true") : std::string("false")) +
                  " clipped_mass=" + format_double(setup.noise.clipped_mass));
    log.push_back("modes p=" + std::to_string(p) + " spectral tail mass beyond p=" + format_double(setup.tail_mass));
    log.push_back("wavelet order=" + std::to_string(config.wavelet.order) + " J=" +
                  std::to_string(config.wavelet.coarse_level) + " M=" + std::to_string(config.wavelet.max_level) +
                  " L=" + std::to_string(config.model.grid_len));
    log.push_back("trace_sum=" + format_double(setup.trace.trace_sum) + " N_sup=" + format_double(setup.trace.n_sup) +
                  " V_sup=" + format_double(setup.trace.v_sup));
    log.push_back("burn_in=" + std::to_string(config.effective_burn_in()) +
                  " spline_mode=" + (config.spline_mode ? std::string("true") : std::string("false")) +
                  " replications=" + std::to_string(config.replications) +
                  " master_seed=" + std::to_string(config.master_seed));

    for (int n : config.sample_sizes) {
        const int k = estimation::truncation_order(n, config.truncation, p);
        const auto spectrum = model_spectrum(config.model.gamma, std::max(p, k + 1));
        out.reports.push_back(
            diagnostics::consistency_report(n, k, spectrum, diagnostics::SpectrumMode::Model, setup.trace));
        log.push_back("n=" + std::to_string(n) + " k_n=" + std::to_string(k) +
                      " xi=" + format_double(out.reports.back().xi) +
                      " ratio=" + format_double(out.reports.back().ratio));
    }

    const std::optional<double> step =
        config.spline_mode ? std::optional<double>(config.coarse_step) : std::nullopt;
    const model::GridEvaluator grid(p, config.model.grid_len, step);

    const int sizes = static_cast<int>(config.sample_sizes.size());
    const int reps = config.replications;
    const int tasks = sizes * reps;
    out.results.resize(static_cast<std::size_t>(tasks));
    std::vector<std::vector<diagnostics::EigenDecayRow>> decay(static_cast<std::size_t>(sizes));

    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    const auto worker = [&]() {
        for (int task = next.fetch_add(1); task < tasks; task = next.fetch_add(1)) {
            try {
                const int idx = task / reps;
                const int r = task % reps;
                const int n = config.sample_sizes[idx];
                model::Rng rng(replication_seed(config.master_seed, n, r));
                const auto x0 = config.initial_condition == InitialCondition::TruncatedGaussian
                                    ? model::sample_initial_condition(setup.covariance, rng)
                                    : model::FunctionCoeffs::zeros(p);
                const auto traj = model::simulate_trajectory(n, setup.rho, setup.noise.op, x0, rng,
                                                             config.effective_burn_in(), config.model);
                const auto state = estimation::fit_estimator(traj, config.truncation);
                const auto x_n = traj.state(n);
                const auto predicted = estimation::plug_in_predict(state, x_n);
                const auto truth = setup.rho.apply(x_n);
                const double error = estimation::prediction_error_B(truth, predicted, grid, config.wavelet);
                out.results[static_cast<std::size_t>(task)] =
                    diagnostics::ExperimentResult::make(n, r, error, out.reports[idx].xi);
                if (r == 0) {
                    decay[static_cast<std::size_t>(idx)] = diagnostics::eigen_decay_report(state);
                }
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(tasks);
            }
        }
    };

    const int workers = std::clamp(threads, 1, std::max(1, tasks));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < workers; ++i) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    for (auto& rows : decay) {
        out.eigen_decay.insert(out.eigen_decay.end(), rows.begin(), rows.end());
    }
    out.kernel = kernel_surface(setup.covariance, config.kernel_points);
    return out;
}

}  // namespace banach_ar1::harness
