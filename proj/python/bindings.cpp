#include "banach_ar1/errors.hpp"
#include "banach_ar1/harness.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <bit>
#include <optional>

namespace py = pybind11;
using namespace banach_ar1;

namespace {

wavelet::BasisSpec make_spec(int order, int coarse_level, int max_level) {
    wavelet::BasisSpec spec;
    spec.order = order;
    spec.coarse_level = coarse_level;
    spec.max_level = max_level;
    spec.validate();
    return spec;
}

model::ModelParams make_params(double gamma, double beta, double width, int modes, std::size_t grid_len) {
    model::ModelParams p;
    p.gamma = gamma;
    p.beta_exponent = beta;
    p.width = width;
    p.modes = modes;
    p.grid_len = grid_len;
    p.validate();
    return p;
}

estimation::TruncationRule make_rule(std::optional<int> k) {
    return k ? estimation::TruncationRule::fixed_order(*k) : estimation::TruncationRule::log_ceil();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Wavelet norms, ARB(1) simulation and componentwise estimation";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ModelGateError>(m, "ModelGateError", base.ptr());
    py::register_exception<NumericError>(m, "NumericError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    m.def("daubechies_filter", &wavelet::daubechies_filter, py::arg("order"));

    m.def(
        "dwt_forward",
        [](const std::vector<double>& samples, int order, int coarse_level) {
            const int max_level = std::bit_width(samples.size()) - 2;
            const auto c = wavelet::dwt_forward(samples, make_spec(order, coarse_level, max_level));
            return py::make_tuple(c.alpha, c.beta);
        },
        py::arg("samples"), py::arg("order") = 10, py::arg("coarse_level") = 2,
        "Returns (alpha, [beta_J, ..., beta_M]).");

    m.def(
        "dwt_inverse",
        [](const std::vector<double>& alpha, const std::vector<std::vector<double>>& beta, int order,
           int coarse_level) {
            if (beta.empty()) {
                throw ConfigError("beta must hold at least one level");
            }
            wavelet::Coeffs c;
            c.spec = make_spec(order, coarse_level, coarse_level + static_cast<int>(beta.size()) - 1);
            c.alpha = alpha;
            c.beta = beta;
            return wavelet::dwt_inverse(c);
        },
        py::arg("alpha"), py::arg("beta"), py::arg("order") = 10, py::arg("coarse_level") = 2);

    m.def(
        "besov_norms",
        [](const std::vector<double>& samples, int order, int coarse_level) {
            const int max_level = std::bit_width(samples.size()) - 2;
            const auto c = wavelet::dwt_forward(samples, make_spec(order, coarse_level, max_level));
            return py::make_tuple(wavelet::besov_sup_norm(c), wavelet::besov_l1_norm(c));
        },
        py::arg("samples"), py::arg("order") = 10, py::arg("coarse_level") = 2,
        "Returns (sup norm, l1 norm) of the wavelet coefficients.");

    m.def(
        "weighted_norms",
        [](const std::vector<double>& samples, double beta, int order, int coarse_level, bool renormalize) {
            const int max_level = std::bit_width(samples.size()) - 2;
            const auto spec = make_spec(order, coarse_level, max_level);
            const auto c = wavelet::dwt_forward(samples, spec);
            const auto w = wavelet::make_gelfand_weights(spec, beta, renormalize);
            py::dict out;
            out["direct"] = wavelet::weighted_norm(c, w, wavelet::NormMode::Direct);
            out["flat"] = wavelet::weighted_norm(c, w, wavelet::NormMode::Flat);
            out["dual"] = wavelet::weighted_norm(c, w, wavelet::NormMode::Dual);
            out["sup"] = wavelet::besov_sup_norm(c);
            out["l1"] = wavelet::besov_l1_norm(c);
            return out;
        },
        py::arg("samples"), py::arg("beta") = 0.6, py::arg("order") = 10, py::arg("coarse_level") = 2,
        py::arg("renormalize") = true);

    m.def(
        "build_operators",
        [](double gamma, double beta, double width, int modes, std::size_t grid_len) {
            const auto p = make_params(gamma, beta, width, modes, grid_len);
            const auto cov = model::build_covariance(p);
            const auto rho = model::build_rho(p);
            const auto noise = model::build_noise_covariance(p, cov, rho);
            py::dict out;
            out["covariance"] = cov.matrix;
            out["rho"] = rho.matrix;
            out["noise"] = noise.op.matrix;
            out["noise_raw"] = noise.raw;
            out["noise_min_eigenvalue"] = noise.min_eigenvalue;
            return out;
        },
        py::arg("gamma") = 1.21, py::arg("beta") = 0.6, py::arg("width") = 0.4, py::arg("modes") = 50,
        py::arg("grid_len") = 2048);

    m.def(
        "simulate",
        [](int n, double gamma, double width, int modes, std::uint64_t seed, int burn_in) {
            const auto p = make_params(gamma, 0.6, width, modes, 2048);
            const auto cov = model::build_covariance(p);
            const auto rho = model::build_rho(p);
            const auto noise = model::build_noise_covariance(p, cov, rho);
            model::Rng rng(seed);
            const auto x0 = model::sample_initial_condition(cov, rng);
            return model::simulate_trajectory(n, rho, noise.op, x0, rng, burn_in, p).states;
        },
        py::arg("n"), py::arg("gamma") = 1.21, py::arg("width") = 0.4, py::arg("modes") = 50,
        py::arg("seed") = 20240601, py::arg("burn_in") = 0,
        "Returns the p x (n+1) matrix of states X_0..X_n in the model basis.");

    m.def(
        "fit_estimator",
        [](const Eigen::MatrixXd& states, std::optional<int> k) {
            const auto s = estimation::fit_estimator(states, make_rule(k));
            py::dict out;
            out["n"] = s.n;
            out["k_n"] = s.k_n;
            out["eigenvalues"] = s.eigenvalues;
            out["eigenvectors"] = s.eigenvectors;
            out["d_matrix"] = s.d_matrix;
            out["rho_hat"] = s.rho_hat;
            return out;
        },
        py::arg("states"), py::arg("k") = py::none(),
        "Fits the componentwise estimator to columns X_0..X_n; k defaults to ceil(ln n).");

    m.def(
        "stationary_covariance",
        [](const Eigen::MatrixXd& rho, const Eigen::MatrixXd& noise) {
            return model::stationary_covariance({rho, false}, {noise, true});
        },
        py::arg("rho"), py::arg("noise"));

    m.def("truncation_order",
          [](int n, int p) { return estimation::truncation_order(n, estimation::TruncationRule::log_ceil(), p); },
          py::arg("n"), py::arg("p"));

    m.def(
        "error_bound_xi",
        [](int n, int k, const std::vector<double>& spectrum) {
            const auto a = estimation::spectral_gap_a(spectrum, k);
            return diagnostics::error_bound_xi(n, k, spectrum, a);
        },
        py::arg("n"), py::arg("k"), py::arg("spectrum"));

    m.def(
        "run_experiment",
        [](const std::string& config_text, int threads, std::optional<std::filesystem::path> out_dir) {
            const auto cfg = harness::parse_config_text(config_text);
            harness::ExperimentOutput output;
            {
                py::gil_scoped_release release;
                output = harness::run_experiment(cfg, threads);
                if (out_dir) {
                    harness::write_outputs(output, *out_dir);
                }
            }
            py::dict out;
            out["results"] = harness::results_csv(output.results);
            out["exceedance"] = harness::exceedance_csv(diagnostics::exceedance_table(output.results));
            out["mse"] = harness::mse_csv(diagnostics::empirical_mse_curve(output.results));
            out["consistency"] = harness::consistency_csv(output.reports);
            out["log"] = output.log_lines;
            return out;
        },
        py::arg("config_text"), py::arg("threads") = 1, py::arg("out_dir") = py::none(),
        "Runs a study from config text and returns its tables as CSV strings.");
}
