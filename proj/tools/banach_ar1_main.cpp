#include "banach_ar1/errors.hpp"
#include "banach_ar1/harness.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace banach_ar1;

enum ExitCode { kOk = 0, kConfig = 2, kModelGate = 3, kNumeric = 4, kIo = 5 };

// Seed precedence: command line, then BANACH_AR1_SEED, then the config file.
void apply_seed(harness::ExperimentConfig& cfg, const std::optional<std::uint64_t>& cli_seed) {
    std::optional<std::uint64_t> seed = cli_seed;
    if (!seed) {
        if (const char* env = std::getenv("BANACH_AR1_SEED"); env && *env) {
            std::uint64_t v = 0;
            const std::string s(env);
            const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || ptr != s.data() + s.size()) {
                throw ConfigError("BANACH_AR1_SEED must be an unsigned 64-bit integer, got '" + s + "'");
            }
            seed = v;
        }
    }
    if (seed) {
        cfg.master_seed = *seed;
        cfg.model.seed = *seed;
    }
}

int run(const std::string& config_path, const std::string& out_dir, const std::optional<std::uint64_t>& seed,
        int threads) {
    auto cfg = harness::parse_config(config_path);
    apply_seed(cfg, seed);
    if (!out_dir.empty()) {
        cfg.output_dir = out_dir;
    }
    const auto output = harness::run_experiment(cfg, threads);
    harness::write_outputs(output, cfg.output_dir);
    for (const auto& line : output.log_lines) {
        std::cout << line << '\n';
    }
    std::cout << "wrote " << output.results.size() << " results to " << cfg.output_dir.string() << '\n';
    return kOk;
}

int validate(const std::string& config_path) {
    auto cfg = harness::parse_config(config_path);
    const auto setup = harness::build_model(cfg);
    std::cout << "config ok: p=" << cfg.model.modes << " L=" << cfg.model.grid_len
              << " stationarity j0=" << setup.stationarity.j0
              << " noise min_eigenvalue=" << harness::format_double(setup.noise.min_eigenvalue) << '\n';
    return kOk;
}

int kernel(const std::string& config_path, const std::string& out_dir) {
    auto cfg = harness::parse_config(config_path);
    if (!out_dir.empty()) {
        cfg.output_dir = out_dir;
    }
    const auto setup = harness::build_model(cfg);
    std::filesystem::create_directories(cfg.output_dir);
    const auto surface = harness::kernel_surface(setup.covariance, cfg.kernel_points);
    harness::write_text_file(cfg.output_dir / "kernel_surface.csv", harness::kernel_csv(surface));
    std::cout << "wrote " << surface.size() << " kernel points\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo study of componentwise ARB(1) prediction"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 1;

    auto* run_cmd = app.add_subcommand("run", "simulate, fit and write every output table");
    run_cmd->add_option("--config", config_path, "config file")->required();
    run_cmd->add_option("--out", out_dir, "output directory (overrides output_dir)");
    run_cmd->add_option("--seed", seed, "master seed (overrides BANACH_AR1_SEED and the config)");
    run_cmd->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);

    auto* validate_cmd = app.add_subcommand("validate", "parse the config and check the model gates");
    validate_cmd->add_option("--config", config_path, "config file")->required();

    auto* kernel_cmd = app.add_subcommand("kernel", "write the covariance kernel surface");
    kernel_cmd->add_option("--config", config_path, "config file")->required();
    kernel_cmd->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*run_cmd) {
            return run(config_path, out_dir, seed, threads);
        }
        if (*validate_cmd) {
            return validate(config_path);
        }
        return kernel(config_path, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const ModelGateError& e) {
        std::cerr << "model gate: " << e.what() << '\n';
        return kModelGate;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return kNumeric;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    }
}
