#include "banach_ar1/errors.hpp"
#include "banach_ar1/harness.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>

namespace banach_ar1::harness {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

class LineParser {
public:
    LineParser(std::string_view source, int line) : source_(source), line_(line) {}

    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError(std::string(source_) + ":" + std::to_string(line_) + ": " + what);
    }

    double to_double(const std::string& key, const std::string& value) const {
        double out = 0.0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
        if (ec != std::errc{} || ptr != value.data() + value.size()) {
            fail("key '" + key + "' expects a number, got '" + value + "'");
        }
        return out;
    }

    long long to_int(const std::string& key, const std::string& value) const {
        long long out = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
        if (ec != std::errc{} || ptr != value.data() + value.size()) {
            fail("key '" + key + "' expects an integer, got '" + value + "'");
        }
        return out;
    }

    std::uint64_t to_u64(const std::string& key, const std::string& value) const {
        std::uint64_t out = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
        if (ec != std::errc{} || ptr != value.data() + value.size()) {
            fail("key '" + key + "' expects an unsigned 64-bit integer, got '" + value + "'");
        }
        return out;
    }

    bool to_bool(const std::string& key, const std::string& value) const {
        const auto v = lower(value);
        if (v == "true" || v == "yes" || v == "on" || v == "1") {
            return true;
        }
        if (v == "false" || v == "no" || v == "off" || v == "0") {
            return false;
        }
        fail("key '" + key + "' expects true/false, got '" + value + "'");
    }

private:
    std::string_view source_;
    int line_;
};

}  // namespace

int ExperimentConfig::effective_burn_in() const {
    if (burn_in) {
        return *burn_in;
    }
    return initial_condition == InitialCondition::TruncatedGaussian ? 0 : 500;
}

void ExperimentConfig::validate() const {
    model.validate();
    wavelet.validate();
    if (wavelet.grid_length() != model.grid_len) {
        throw ConfigError("grid_len (" + std::to_string(model.grid_len) + ") must equal 2^(max_level+1) = " +
                          std::to_string(wavelet.grid_length()));
    }
    if (sample_sizes.empty()) {
        throw ConfigError("sample_sizes must not be empty");
    }
    for (std::size_t i = 0; i < sample_sizes.size(); ++i) {
        if (sample_sizes[i] < 2) {
            throw ConfigError("every sample size must be >= 2");
        }
        if (i > 0 && sample_sizes[i] <= sample_sizes[i - 1]) {
            throw ConfigError("sample_sizes must be strictly ascending");
        }
    }
    if (replications < 1) {
        throw ConfigError("replications must be >= 1");
    }
    if (truncation.kind == estimation::TruncationRule::Kind::Fixed && truncation.fixed < 1) {
        throw ConfigError("fixed truncation order must be >= 1");
    }
    if (effective_burn_in() < 0) {
        throw ConfigError("burn_in must be >= 0");
    }
    if (spline_mode && !(coarse_step > 0.0 && coarse_step < 1.0)) {
        throw ConfigError("coarse_step must lie in (0, 1)");
    }
    if (j0_max < 1) {
        throw ConfigError("j0_max must be >= 1");
    }
    if (kernel_points < 2) {
        throw ConfigError("kernel_points must be >= 2");
    }
}

ExperimentConfig parse_config_text(std::string_view text, std::string_view source) {
    ExperimentConfig cfg;
    bool max_level_given = false;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const LineParser lp(source, line_no);
        auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            lp.fail("expected 'key = value', got '" + line + "'");
        }
        const std::string key = lower(trim(line.substr(0, eq)));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            lp.fail("expected 'key = value', got '" + line + "'");
        }

        if (key == "beta") {
            cfg.model.beta_exponent = lp.to_double(key, value);
            if (!(cfg.model.beta_exponent > 0.5)) {
                lp.fail("beta must exceed 1/2, got " + value);
            }
        } else if (key == "gamma") {
            cfg.model.gamma = lp.to_double(key, value);
        } else if (key == "width" || key == "w") {
            cfg.model.width = lp.to_double(key, value);
        } else if (key == "modes" || key == "p") {
            cfg.model.modes = static_cast<int>(lp.to_int(key, value));
        } else if (key == "grid_len" || key == "l") {
            const auto len = lp.to_int(key, value);
            if (len < 4 || !std::has_single_bit(static_cast<unsigned long long>(len))) {
                lp.fail("grid_len must be a power of two >= 4, got " + value);
            }
            cfg.model.grid_len = static_cast<std::size_t>(len);
        } else if (key == "wavelet_order") {
            cfg.wavelet.order = static_cast<int>(lp.to_int(key, value));
        } else if (key == "coarse_level" || key == "j") {
            cfg.wavelet.coarse_level = static_cast<int>(lp.to_int(key, value));
        } else if (key == "max_level" || key == "m") {
            cfg.wavelet.max_level = static_cast<int>(lp.to_int(key, value));
            max_level_given = true;
        } else if (key == "sample_sizes") {
            cfg.sample_sizes.clear();
            std::stringstream items(value);
            std::string item;
            while (std::getline(items, item, ',')) {
                const auto v = trim(item);
                if (v.empty()) {
                    lp.fail("empty entry in sample_sizes");
                }
                cfg.sample_sizes.push_back(static_cast<int>(lp.to_int(key, v)));
            }
        } else if (key == "replications") {
            cfg.replications = static_cast<int>(lp.to_int(key, value));
        } else if (key == "truncation") {
            const auto v = lower(value);
            if (v == "logceil") {
                cfg.truncation = estimation::TruncationRule::log_ceil();
            } else if (v.rfind("fixed:", 0) == 0) {
                cfg.truncation = estimation::TruncationRule::fixed_order(
                    static_cast<int>(lp.to_int(key, trim(v.substr(6)))));
            } else {
                lp.fail("truncation must be 'logceil' or 'fixed:K', got '" + value + "'");
            }
        } else if (key == "burn_in") {
            cfg.burn_in = static_cast<int>(lp.to_int(key, value));
        } else if (key == "initial_condition") {
            const auto v = lower(value);
            if (v == "truncated_gaussian") {
                cfg.initial_condition = InitialCondition::TruncatedGaussian;
            } else if (v == "zero") {
                cfg.initial_condition = InitialCondition::Zero;
            } else {
                lp.fail("initial_condition must be 'truncated_gaussian' or 'zero'");
            }
        } else if (key == "spline_mode") {
            cfg.spline_mode = lp.to_bool(key, value);
        } else if (key == "coarse_step") {
            cfg.coarse_step = lp.to_double(key, value);
        } else if (key == "noise_psd_repair") {
            const auto v = lower(value);
            if (v == "clip") {
                cfg.psd_repair = model::PsdRepair::Clip;
            } else if (v == "strict") {
                cfg.psd_repair = model::PsdRepair::Strict;
            } else {
                lp.fail("noise_psd_repair must be 'clip' or 'strict'");
            }
        } else if (key == "j0_max") {
            cfg.j0_max = static_cast<int>(lp.to_int(key, value));
        } else if (key == "kernel_points") {
            cfg.kernel_points = static_cast<int>(lp.to_int(key, value));
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else if (key == "seed") {
            cfg.master_seed = lp.to_u64(key, value);
        } else {
            lp.fail("unknown key '" + key + "'");
        }
    }
    if (!max_level_given) {
        cfg.wavelet.max_level = std::bit_width(cfg.model.grid_len) - 2;
    }
    cfg.model.seed = cfg.master_seed;
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str(), path.string());
}

}  // namespace banach_ar1::harness
