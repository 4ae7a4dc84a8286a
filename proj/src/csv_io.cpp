#include "banach_ar1/errors.hpp"
#include "banach_ar1/harness.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace banach_ar1::harness {

namespace {

std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path, bool has_header) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && has_header) {
            continue;
        }
        if (line.empty()) {
            continue;
        }
        std::vector<double> row;
        std::size_t start = 0;
        while (start <= line.size()) {
            const auto comma = line.find(',', start);
            const auto end = comma == std::string::npos ? line.size() : comma;
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(line.data() + start, line.data() + end, v);
            if (ec != std::errc{} || ptr != line.data() + end) {
                throw IoError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
            }
            row.push_back(v);
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string matrix_csv(const Eigen::MatrixXd& m) {
    std::ostringstream out;
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        out << (c ? "," : "") << "c" << (c + 1);
    }
    out << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out << (c ? "," : "") << format_double(m(r, c));
        }
        out << '\n';
    }
    return out.str();
}

Eigen::MatrixXd read_matrix(const std::filesystem::path& path, Eigen::Index rows, Eigen::Index cols) {
    const auto data = read_numeric_csv(path, true);
    if (static_cast<Eigen::Index>(data.size()) != rows) {
        throw IoError(path.string() + ": expected " + std::to_string(rows) + " rows");
    }
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(data[r].size()) != cols) {
            throw IoError(path.string() + ": expected " + std::to_string(cols) + " columns");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            m(r, c) = data[r][c];
        }
    }
    return m;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) {
        return "nan";
    }
    return std::string(buf, ptr);
}

void write_text_file(const std::filesystem::path& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

std::string results_csv(std::span<const diagnostics::ExperimentResult> results) {
    std::ostringstream out;
    out << "n,replication,error_B,xi,exceeded\n";
    for (const auto& r : results) {
        out << r.n << ',' << r.replication << ',' << format_double(r.error_B) << ',' << format_double(r.xi) << ','
            << (r.exceeded ? 1 : 0) << '\n';
    }
    return out.str();
}

std::string exceedance_csv(std::span<const diagnostics::ExceedanceRow> rows) {
    std::ostringstream out;
    out << "n,total,exceeded,proportion\n";
    for (const auto& r : rows) {
        out << r.n << ',' << r.total << ',' << r.exceeded << ',' << format_double(r.proportion) << '\n';
    }
    return out.str();
}

std::string mse_csv(std::span<const diagnostics::MseRow> rows) {
    std::ostringstream out;
    out << "n,mean_sq_error_B,ref_n_pow_minus_quarter\n";
    for (const auto& r : rows) {
        out << r.n << ',' << format_double(r.mean_sq_error_B) << ',' << format_double(r.reference) << '\n';
    }
    return out.str();
}

std::string consistency_csv(std::span<const diagnostics::ConsistencyReport> rows) {
    std::ostringstream out;
    out << "n,k_n,lambda_kn,a_sum,ratio,xi,trace_sum,N_sup,V_sup,mode\n";
    for (const auto& r : rows) {
        out << r.n << ',' << r.k_n << ',' << format_double(r.lambda) << ',' << format_double(r.a_sum) << ','
            << format_double(r.ratio) << ',' << format_double(r.xi) << ',' << format_double(r.trace_check) << ','
            << format_double(r.n_sup) << ',' << format_double(r.v_sup) << ',' << diagnostics::to_string(r.mode)
            << '\n';
    }
    return out.str();
}

std::string eigen_decay_csv(std::span<const diagnostics::EigenDecayRow> rows) {
    std::ostringstream out;
    out << "n,j,C_nj\n";
    for (const auto& r : rows) {
        out << r.n << ',' << r.j << ',' << format_double(r.value) << '\n';
    }
    return out.str();
}

std::string kernel_csv(std::span<const KernelPoint> rows) {
    std::ostringstream out;
    out << "s,t,value\n";
    for (const auto& r : rows) {
        out << format_double(r.s) << ',' << format_double(r.t) << ',' << format_double(r.value) << '\n';
    }
    return out.str();
}

void save_estimator(const estimation::EstimatorState& state, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create '" + dir.string() + "': " + ec.message());
    }
    std::ostringstream meta;
    meta << "n,k_n,p\n" << state.n << ',' << state.k_n << ',' << state.dim() << '\n';
    write_text_file(dir / "estimator_meta.csv", meta.str());

    std::ostringstream values;
    values << "j,C_nj\n";
    for (Eigen::Index j = 0; j < state.eigenvalues.size(); ++j) {
        values << (j + 1) << ',' << format_double(state.eigenvalues(j)) << '\n';
    }
    write_text_file(dir / "estimator_eigenvalues.csv", values.str());
    write_text_file(dir / "estimator_eigenvectors.csv", matrix_csv(state.eigenvectors));
    write_text_file(dir / "estimator_d_matrix.csv", matrix_csv(state.d_matrix));
    write_text_file(dir / "estimator_rho_hat.csv", matrix_csv(state.rho_hat));
}

estimation::EstimatorState load_estimator(const std::filesystem::path& dir) {
    const auto meta = read_numeric_csv(dir / "estimator_meta.csv", true);
    if (meta.size() != 1 || meta[0].size() != 3) {
        throw IoError("estimator_meta.csv must hold one row n,k_n,p");
    }
    estimation::EstimatorState state;
    state.n = static_cast<int>(meta[0][0]);
    state.k_n = static_cast<int>(meta[0][1]);
    const auto p = static_cast<Eigen::Index>(meta[0][2]);
    if (p < 1 || state.k_n < 1 || state.k_n > p) {
        throw IoError("estimator_meta.csv holds inconsistent sizes");
    }
    const auto values = read_numeric_csv(dir / "estimator_eigenvalues.csv", true);
    if (static_cast<Eigen::Index>(values.size()) != p) {
        throw IoError("estimator_eigenvalues.csv must hold p rows");
    }
    state.eigenvalues.resize(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        if (values[j].size() != 2) {
            throw IoError("estimator_eigenvalues.csv rows must be j,C_nj");
        }
        state.eigenvalues(j) = values[j][1];
    }
    state.eigenvectors = read_matrix(dir / "estimator_eigenvectors.csv", p, p);
    state.d_matrix = read_matrix(dir / "estimator_d_matrix.csv", p, p);
    state.rho_hat = read_matrix(dir / "estimator_rho_hat.csv", p, p);
    return state;
}

void write_outputs(const ExperimentOutput& output, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    }
    const auto exceedance = diagnostics::exceedance_table(output.results);
    const auto mse = diagnostics::empirical_mse_curve(output.results);

    write_text_file(dir / "results.csv", results_csv(output.results));
    write_text_file(dir / "exceedance_table.csv", exceedance_csv(exceedance));
    write_text_file(dir / "mse_curve.csv", mse_csv(mse));
    write_text_file(dir / "consistency.csv", consistency_csv(output.reports));
    write_text_file(dir / "eigen_decay.csv", eigen_decay_csv(output.eigen_decay));
    write_text_file(dir / "kernel_surface.csv", kernel_csv(output.kernel));

    std::ostringstream log;
    for (const auto& line : output.log_lines) {
        log << line << '\n';
    }
    write_text_file(dir / "run_log.txt", log.str());

    Series prop{"exceedance proportion", {}, {}, "#1f77b4", false};
    for (const auto& r : exceedance) {
        prop.x.push_back(r.n);
        prop.y.push_back(r.proportion);
    }
    write_text_file(dir / "exceedance.svg",
                    svg_line_chart(std::span<const Series>(&prop, 1),
                                   {"Proportion of errors above the bound", "n", "proportion", true, false}));

    std::vector<Series> mse_series{{"empirical MSE", {}, {}, "#1f77b4", false},
                                   {"n^(-1/4)", {}, {}, "#d62728", true}};
    for (const auto& r : mse) {
        mse_series[0].x.push_back(r.n);
        mse_series[0].y.push_back(r.mean_sq_error_B);
        mse_series[1].x.push_back(r.n);
        mse_series[1].y.push_back(r.reference);
    }
    write_text_file(dir / "mse_curve.svg",
                    svg_line_chart(mse_series, {"Empirical mean-square B-norm error", "n", "MSE", true, true}));

    std::vector<Series> decay_series;
    for (const auto& row : output.eigen_decay) {
        if (decay_series.empty() || decay_series.back().name != "n=" + std::to_string(row.n)) {
            static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
            decay_series.push_back({"n=" + std::to_string(row.n), {}, {}, palette[decay_series.size() % 6], false});
        }
        decay_series.back().x.push_back(row.j);
        decay_series.back().y.push_back(row.value);
    }
    if (!decay_series.empty()) {
        write_text_file(dir / "eigen_decay.svg",
                        svg_line_chart(decay_series, {"Empirical eigenvalues", "j", "C_nj", false, true}));
    }

    Series ratio{"consistency ratio", {}, {}, "#2ca02c", false};
    for (const auto& r : output.reports) {
        ratio.x.push_back(r.n);
        ratio.y.push_back(r.ratio);
    }
    write_text_file(dir / "consistency_ratio.svg",
                    svg_line_chart(std::span<const Series>(&ratio, 1),
                                   {"Rate-condition ratio", "n", "ratio", true, true}));
}

}  // namespace banach_ar1::harness
