#include "cossiga/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cossiga {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_matrix_market(const Eigen::MatrixXd& M, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "%%MatrixMarket matrix array real general\n";
    out << M.rows() << " " << M.cols() << "\n";
    for (Eigen::Index j = 0; j < M.cols(); ++j)
        for (Eigen::Index i = 0; i < M.rows(); ++i) out << format_double(M(i, j)) << "\n";
}

Eigen::MatrixXd read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0)
        throw std::runtime_error("not a Matrix Market file: " + path);
    if (line.find("array") == std::string::npos || line.find("real") == std::string::npos)
        throw std::runtime_error("unsupported Matrix Market flavor in " + path);
    do {
        if (!std::getline(in, line)) throw std::runtime_error("truncated header in " + path);
    } while (!line.empty() && line[0] == '%');
    std::istringstream dims(line);
    Eigen::Index rows = 0, cols = 0;
    dims >> rows >> cols;
    Eigen::MatrixXd M(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            if (!(in >> M(i, j))) throw std::runtime_error("truncated data in " + path);
    return M;
}

void write_vector_csv(const Eigen::VectorXd& v, const std::string& name, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << name << "\n";
    for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v[i]) << "\n";
}

void write_runs_csv(const std::vector<RunRecord>& runs, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "run_id,seed,method,p,regularity,l0,L,s,m,subsampling_rate,h1_rel_err\n";
    for (const auto& r : runs) {
        out << r.run_id << "," << r.seed << "," << r.method << "," << r.p << ","
            << to_string(r.regularity) << "," << r.l0 << "," << r.L << "," << r.s << "," << r.m
            << "," << format_double(r.subsampling_rate) << "," << format_double(r.h1_rel_err)
            << "\n";
    }
}

void write_summary_csv(const std::vector<SummaryRecord>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "case,p,regularity,l0,L,s,m,subsampling_rate,n_runs,err_pg_bs,err_pg_omp,"
           "p2.7,p25,p50,p75,p99.3\n";
    for (const auto& r : rows) {
        out << r.case_name << "," << r.p << "," << to_string(r.regularity) << "," << r.l0 << ","
            << r.L << "," << r.s << "," << r.m << "," << format_double(r.subsampling_rate) << ","
            << r.stats.n_runs << "," << format_double(r.err_bs) << "," << format_double(r.err_omp)
            << "," << format_double(r.stats.p2_7) << "," << format_double(r.stats.p25) << ","
            << format_double(r.stats.p50) << "," << format_double(r.stats.p75) << ","
            << format_double(r.stats.p99_3) << "\n";
    }
}

}  // namespace cossiga
