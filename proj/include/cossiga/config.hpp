#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cossiga/splines.hpp"

namespace cossiga {

/// Experiment configuration, merged from a JSON file and command-line flags
/// (flags win). The effective configuration is re-emitted next to every output
/// for provenance; loading and re-emitting it is idempotent.
struct ExperimentConfig {
    std::string case_name = "polygauss2d";
    int p = 2;
    Regularity regularity = Regularity::Cmax;
    int l0 = 1;
    int L = 5;
    std::optional<int> s;
    std::optional<long long> m;
    std::optional<double> C;
    std::optional<double> D;
    double lambda = 1.0;
    double mu = 2.0;
    std::optional<int> quadrature_points;
    int n_runs = 25;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string output_dir = "out";
    std::optional<std::string> geometry;  // builtin name or path to a patch JSON
    std::vector<int> levels = {4, 5, 6};  // converge
    std::vector<int> s_list;              // calibrate-d
    std::vector<long long> m_grid;        // calibrate-d

    /// Resolves s (and m) from C (and D) when absent; throws when neither is given.
    int resolve_s(long long n_dof) const;
    long long resolve_m(long long n_dof, int s) const;
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);
void save_config(const ExperimentConfig& config, const std::string& path);

/// Downstream-parameter validation shared by every subcommand.
void validate_config(const ExperimentConfig& config);

}  // namespace cossiga
