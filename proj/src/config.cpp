#include "cossiga/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace cossiga {

int ExperimentConfig::resolve_s(long long n_dof) const {
    if (s) return *s;
    if (C) return std::max(1, static_cast<int>(std::llround(lambda * *C * n_dof)));
    throw std::invalid_argument("config must provide s, or C to derive it");
}

long long ExperimentConfig::resolve_m(long long n_dof, int s_eff) const {
    if (m) return *m;
    if (C && D) {
        const double rate = std::min(lambda * lambda * *C * *D, 0.8);
        return std::max<long long>(s_eff, std::llround(rate * n_dof));
    }
    throw std::invalid_argument("config must provide m, or C and D to derive it");
}

ExperimentConfig config_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    ExperimentConfig c;
    if (j.contains("case")) c.case_name = j.at("case").get<std::string>();
    if (j.contains("p")) c.p = j.at("p").get<int>();
    if (j.contains("regularity"))
        c.regularity = regularity_from_string(j.at("regularity").get<std::string>());
    if (j.contains("l0")) c.l0 = j.at("l0").get<int>();
    if (j.contains("L")) c.L = j.at("L").get<int>();
    if (j.contains("s")) c.s = j.at("s").get<int>();
    if (j.contains("m")) c.m = j.at("m").get<long long>();
    if (j.contains("C")) c.C = j.at("C").get<double>();
    if (j.contains("D")) c.D = j.at("D").get<double>();
    if (j.contains("lambda")) c.lambda = j.at("lambda").get<double>();
    if (j.contains("mu")) c.mu = j.at("mu").get<double>();
    if (j.contains("quadrature_points")) c.quadrature_points = j.at("quadrature_points").get<int>();
    if (j.contains("n_runs")) c.n_runs = j.at("n_runs").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("geometry")) c.geometry = j.at("geometry").get<std::string>();
    if (j.contains("levels")) c.levels = j.at("levels").get<std::vector<int>>();
    if (j.contains("s_list")) c.s_list = j.at("s_list").get<std::vector<int>>();
    if (j.contains("m_grid")) c.m_grid = j.at("m_grid").get<std::vector<long long>>();
    return c;
}

std::string config_to_json(const ExperimentConfig& c) {
    nlohmann::json j;
    j["case"] = c.case_name;
    j["p"] = c.p;
    j["regularity"] = to_string(c.regularity);
    j["l0"] = c.l0;
    j["L"] = c.L;
    if (c.s) j["s"] = *c.s;
    if (c.m) j["m"] = *c.m;
    if (c.C) j["C"] = *c.C;
    if (c.D) j["D"] = *c.D;
    j["lambda"] = c.lambda;
    j["mu"] = c.mu;
    if (c.quadrature_points) j["quadrature_points"] = *c.quadrature_points;
    j["n_runs"] = c.n_runs;
    j["seed"] = c.seed;
    j["jobs"] = c.jobs;
    j["output_dir"] = c.output_dir;
    if (c.geometry) j["geometry"] = *c.geometry;
    j["levels"] = c.levels;
    if (!c.s_list.empty()) j["s_list"] = c.s_list;
    if (!c.m_grid.empty()) j["m_grid"] = c.m_grid;
    return j.dump(2);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str());
}

void save_config(const ExperimentConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << config_to_json(config) << "\n";
}

void validate_config(const ExperimentConfig& c) {
    if (c.p < 1) throw std::invalid_argument("p must be >= 1");
    if (c.l0 < 1 || c.l0 >= c.L) throw std::invalid_argument("levels must satisfy 1 <= l0 < L");
    if (c.n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
    if (c.jobs < 1) throw std::invalid_argument("jobs must be >= 1");
    if (c.lambda < 1.0) throw std::invalid_argument("lambda must be >= 1");
    if (!(c.mu > 1.0)) throw std::invalid_argument("mu must exceed 1");
    if (c.s && *c.s < 1) throw std::invalid_argument("s must be >= 1");
    if (c.m && *c.m < 1) throw std::invalid_argument("m must be >= 1");
    if (!c.s && !c.C)
        throw std::invalid_argument("config must provide s, or C to derive it");
    for (int l : c.levels)
        if (l <= c.l0) throw std::invalid_argument("convergence levels must exceed l0");
}

}  // namespace cossiga
