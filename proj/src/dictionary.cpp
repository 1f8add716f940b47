#include "cossiga/dictionary.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "cossiga/assembly.hpp"

namespace cossiga {

long long level_cardinality(int p, Regularity reg, int level, int dim) {
    const long long per_dir = (reg == Regularity::Cmax) ? ((1LL << level) + p - 2)
                                                        : ((1LL << level) * p - 1);
    long long n = 1;
    for (int k = 0; k < dim; ++k) n *= per_dir;
    return n;
}

DictCardinality dict_cardinality(int p, Regularity reg, int l0, int L, int dim) {
    if (p < 1) throw std::invalid_argument("degree must be >= 1");
    if (l0 < 1 || l0 >= L) throw std::invalid_argument("levels must satisfy 1 <= l0 < L");
    if (dim < 1 || dim > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
    DictCardinality out;
    for (int l = l0; l <= L; ++l) out.n_dict += level_cardinality(p, reg, l, dim);
    out.n_dof = level_cardinality(p, reg, L, dim);
    return out;
}

long long TrialDictionary::atom_index(int level, const std::array<int, 3>& idx) const {
    const long long nint = interior_per_direction(level);
    long long f = idx[0];
    for (int k = 1; k < dim; ++k) f = f * nint + idx[k];
    return level_offsets[level - l0] + f;
}

TrialDictionary build_dictionary(const AssemblyContext& ctx) {
    TrialDictionary dict;
    dict.p = ctx.degree();
    dict.regularity = ctx.regularity();
    dict.l0 = ctx.l0();
    dict.L = ctx.L();
    dict.dim = ctx.dim();
    dict.geometry = ctx.geometry();
    if (dict.l0 >= dict.L) throw std::invalid_argument("levels must satisfy 1 <= l0 < L");

    const DictCardinality card = dict_cardinality(dict.p, dict.regularity, dict.l0, dict.L, dict.dim);
    dict.n_dof = card.n_dof;
    dict.atoms.reserve(card.n_dict);

    for (int l = dict.l0; l <= dict.L; ++l) {
        dict.level_knots.push_back(ctx.level_knots(l));
        dict.level_offsets.push_back(static_cast<long long>(dict.atoms.size()));
        const int nint = dict.level_knots.back().num_interior();
        std::array<int, 3> idx = {0, 0, 0};
        while (true) {
            DictAtom atom;
            atom.level = l;
            atom.index = idx;
            atom.gamma = ctx.trial_seminorm(l, idx);
            if (!(atom.gamma > 0.0)) throw geometry_error("nonpositive atom normalization");
            dict.atoms.push_back(atom);
            int k = dict.dim - 1;
            while (k >= 0 && ++idx[k] == nint) idx[k--] = 0;
            if (k < 0) break;
        }
    }
    if (dict.n_dict() != card.n_dict)
        throw std::logic_error("constructed atom count disagrees with the closed form");
    return dict;
}

TrialDictionary build_dictionary(int p, Regularity reg, int l0, int L,
                                 const GeometryPatch& geometry, const QuadratureSpec& quad) {
    if (l0 < 1 || l0 >= L) throw std::invalid_argument("levels must satisfy 1 <= l0 < L");
    AssemblyContext ctx(geometry, quad, p, reg, l0, L, /*R=*/0);
    return build_dictionary(ctx);
}

TrialEval eval_trial(const TrialDictionary& dict, long long j, const Eigen::VectorXd& xi) {
    if (j < 0 || j >= dict.n_dict()) throw std::out_of_range("atom index out of range");
    const DictAtom& atom = dict.atoms[j];
    const KnotVector& kv = dict.knots_at(atom.level);
    const int d = dict.dim;

    double vals[3], ders[3];
    for (int k = 0; k < d; ++k) {
        const BasisEval be = eval_basis(kv, xi[k]);
        const int f = atom.index[k] + 1;
        const int t = f - be.first_index;
        if (t < 0 || t > dict.p) {
            vals[k] = 0.0;
            ders[k] = 0.0;
        } else {
            vals[k] = be.values[t];
            ders[k] = be.derivatives[t];
        }
    }

    TrialEval out;
    out.gradient = Eigen::VectorXd::Zero(d);
    double v = 1.0;
    for (int k = 0; k < d; ++k) v *= vals[k];
    out.value = v / atom.gamma;
    for (int k = 0; k < d; ++k) {
        double g = 1.0;
        for (int i = 0; i < d; ++i) g *= (i == k) ? ders[i] : vals[i];
        out.gradient[k] = g / atom.gamma;
    }
    return out;
}

void write_atoms_csv(const TrialDictionary& dict, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "j,level";
    for (int k = 0; k < dict.dim; ++k) out << ",i" << (k + 1);
    out << ",gamma\n";
    char buf[64];
    for (long long j = 0; j < dict.n_dict(); ++j) {
        const DictAtom& a = dict.atoms[j];
        out << (j + 1) << "," << a.level;
        for (int k = 0; k < dict.dim; ++k) out << "," << (a.index[k] + 1);
        std::snprintf(buf, sizeof(buf), "%.17g", a.gamma);
        out << "," << buf << "\n";
    }
}

}  // namespace cossiga
