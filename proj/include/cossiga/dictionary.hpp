#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "cossiga/geometry.hpp"
#include "cossiga/quadrature.hpp"
#include "cossiga/splines.hpp"

namespace cossiga {

class AssemblyContext;

struct DictCardinality {
    long long n_dict = 0;
    long long n_dof = 0;
};

/// Interior B-splines per direction at one level: 2^l+p-2 (Cmax), 2^l*p-1 (C0).
long long level_cardinality(int p, Regularity reg, int level, int dim);

/// Closed-form dictionary size and span dimension for levels l0..L in dim d.
DictCardinality dict_cardinality(int p, Regularity reg, int l0, int L, int dim);

/// One dictionary entry: a level, a per-direction interior index (0-based,
/// mapping to full univariate index + 1) and the H^1(Omega) seminorm of the
/// unnormalized mapped spline.
struct DictAtom {
    int level = 0;
    std::array<int, 3> index = {0, 0, 0};
    double gamma = 0.0;
};

/// Multilevel interior B-spline dictionary on a geometry patch, ordered
/// lexicographically in (level, tensor index), last tensor index fastest.
struct TrialDictionary {
    int p = 1;
    Regularity regularity = Regularity::Cmax;
    int l0 = 1;
    int L = 2;
    int dim = 2;
    GeometryPatch geometry;
    std::vector<KnotVector> level_knots;  // index 0 = level l0
    std::vector<DictAtom> atoms;
    long long n_dof = 0;

    long long n_dict() const { return static_cast<long long>(atoms.size()); }
    const KnotVector& knots_at(int level) const { return level_knots.at(level - l0); }
    /// Interior functions per direction at a level.
    int interior_per_direction(int level) const { return knots_at(level).num_interior(); }
    /// Flat atom index of (level, interior tensor index).
    long long atom_index(int level, const std::array<int, 3>& idx) const;
    std::vector<long long> level_offsets;  // atom index of the first atom per level
};

/// Enumerates atoms and computes every normalization constant by quadrature of
/// |grad B|^2 pulled back to the parametric domain, restricted to the atom support.
TrialDictionary build_dictionary(int p, Regularity reg, int l0, int L,
                                 const GeometryPatch& geometry, const QuadratureSpec& quad);
TrialDictionary build_dictionary(const AssemblyContext& ctx);

struct TrialEval {
    double value = 0.0;
    Eigen::VectorXd gradient;  // parametric
};

/// Value and parametric gradient of atom j at xi, both divided by gamma_j.
TrialEval eval_trial(const TrialDictionary& dict, long long j, const Eigen::VectorXd& xi);

/// Atom table as CSV: j, level, tensor index per direction, gamma (1-based j/indices).
void write_atoms_csv(const TrialDictionary& dict, const std::string& path);

}  // namespace cossiga
