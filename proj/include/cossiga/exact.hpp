#pragma once

#include <functional>
#include <string>

namespace cossiga {

/// Manufactured solution with a closed-form physical gradient. The gradient is
/// the quantity the pipeline consumes: right-hand sides are assembled as
/// a(u, phi) and errors are measured in the H^1 seminorm.
struct ExactSolution {
    std::string name;
    int dim = 2;
    std::function<double(const double* x)> value;
    std::function<void(const double* x, double* grad)> gradient;
};

/// Built-in cases: gauss2d, polygauss2d, polygauss3d, poly_only_2d, sine_mode.
ExactSolution exact_solution(const std::string& name);

}  // namespace cossiga
