#pragma once

#include <Eigen/Sparse>
#include <optional>
#include <vector>

#include "qcopf/conic.hpp"

namespace qcopf::detail {

/// min c'x  s.t.  Ax = b,  Gx + s = h,  s in R+^{n_lp} x SOC(q_1) x ... x SOC(q_k)
struct StandardForm {
    Eigen::SparseMatrix<double> A, G;
    Eigen::VectorXd b, h, c;
    int n = 0;
    int n_lp = 0;
    std::vector<int> soc_dims;

    // reconstruction data
    std::vector<int> col_of_var;      // -1 when the variable was fixed by presolve
    std::vector<double> fixed_value;  // valid where col_of_var == -1
    double obj_constant = 0.0;

    // set when presolve already decided the outcome (trivially infeasible /
    // fully fixed program)
    std::optional<SolveResult> early;
};

StandardForm compile(const ConicProgram& p);

SolveResult solve_standard(const StandardForm& sf, const SolveOptions& opts);

} // namespace qcopf::detail
