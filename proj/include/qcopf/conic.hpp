#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qcopf/envelopes.hpp"

namespace qcopf {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// vars[0] >= || (vars[1], ..., vars[k]) ||_2
struct SocCone {
    std::vector<VarId> vars;
};

/// 2 * vars[0] * vars[1] >= sum_{i>=2} vars[i]^2, with vars[0], vars[1] >= 0
struct RotatedCone {
    std::vector<VarId> vars;
};

struct ConicProgram {
    int num_vars = 0;
    std::vector<std::pair<VarId, double>> objective; // minimized
    double objective_constant = 0.0;
    std::vector<LinearFacet> rows;
    std::vector<SocCone> socs;
    std::vector<RotatedCone> rsocs;
    std::vector<Interval> boxes;     // per-variable; +-inf for free sides
    std::vector<std::string> names;  // per-variable, for debug dumps

    VarId add_var(double lo, double hi, std::string name = {});
    void set_objective_coeff(VarId v, double c);
    void add_row(LinearFacet f) { rows.push_back(std::move(f)); }
};

enum class SolveStatus {
    optimal,
    infeasible,
    unbounded,
    numerical_failure,
    iteration_limit,
};

std::string to_string(SolveStatus s);

struct SolveResult {
    SolveStatus status = SolveStatus::numerical_failure;
    std::vector<double> primal;  // full length num_vars; populated when optimal
    double objective = std::numeric_limits<double>::quiet_NaN();
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    int iterations = 0;
    double wall_time_s = 0.0;
    std::string message;
};

struct SolveOptions {
    double feas_tol = 1e-8;
    double gap_tol = 1e-8;
    int max_iters = 200;
};

/// Per-family worst violations of a candidate point.
struct ResidualReport {
    double max_row_violation = 0.0;
    double max_cone_violation = 0.0;
    double max_box_violation = 0.0;
    double objective = 0.0;
    double max_violation() const;
};

SolveResult solve(const ConicProgram& p, const SolveOptions& opts = {});
ResidualReport evaluate(const ConicProgram& p, const std::vector<double>& point);

/// Debug dump of a program (schema documented in the README).
std::string dump_json(const ConicProgram& p);

/// Replaceable solver backend; defaults to the built-in interior-point method.
using SolveBackend = std::function<SolveResult(const ConicProgram&, const SolveOptions&)>;
SolveBackend& solve_backend();
SolveResult builtin_solve(const ConicProgram& p, const SolveOptions& opts);

} // namespace qcopf
