#include "qcopf/conic.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "compiled.hpp"

namespace qcopf {

VarId ConicProgram::add_var(double lo, double hi, std::string name) {
    boxes.push_back(Interval{lo, hi});
    names.push_back(std::move(name));
    return num_vars++;
}

void ConicProgram::set_objective_coeff(VarId v, double c) {
    for (auto& [id, coeff] : objective)
        if (id == v) { coeff = c; return; }
    objective.emplace_back(v, c);
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::numerical_failure: return "numerical-failure";
        case SolveStatus::iteration_limit: return "iteration-limit";
    }
    return "?";
}

double ResidualReport::max_violation() const {
    return std::max(max_row_violation, std::max(max_cone_violation, max_box_violation));
}

ResidualReport evaluate(const ConicProgram& p, const std::vector<double>& point) {
    if (static_cast<int>(point.size()) != p.num_vars)
        throw std::invalid_argument("point length does not match num_vars");
    ResidualReport r;
    for (const auto& row : p.rows)
        r.max_row_violation = std::max(r.max_row_violation, -row.slack(point));
    for (const auto& cone : p.socs) {
        double nrm2 = 0.0;
        for (std::size_t i = 1; i < cone.vars.size(); ++i) {
            const double v = point[cone.vars[i]];
            nrm2 += v * v;
        }
        r.max_cone_violation =
            std::max(r.max_cone_violation, std::sqrt(nrm2) - point[cone.vars[0]]);
    }
    for (const auto& cone : p.rsocs) {
        const double u = point[cone.vars[0]], v = point[cone.vars[1]];
        double nrm2 = 0.0;
        for (std::size_t i = 2; i < cone.vars.size(); ++i) {
            const double x = point[cone.vars[i]];
            nrm2 += x * x;
        }
        r.max_cone_violation = std::max({r.max_cone_violation, nrm2 - 2.0 * u * v, -u, -v});
    }
    for (int i = 0; i < p.num_vars; ++i) {
        r.max_box_violation = std::max(r.max_box_violation, p.boxes[i].lo - point[i]);
        r.max_box_violation = std::max(r.max_box_violation, point[i] - p.boxes[i].hi);
    }
    r.objective = p.objective_constant;
    for (const auto& [id, c] : p.objective) r.objective += c * point[id];
    return r;
}

std::string dump_json(const ConicProgram& p) {
    nlohmann::json j;
    j["num_vars"] = p.num_vars;
    j["objective_constant"] = p.objective_constant;
    nlohmann::json obj = nlohmann::json::array();
    for (const auto& [id, c] : p.objective) obj.push_back({{"var", id}, {"coeff", c}});
    j["objective"] = obj;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : p.rows) {
        nlohmann::json r;
        nlohmann::json coeffs = nlohmann::json::array();
        for (const auto& [id, c] : row.coeffs) coeffs.push_back({{"var", id}, {"coeff", c}});
        r["coeffs"] = coeffs;
        r["rhs"] = row.rhs;
        r["sense"] = row.sense == Sense::LE ? "<=" : (row.sense == Sense::GE ? ">=" : "==");
        rows.push_back(r);
    }
    j["rows"] = rows;
    nlohmann::json socs = nlohmann::json::array();
    for (const auto& c : p.socs) socs.push_back(c.vars);
    j["soc"] = socs;
    nlohmann::json rsocs = nlohmann::json::array();
    for (const auto& c : p.rsocs) rsocs.push_back(c.vars);
    j["rotated_soc"] = rsocs;
    nlohmann::json boxes = nlohmann::json::array();
    for (const auto& b : p.boxes) {
        nlohmann::json jb;
        if (std::isfinite(b.lo)) jb["lo"] = b.lo;
        if (std::isfinite(b.hi)) jb["hi"] = b.hi;
        boxes.push_back(jb);
    }
    j["boxes"] = boxes;
    if (!p.names.empty()) j["names"] = p.names;
    return j.dump(2);
}

namespace detail {

namespace {

constexpr double kFixTol = 1e-12;

void check_well_formed(const ConicProgram& p) {
    const auto check_var = [&](VarId v) {
        if (v < 0 || v >= p.num_vars) throw std::invalid_argument("variable id out of range");
    };
    for (const auto& row : p.rows) {
        if (row.coeffs.empty()) throw std::invalid_argument("row with no coefficients");
        for (const auto& [id, c] : row.coeffs) {
            (void)c;
            check_var(id);
        }
    }
    for (const auto& c : p.socs) {
        if (c.vars.size() < 2) throw std::invalid_argument("SOC cone needs at least 2 entries");
        for (VarId v : c.vars) check_var(v);
    }
    for (const auto& c : p.rsocs) {
        if (c.vars.size() < 3)
            throw std::invalid_argument("rotated cone needs at least 3 entries");
        for (VarId v : c.vars) check_var(v);
    }
    if (static_cast<int>(p.boxes.size()) != p.num_vars)
        throw std::invalid_argument("boxes size does not match num_vars");
}

} // namespace

StandardForm compile(const ConicProgram& p) {
    check_well_formed(p);

    StandardForm sf;
    sf.obj_constant = p.objective_constant;
    sf.col_of_var.assign(p.num_vars, -1);
    sf.fixed_value.assign(p.num_vars, 0.0);

    int n = 0;
    for (int v = 0; v < p.num_vars; ++v) {
        const Interval& b = p.boxes[v];
        if (std::isfinite(b.lo) && std::isfinite(b.hi) && b.hi - b.lo < kFixTol) {
            sf.fixed_value[v] = 0.5 * (b.lo + b.hi);
        } else {
            sf.col_of_var[v] = n++;
        }
    }
    sf.n = n;

    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    for (const auto& [id, coeff] : p.objective) {
        if (sf.col_of_var[id] >= 0)
            c[sf.col_of_var[id]] += coeff;
        else
            sf.obj_constant += coeff * sf.fixed_value[id];
    }
    sf.c = c;

    using T = Eigen::Triplet<double>;
    std::vector<T> at, gt;
    std::vector<double> bv, hv;
    int eq_rows = 0, ineq_rows = 0;

    const auto infeasible_early = [&](const std::string& why) {
        SolveResult r;
        r.status = SolveStatus::infeasible;
        r.message = why;
        sf.early = r;
    };

    // linear rows: equalities into A, inequalities normalized to <= into G
    for (const auto& row : p.rows) {
        double rhs = row.rhs;
        std::vector<std::pair<int, double>> free_part;
        for (const auto& [id, coeff] : row.coeffs) {
            if (coeff == 0.0) continue;
            if (sf.col_of_var[id] >= 0)
                free_part.emplace_back(sf.col_of_var[id], coeff);
            else
                rhs -= coeff * sf.fixed_value[id];
        }
        if (free_part.empty()) {
            const double tol = 1e-9 * std::max(1.0, std::abs(row.rhs));
            const bool ok = row.sense == Sense::LE   ? 0.0 <= rhs + tol
                            : row.sense == Sense::GE ? 0.0 >= rhs - tol
                                                     : std::abs(rhs) <= tol;
            if (!ok && !sf.early) infeasible_early("constant row infeasible after presolve");
            continue;
        }
        if (row.sense == Sense::EQ) {
            for (const auto& [j, coeff] : free_part) at.emplace_back(eq_rows, j, coeff);
            bv.push_back(rhs);
            ++eq_rows;
        } else {
            const double sgn = row.sense == Sense::LE ? 1.0 : -1.0;
            for (const auto& [j, coeff] : free_part) gt.emplace_back(ineq_rows, j, sgn * coeff);
            hv.push_back(sgn * rhs);
            ++ineq_rows;
        }
    }

    // boxes become slack rows
    for (int v = 0; v < p.num_vars; ++v) {
        const int j = sf.col_of_var[v];
        if (j < 0) continue;
        const Interval& b = p.boxes[v];
        if (std::isfinite(b.hi)) {
            gt.emplace_back(ineq_rows++, j, 1.0);
            hv.push_back(b.hi);
        }
        if (std::isfinite(b.lo)) {
            gt.emplace_back(ineq_rows++, j, -1.0);
            hv.push_back(-b.lo);
        }
    }

    if (ineq_rows == 0) {
        // keep the cone machinery well-posed with one trivial slack row
        hv.push_back(1.0);
        ++ineq_rows;
    }
    sf.n_lp = ineq_rows;

    const auto conic_entry = [&](VarId v, double coeff) {
        if (sf.col_of_var[v] >= 0) {
            gt.emplace_back(ineq_rows, sf.col_of_var[v], -coeff);
            hv.push_back(0.0);
        } else {
            hv.push_back(coeff * sf.fixed_value[v]);
        }
        ++ineq_rows;
    };

    for (const auto& cone : p.socs) {
        for (VarId v : cone.vars) conic_entry(v, 1.0);
        sf.soc_dims.push_back(static_cast<int>(cone.vars.size()));
    }
    const double rt2 = std::sqrt(2.0);
    for (const auto& cone : p.rsocs) {
        // (u, v, x) with 2uv >= ||x||^2  ->  (u+v, u-v, sqrt(2) x) in SOC
        const VarId u = cone.vars[0], v = cone.vars[1];
        const int r0 = ineq_rows;
        hv.push_back(0.0);
        hv.push_back(0.0);
        if (sf.col_of_var[u] >= 0) {
            gt.emplace_back(r0, sf.col_of_var[u], -1.0);
            gt.emplace_back(r0 + 1, sf.col_of_var[u], -1.0);
        } else {
            hv[r0] += sf.fixed_value[u];
            hv[r0 + 1] += sf.fixed_value[u];
        }
        if (sf.col_of_var[v] >= 0) {
            gt.emplace_back(r0, sf.col_of_var[v], -1.0);
            gt.emplace_back(r0 + 1, sf.col_of_var[v], 1.0);
        } else {
            hv[r0] += sf.fixed_value[v];
            hv[r0 + 1] -= sf.fixed_value[v];
        }
        ineq_rows += 2;
        for (std::size_t i = 2; i < cone.vars.size(); ++i) conic_entry(cone.vars[i], rt2);
        sf.soc_dims.push_back(static_cast<int>(cone.vars.size()) + 1);
    }

    sf.A.resize(eq_rows, n);
    sf.A.setFromTriplets(at.begin(), at.end());
    sf.G.resize(ineq_rows, n);
    sf.G.setFromTriplets(gt.begin(), gt.end());
    sf.b = Eigen::Map<Eigen::VectorXd>(bv.data(), static_cast<Eigen::Index>(bv.size()));
    sf.h = Eigen::Map<Eigen::VectorXd>(hv.data(), static_cast<Eigen::Index>(hv.size()));

    if (n == 0 && !sf.early) {
        // everything fixed: verify cone membership at the fixed point, report
        SolveResult r;
        std::vector<double> pt(p.num_vars);
        for (int v = 0; v < p.num_vars; ++v) pt[v] = sf.fixed_value[v];
        const ResidualReport rr = evaluate(p, pt);
        if (rr.max_violation() > 1e-9) {
            r.status = SolveStatus::infeasible;
            r.message = "fixed point violates constraints";
        } else {
            r.status = SolveStatus::optimal;
            r.primal = pt;
            r.objective = rr.objective;
        }
        sf.early = r;
    }
    return sf;
}

} // namespace detail

SolveResult builtin_solve(const ConicProgram& p, const SolveOptions& opts) {
    detail::StandardForm sf = detail::compile(p);
    if (sf.early) return *sf.early;

    SolveResult r = detail::solve_standard(sf, opts);

    if (!r.primal.empty()) {
        std::vector<double> full(p.num_vars);
        for (int v = 0; v < p.num_vars; ++v) {
            const int j = sf.col_of_var[v];
            full[v] = j >= 0 ? r.primal[j] : sf.fixed_value[v];
        }
        r.primal = std::move(full);
        double obj = sf.obj_constant;
        for (const auto& [id, c] : p.objective) obj += c * r.primal[id];
        r.objective = obj;
    } else if (r.status == SolveStatus::optimal) {
        r.objective += sf.obj_constant;
    }
    return r;
}

SolveBackend& solve_backend() {
    static SolveBackend backend = builtin_solve;
    return backend;
}

SolveResult solve(const ConicProgram& p, const SolveOptions& opts) {
    return solve_backend()(p, opts);
}

} // namespace qcopf
