#include "qcopf/qcmodel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace qcopf {

namespace {

constexpr double kHalfPi = 0.5 * std::numbers::pi;
constexpr double kDenTol = 1e-12;

std::string kind_name(VarKind k) {
    switch (k) {
        case VarKind::pg: return "pg";
        case VarKind::qg: return "qg";
        case VarKind::theta: return "theta";
        case VarKind::vmag: return "v";
        case VarKind::wii: return "wii";
        case VarKind::wpair: return "w";
        case VarKind::cpair: return "c";
        case VarKind::spair: return "s";
        case VarKind::cos_dummy: return "cosd";
        case VarKind::sin_dummy: return "sind";
        case VarKind::theta_diff: return "thd";
        case VarKind::pf: return "pf";
        case VarKind::qf: return "qf";
        case VarKind::pt: return "pt";
        case VarKind::qt: return "qt";
        case VarKind::vdiff: return "vd";
        case VarKind::wdiff: return "wd";
        case VarKind::what_l: return "whl";
        case VarKind::what_m: return "whm";
        case VarKind::cost_epi: return "cepi";
        case VarKind::const_half: return "half";
        case VarKind::jabr_half: return "jhalf";
        case VarKind::flow_limit: return "smax";
        case VarKind::cos_dev: return "cdev";
        case VarKind::cos_arg: return "carg";
        case VarKind::vdsq_bound: return "vdsq";
    }
    return "?";
}

} // namespace

std::string to_string(const VarTag& tag) {
    return kind_name(tag.kind) + "[" + std::to_string(tag.index) + "]";
}

VarId QcModel::var(const VarTag& tag) const {
    const auto it = var_map.find(tag);
    if (it == var_map.end()) throw std::out_of_range("model has no variable " + to_string(tag));
    return it->second;
}

BoundSet initial_bounds(const Network& net, bool with_vdiff) {
    BoundSet b;
    b.v.reserve(net.buses.size());
    for (const auto& bus : net.buses) b.v.emplace_back(bus.v_min, bus.v_max);
    b.theta.reserve(net.branches.size());
    for (const auto& br : net.branches) b.theta.emplace_back(br.theta_min, br.theta_max);
    if (with_vdiff) {
        b.vdiff.reserve(net.branches.size());
        for (const auto& br : net.branches) {
            const Interval& vl = b.v[net.bus_index(br.from_bus)];
            const Interval& vm = b.v[net.bus_index(br.to_bus)];
            b.vdiff.emplace_back(vl.lo - vm.hi, vl.hi - vm.lo);
        }
    }
    return b;
}

namespace {

Interval orient(const Interval& iv, bool reversed) {
    return reversed ? Interval{-iv.hi, -iv.lo} : iv;
}

std::vector<PairInfo> derive_pairs(const BoundSet& bounds, const Network& net) {
    std::map<std::pair<int, int>, PairInfo> by_key;
    for (std::size_t e = 0; e < net.branches.size(); ++e) {
        const Branch& br = net.branches[e];
        const int fi = net.bus_index(br.from_bus);
        const int ti = net.bus_index(br.to_bus);
        const bool reversed = fi > ti;
        const std::pair<int, int> key{std::min(fi, ti), std::max(fi, ti)};
        auto [it, fresh] = by_key.try_emplace(key);
        PairInfo& p = it->second;
        const Interval th = orient(bounds.theta[e], reversed);
        Interval vd{-kInf, kInf};
        if (!bounds.vdiff.empty()) vd = orient(bounds.vdiff[e], reversed);
        if (fresh) {
            p.l = key.first;
            p.m = key.second;
            p.theta = th;
            p.vdiff = vd;
        } else {
            p.theta = interval_intersect(p.theta, th);
            if (!bounds.vdiff.empty()) p.vdiff = interval_intersect(p.vdiff, vd);
        }
        p.branches.push_back(static_cast<int>(e));
    }
    std::vector<PairInfo> pairs;
    pairs.reserve(by_key.size());
    for (auto& [key, p] : by_key) pairs.push_back(std::move(p));
    return pairs;
}

} // namespace

LiftedBounds derive_lifted_bounds(const BoundSet& bounds, const Network& net) {
    LiftedBounds lb;
    lb.pairs = derive_pairs(bounds, net);
    lb.wii.reserve(bounds.v.size());
    for (const auto& v : bounds.v) lb.wii.push_back(interval_square(v));
    const bool with_vd = !bounds.vdiff.empty();
    for (const auto& p : lb.pairs) {
        const Interval& vl = bounds.v[p.l];
        const Interval& vm = bounds.v[p.m];
        const Interval w = interval_product(vl, vm);
        lb.wpair.push_back(w);
        const TrigBounds tb = trig_bounds(p.theta);
        lb.cos_dummy.push_back(tb.c);
        lb.sin_dummy.push_back(tb.s);
        lb.cpair.push_back(interval_product(w, tb.c));
        lb.spair.push_back(interval_product(w, tb.s));
        if (with_vd) {
            lb.wdiff.push_back(interval_square(p.vdiff));
            lb.what_l.push_back(interval_product(p.vdiff, vl));
            lb.what_m.push_back(interval_product(p.vdiff, vm));
        }
    }
    return lb;
}

namespace {

void check_bounds(const Network& net, const BoundSet& bounds, bool use_vdiff) {
    if (bounds.v.size() != net.buses.size())
        throw BuildError("bound set has wrong voltage entry count");
    if (bounds.theta.size() != net.branches.size())
        throw BuildError("bound set has wrong angle entry count");
    for (std::size_t i = 0; i < bounds.v.size(); ++i)
        if (!(bounds.v[i].lo > 0.0))
            throw BuildError("non-positive voltage lower bound at bus " +
                             std::to_string(net.buses[i].id));
    for (std::size_t e = 0; e < bounds.theta.size(); ++e)
        if (bounds.theta[e].lo <= -kHalfPi || bounds.theta[e].hi >= kHalfPi)
            throw BuildError("angle bounds of branch " + std::to_string(net.branches[e].id) +
                             " are not inside (-pi/2, pi/2)");
    if (use_vdiff && !bounds.vdiff.empty()) {
        for (std::size_t e = 0; e < bounds.vdiff.size(); ++e) {
            const Branch& br = net.branches[e];
            const Interval& vl = bounds.v[net.bus_index(br.from_bus)];
            const Interval& vm = bounds.v[net.bus_index(br.to_bus)];
            if (bounds.vdiff[e].lo < vl.lo - vm.hi - 1e-9 ||
                bounds.vdiff[e].hi > vl.hi - vm.lo + 1e-9)
                throw BuildError("magnitude-difference bounds of branch " +
                                 std::to_string(br.id) +
                                 " exceed the range implied by the voltage boxes");
        }
    }
}

} // namespace

QcModel build(const Network& net, const BoundSet& bounds_in, const QcVariant& variant) {
    check_bounds(net, bounds_in, variant.use_vdiff);
    BoundSet bounds = bounds_in;
    if (variant.use_vdiff && bounds.vdiff.empty())
        bounds.vdiff = initial_bounds(net, true).vdiff;
    if (!variant.use_vdiff) bounds.vdiff.clear();
    if ((variant.objective == ObjectiveKind::cost) != !variant.target.has_value())
        throw BuildError("objective target must be present exactly when objective is not cost");

    QcModel model;
    model.bounds = bounds;
    model.variant = variant;

    LiftedBounds lb = derive_lifted_bounds(bounds, net);
    model.pairs = lb.pairs;
    const auto& pairs = model.pairs;
    const std::size_t n_pairs = pairs.size();

    ConicProgram& prog = model.program;
    const auto add = [&](VarKind k, int idx, const Interval& box) {
        const VarId v = prog.add_var(box.lo, box.hi, kind_name(k) + std::to_string(idx));
        model.var_map.emplace(VarTag{k, idx}, v);
        return v;
    };

    // --- variables ---
    for (std::size_t k = 0; k < net.generators.size(); ++k) {
        const Generator& g = net.generators[k];
        add(VarKind::pg, static_cast<int>(k), {g.p_min, g.p_max});
        add(VarKind::qg, static_cast<int>(k), {g.q_min, g.q_max});
    }
    const int ref = net.reference_index();
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        const bool is_ref = static_cast<int>(i) == ref;
        add(VarKind::theta, static_cast<int>(i),
            is_ref ? Interval{0.0, 0.0} : Interval{-kInf, kInf});
        add(VarKind::vmag, static_cast<int>(i), bounds.v[i]);
        add(VarKind::wii, static_cast<int>(i), lb.wii[i]);
    }
    for (std::size_t p = 0; p < n_pairs; ++p) {
        add(VarKind::wpair, static_cast<int>(p), lb.wpair[p]);
        add(VarKind::cpair, static_cast<int>(p), lb.cpair[p]);
        add(VarKind::spair, static_cast<int>(p), lb.spair[p]);
        add(VarKind::cos_dummy, static_cast<int>(p), lb.cos_dummy[p]);
        add(VarKind::sin_dummy, static_cast<int>(p), lb.sin_dummy[p]);
        add(VarKind::theta_diff, static_cast<int>(p), pairs[p].theta);
    }
    for (std::size_t e = 0; e < net.branches.size(); ++e) {
        add(VarKind::pf, static_cast<int>(e), {-kInf, kInf});
        add(VarKind::qf, static_cast<int>(e), {-kInf, kInf});
        add(VarKind::pt, static_cast<int>(e), {-kInf, kInf});
        add(VarKind::qt, static_cast<int>(e), {-kInf, kInf});
    }
    if (variant.use_vdiff) {
        for (std::size_t p = 0; p < n_pairs; ++p) {
            add(VarKind::vdiff, static_cast<int>(p), pairs[p].vdiff);
            add(VarKind::wdiff, static_cast<int>(p), lb.wdiff[p]);
            add(VarKind::what_l, static_cast<int>(p), lb.what_l[p]);
            add(VarKind::what_m, static_cast<int>(p), lb.what_m[p]);
            add(VarKind::vdsq_bound, static_cast<int>(p), {0.0, kInf});
        }
    }
    const VarId half = add(VarKind::const_half, 0, {0.5, 0.5});
    for (std::size_t p = 0; p < n_pairs; ++p)
        add(VarKind::jabr_half, static_cast<int>(p),
            {0.5 * lb.wii[pairs[p].m].lo, 0.5 * lb.wii[pairs[p].m].hi});
    for (std::size_t e = 0; e < net.branches.size(); ++e)
        if (!net.branches[e].unlimited)
            add(VarKind::flow_limit, static_cast<int>(e),
                {net.branches[e].s_max, net.branches[e].s_max});

    // --- objective ---
    if (variant.objective == ObjectiveKind::cost) {
        for (std::size_t k = 0; k < net.generators.size(); ++k) {
            const Generator& g = net.generators[k];
            const VarId pg = model.var({VarKind::pg, static_cast<int>(k)});
            if (g.cost_c2 > 0.0) {
                const VarId t = add(VarKind::cost_epi, static_cast<int>(k), {0.0, kInf});
                prog.rsocs.push_back({{t, half, pg}}); // t >= pg^2
                prog.set_objective_coeff(t, g.cost_c2);
            }
            if (g.cost_c1 != 0.0) prog.set_objective_coeff(pg, g.cost_c1);
            prog.objective_constant += g.cost_c0;
        }
    } else {
        const double sign = variant.objective == ObjectiveKind::min_variable ? 1.0 : -1.0;
        prog.set_objective_coeff(model.var(*variant.target), sign);
    }

    // --- per-bus constraints ---
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        const Bus& bus = net.buses[i];
        const VarId v = model.var({VarKind::vmag, static_cast<int>(i)});
        const VarId w = model.var({VarKind::wii, static_cast<int>(i)});
        const SquareEnvelope env = square_envelope(v, w, bounds.v[i]);
        prog.add_row(env.upper);
        prog.rsocs.push_back({{w, half, v}}); // w >= v^2

        LinearFacet pbal({{w, -bus.g_shunt}}, bus.p_load, Sense::EQ);
        LinearFacet qbal({{w, bus.b_shunt}}, bus.q_load, Sense::EQ);
        for (std::size_t k = 0; k < net.generators.size(); ++k) {
            if (net.bus_index(net.generators[k].bus) != static_cast<int>(i)) continue;
            pbal.coeffs.emplace_back(model.var({VarKind::pg, static_cast<int>(k)}), 1.0);
            qbal.coeffs.emplace_back(model.var({VarKind::qg, static_cast<int>(k)}), 1.0);
        }
        for (std::size_t e = 0; e < net.branches.size(); ++e) {
            const Branch& br = net.branches[e];
            if (net.bus_index(br.from_bus) == static_cast<int>(i)) {
                pbal.coeffs.emplace_back(model.var({VarKind::pf, static_cast<int>(e)}), -1.0);
                qbal.coeffs.emplace_back(model.var({VarKind::qf, static_cast<int>(e)}), -1.0);
            }
            if (net.bus_index(br.to_bus) == static_cast<int>(i)) {
                pbal.coeffs.emplace_back(model.var({VarKind::pt, static_cast<int>(e)}), -1.0);
                qbal.coeffs.emplace_back(model.var({VarKind::qt, static_cast<int>(e)}), -1.0);
            }
        }
        prog.add_row(std::move(pbal));
        prog.add_row(std::move(qbal));
    }

    // --- per-pair constraints ---
    for (std::size_t p = 0; p < n_pairs; ++p) {
        const PairInfo& pr = pairs[p];
        const int pi = static_cast<int>(p);
        const VarId thl = model.var({VarKind::theta, pr.l});
        const VarId thm = model.var({VarKind::theta, pr.m});
        const VarId thd = model.var({VarKind::theta_diff, pi});
        const VarId vl = model.var({VarKind::vmag, pr.l});
        const VarId vm = model.var({VarKind::vmag, pr.m});
        const VarId wll = model.var({VarKind::wii, pr.l});
        const VarId wmm = model.var({VarKind::wii, pr.m});
        const VarId w = model.var({VarKind::wpair, pi});
        const VarId cp = model.var({VarKind::cpair, pi});
        const VarId sp = model.var({VarKind::spair, pi});
        const VarId cd = model.var({VarKind::cos_dummy, pi});
        const VarId sd = model.var({VarKind::sin_dummy, pi});

        prog.add_row(LinearFacet({{thd, 1.0}, {thl, -1.0}, {thm, 1.0}}, 0.0, Sense::EQ));

        for (auto& f : mccormick(vl, vm, w, bounds.v[pr.l], bounds.v[pr.m]))
            prog.add_row(std::move(f));

        for (auto& f : sin_envelope(thd, sd, pr.theta)) prog.add_row(std::move(f));
        CosEnvelope cenv = cos_envelope(thd, cd, pr.theta);
        for (auto& f : cenv.linear) prog.add_row(std::move(f));
        model.pairs[p].cos_quad_coeff = cenv.quadratic_valid ? cenv.quad_coeff : 0.0;
        if (cenv.quadratic_valid) {
            const VarId dev = add(VarKind::cos_dev, pi, {1.0 - lb.cos_dummy[p].hi,
                                                         1.0 - lb.cos_dummy[p].lo});
            const VarId arg = add(VarKind::cos_arg, pi, {-kInf, kInf});
            prog.add_row(LinearFacet({{dev, 1.0}, {cd, 1.0}}, 1.0, Sense::EQ));
            const double rk = std::sqrt(cenv.quad_coeff);
            prog.add_row(LinearFacet({{arg, 1.0}, {thd, -rk}}, 0.0, Sense::EQ));
            prog.rsocs.push_back({{dev, half, arg}}); // dev >= k * thd^2
        }

        std::ostringstream note;
        if (variant.use_mf) {
            const TrilinearEnvelope se =
                mf_trilinear(vl, vm, sd, sp, bounds.v[pr.l], bounds.v[pr.m], lb.sin_dummy[p],
                             /*cosine_mode=*/false);
            const TrilinearEnvelope ce =
                mf_trilinear(vl, vm, cd, cp, bounds.v[pr.l], bounds.v[pr.m], lb.cos_dummy[p],
                             /*cosine_mode=*/true);
            for (const auto& f : se.facets) prog.add_row(f);
            for (const auto& f : ce.facets) prog.add_row(f);
            note << "pair " << pr.l << "-" << pr.m << " sin:";
            for (TriCase c : se.applied) note << " " << to_string(c);
            if (se.lower_fallback) note << " lower-nested";
            if (se.upper_fallback) note << " upper-nested";
            note << "; cos:";
            for (TriCase c : ce.applied) note << " " << to_string(c);
            if (ce.lower_fallback) note << " lower-nested";
            if (ce.upper_fallback) note << " upper-nested";
        } else {
            for (auto& f : mccormick(w, sd, sp, lb.wpair[p], lb.sin_dummy[p]))
                prog.add_row(std::move(f));
            for (auto& f : mccormick(w, cd, cp, lb.wpair[p], lb.cos_dummy[p]))
                prog.add_row(std::move(f));
            note << "pair " << pr.l << "-" << pr.m << " nested";
        }
        model.trilinear_notes.push_back(note.str());

        const VarId jh = model.var({VarKind::jabr_half, pi});
        prog.add_row(LinearFacet({{jh, 2.0}, {wmm, -1.0}}, 0.0, Sense::EQ));
        prog.rsocs.push_back({{wll, jh, cp, sp}}); // c^2 + s^2 <= wll * wmm

        if (variant.use_vdiff) {
            const VarId vd = model.var({VarKind::vdiff, pi});
            const VarId wd = model.var({VarKind::wdiff, pi});
            const VarId whl = model.var({VarKind::what_l, pi});
            const VarId whm = model.var({VarKind::what_m, pi});
            const VarId vdsq = model.var({VarKind::vdsq_bound, pi});

            prog.add_row(LinearFacet({{vd, 1.0}, {vl, -1.0}, {vm, 1.0}}, 0.0, Sense::EQ));
            // w = (wll + wmm - wd) / 2 with wd in the square envelope of vd
            prog.add_row(
                LinearFacet({{w, 2.0}, {wll, -1.0}, {wmm, -1.0}, {wd, 1.0}}, 0.0, Sense::EQ));
            prog.add_row(square_envelope(vd, wd, pr.vdiff).upper);
            prog.rsocs.push_back({{wd, half, vd}}); // wd >= vd^2
            // vd^2 <= wll - 2 w + wmm
            prog.add_row(LinearFacet({{vdsq, 1.0}, {wll, -1.0}, {w, 2.0}, {wmm, -1.0}}, 0.0,
                                     Sense::EQ));
            prog.rsocs.push_back({{vdsq, half, vd}});
            // wll - wmm splits into the two magnitude-difference products
            prog.add_row(LinearFacet({{wll, 1.0}, {wmm, -1.0}, {whl, -1.0}, {whm, -1.0}}, 0.0,
                                     Sense::EQ));
            for (auto& f : mccormick(vd, vl, whl, pr.vdiff, bounds.v[pr.l]))
                prog.add_row(std::move(f));
            for (auto& f : mccormick(vd, vm, whm, pr.vdiff, bounds.v[pr.m]))
                prog.add_row(std::move(f));
        }
    }

    // --- per-branch constraints ---
    for (std::size_t e = 0; e < net.branches.size(); ++e) {
        const Branch& br = net.branches[e];
        const int ei = static_cast<int>(e);
        const int fi = net.bus_index(br.from_bus);
        const int ti = net.bus_index(br.to_bus);
        const bool reversed = fi > ti;
        const double sgn = reversed ? -1.0 : 1.0;
        int pidx = -1;
        for (std::size_t p = 0; p < n_pairs; ++p) {
            if (pairs[p].l == std::min(fi, ti) && pairs[p].m == std::max(fi, ti)) {
                pidx = static_cast<int>(p);
                break;
            }
        }
        const VarId wff = model.var({VarKind::wii, fi});
        const VarId wtt = model.var({VarKind::wii, ti});
        const VarId cp = model.var({VarKind::cpair, pidx});
        const VarId sp = model.var({VarKind::spair, pidx});
        const VarId pf = model.var({VarKind::pf, ei});
        const VarId qf = model.var({VarKind::qf, ei});
        const VarId pt = model.var({VarKind::pt, ei});
        const VarId qt = model.var({VarKind::qt, ei});

        const double t = br.tap, t2 = t * t;
        const double g = br.g, b = br.b, bc2 = 0.5 * br.b_charge;

        prog.add_row(LinearFacet(
            {{pf, 1.0}, {wff, -g / t2}, {cp, g / t}, {sp, sgn * b / t}}, 0.0, Sense::EQ));
        prog.add_row(LinearFacet(
            {{qf, 1.0}, {wff, (b + bc2) / t2}, {cp, -b / t}, {sp, sgn * g / t}}, 0.0, Sense::EQ));
        prog.add_row(LinearFacet(
            {{pt, 1.0}, {wtt, -g}, {cp, g / t}, {sp, -sgn * b / t}}, 0.0, Sense::EQ));
        prog.add_row(LinearFacet(
            {{qt, 1.0}, {wtt, b + bc2}, {cp, -b / t}, {sp, -sgn * g / t}}, 0.0, Sense::EQ));

        if (!br.unlimited) {
            const VarId lim = model.var({VarKind::flow_limit, ei});
            prog.socs.push_back({{lim, pf, qf}});
            prog.socs.push_back({{lim, pt, qt}});
        }

        if (variant.use_vdiff && br.tap == 1.0) {
            const double den = g * g + b * b + b * bc2;
            if (std::abs(den) > kDenTol) {
                prog.add_row(LinearFacet({{wff, den},
                                          {wtt, -den},
                                          {pf, -g},
                                          {pt, g},
                                          {qf, b},
                                          {qt, -b}},
                                         0.0, Sense::EQ));
            }
        }
    }

    return model;
}

BranchFlow ac_branch_flow(const Branch& br, double v_from, double v_to, double theta_lm) {
    const double t = br.tap, t2 = t * t;
    const double g = br.g, b = br.b, bc2 = 0.5 * br.b_charge;
    const double c = v_from * v_to * std::cos(theta_lm);
    const double s = v_from * v_to * std::sin(theta_lm);
    BranchFlow f;
    f.pf = g / t2 * v_from * v_from - g / t * c - b / t * s;
    f.qf = -(b + bc2) / t2 * v_from * v_from + b / t * c - g / t * s;
    f.pt = g * v_to * v_to - g / t * c + b / t * s;
    f.qt = -(b + bc2) * v_to * v_to + b / t * c + g / t * s;
    return f;
}

double AcResiduals::max() const {
    return std::max({balance_p, balance_q, v_bound, theta_bound, gen_bound, flow_limit,
                     ref_angle});
}

double ac_objective(const Network& net, const AcPoint& point) {
    double obj = 0.0;
    for (std::size_t k = 0; k < net.generators.size(); ++k) {
        const Generator& g = net.generators[k];
        obj += g.cost_c2 * point.pg[k] * point.pg[k] + g.cost_c1 * point.pg[k] + g.cost_c0;
    }
    return obj;
}

AcResiduals check_ac_point(const Network& net, const AcPoint& point) {
    AcResiduals r;
    const std::size_t n = net.buses.size();
    std::vector<double> pinj(n, 0.0), qinj(n, 0.0);
    for (std::size_t e = 0; e < net.branches.size(); ++e) {
        const Branch& br = net.branches[e];
        const int fi = net.bus_index(br.from_bus);
        const int ti = net.bus_index(br.to_bus);
        const double th = point.theta[fi] - point.theta[ti];
        const BranchFlow f = ac_branch_flow(br, point.v[fi], point.v[ti], th);
        pinj[fi] += f.pf;
        qinj[fi] += f.qf;
        pinj[ti] += f.pt;
        qinj[ti] += f.qt;
        const Interval tb{br.theta_min, br.theta_max};
        r.theta_bound = std::max({r.theta_bound, tb.lo - th, th - tb.hi});
        if (!br.unlimited) {
            r.flow_limit = std::max(r.flow_limit, std::hypot(f.pf, f.qf) - br.s_max);
            r.flow_limit = std::max(r.flow_limit, std::hypot(f.pt, f.qt) - br.s_max);
        }
    }
    std::vector<double> pg_bus(n, 0.0), qg_bus(n, 0.0);
    for (std::size_t k = 0; k < net.generators.size(); ++k) {
        const Generator& g = net.generators[k];
        const int bi = net.bus_index(g.bus);
        pg_bus[bi] += point.pg[k];
        qg_bus[bi] += point.qg[k];
        r.gen_bound = std::max({r.gen_bound, g.p_min - point.pg[k], point.pg[k] - g.p_max,
                                g.q_min - point.qg[k], point.qg[k] - g.q_max});
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Bus& bus = net.buses[i];
        const double v2 = point.v[i] * point.v[i];
        r.balance_p = std::max(
            r.balance_p,
            std::abs(pg_bus[i] - bus.p_load - bus.g_shunt * v2 - pinj[i]));
        r.balance_q = std::max(
            r.balance_q,
            std::abs(qg_bus[i] - bus.q_load + bus.b_shunt * v2 - qinj[i]));
        r.v_bound = std::max({r.v_bound, bus.v_min - point.v[i], point.v[i] - bus.v_max});
        if (bus.is_reference) r.ref_angle = std::abs(point.theta[i]);
    }
    r.balance_p = std::max(r.balance_p, 0.0);
    r.balance_q = std::max(r.balance_q, 0.0);
    r.v_bound = std::max(r.v_bound, 0.0);
    r.theta_bound = std::max(r.theta_bound, 0.0);
    r.gen_bound = std::max(r.gen_bound, 0.0);
    r.flow_limit = std::max(r.flow_limit, 0.0);
    r.objective = ac_objective(net, point);
    return r;
}

std::vector<double> lift_ac_point(const QcModel& model, const Network& net,
                                  const AcPoint& point) {
    std::vector<double> x(static_cast<std::size_t>(model.program.num_vars), 0.0);
    const auto set = [&](VarKind k, int idx, double value) {
        const auto it = model.var_map.find({k, idx});
        if (it != model.var_map.end()) x[static_cast<std::size_t>(it->second)] = value;
    };

    for (std::size_t k = 0; k < net.generators.size(); ++k) {
        set(VarKind::pg, static_cast<int>(k), point.pg[k]);
        set(VarKind::qg, static_cast<int>(k), point.qg[k]);
        set(VarKind::cost_epi, static_cast<int>(k), point.pg[k] * point.pg[k]);
    }
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        set(VarKind::theta, static_cast<int>(i), point.theta[i]);
        set(VarKind::vmag, static_cast<int>(i), point.v[i]);
        set(VarKind::wii, static_cast<int>(i), point.v[i] * point.v[i]);
    }
    for (std::size_t p = 0; p < model.pairs.size(); ++p) {
        const PairInfo& pr = model.pairs[p];
        const int pi = static_cast<int>(p);
        const double vl = point.v[pr.l], vm = point.v[pr.m];
        const double thd = point.theta[pr.l] - point.theta[pr.m];
        const double w = vl * vm;
        set(VarKind::wpair, pi, w);
        set(VarKind::cos_dummy, pi, std::cos(thd));
        set(VarKind::sin_dummy, pi, std::sin(thd));
        set(VarKind::cpair, pi, w * std::cos(thd));
        set(VarKind::spair, pi, w * std::sin(thd));
        set(VarKind::theta_diff, pi, thd);
        set(VarKind::jabr_half, pi, 0.5 * vm * vm);
        set(VarKind::cos_dev, pi, 1.0 - std::cos(thd));
        set(VarKind::cos_arg, pi, std::sqrt(pr.cos_quad_coeff) * thd);
        const double vd = vl - vm;
        set(VarKind::vdiff, pi, vd);
        set(VarKind::wdiff, pi, vd * vd);
        set(VarKind::what_l, pi, vd * vl);
        set(VarKind::what_m, pi, vd * vm);
        set(VarKind::vdsq_bound, pi, vl * vl - 2.0 * w + vm * vm);
    }
    for (std::size_t e = 0; e < net.branches.size(); ++e) {
        const Branch& br = net.branches[e];
        const int fi = net.bus_index(br.from_bus);
        const int ti = net.bus_index(br.to_bus);
        const BranchFlow f =
            ac_branch_flow(br, point.v[fi], point.v[ti], point.theta[fi] - point.theta[ti]);
        set(VarKind::pf, static_cast<int>(e), f.pf);
        set(VarKind::qf, static_cast<int>(e), f.qf);
        set(VarKind::pt, static_cast<int>(e), f.pt);
        set(VarKind::qt, static_cast<int>(e), f.qt);
        set(VarKind::flow_limit, static_cast<int>(e), br.s_max);
    }
    set(VarKind::const_half, 0, 0.5);
    return x;
}

} // namespace qcopf
