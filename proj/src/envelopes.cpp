#include "qcopf/envelopes.hpp"

#include <algorithm>
#include <cmath>

namespace qcopf {

namespace {

constexpr double kCollapseTol = 1e-12;

} // namespace

double LinearFacet::lhs_value(const std::vector<double>& x) const {
    double v = 0.0;
    for (const auto& [id, c] : coeffs) v += c * x[static_cast<std::size_t>(id)];
    return v;
}

double LinearFacet::slack(const std::vector<double>& x) const {
    const double v = lhs_value(x);
    switch (sense) {
        case Sense::LE: return rhs - v;
        case Sense::GE: return v - rhs;
        case Sense::EQ: return -std::abs(v - rhs);
    }
    return 0.0;
}

Interval interval_product(const Interval& a, const Interval& b) {
    const double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
    return {std::min(std::min(p1, p2), std::min(p3, p4)),
            std::max(std::max(p1, p2), std::max(p3, p4))};
}

Interval interval_intersect(const Interval& a, const Interval& b) {
    double lo = std::max(a.lo, b.lo);
    double hi = std::min(a.hi, b.hi);
    if (lo > hi) {
        if (lo - hi > 1e-9) throw std::domain_error("empty interval intersection");
        lo = hi = 0.5 * (lo + hi);
    }
    return {lo, hi};
}

Interval interval_square(const Interval& a) {
    const double lo2 = a.lo * a.lo, hi2 = a.hi * a.hi;
    if (a.lo <= 0.0 && a.hi >= 0.0) return {0.0, std::max(lo2, hi2)};
    return {std::min(lo2, hi2), std::max(lo2, hi2)};
}

TrigBounds trig_bounds(const Interval& theta) {
    TrigBounds tb;
    tb.s = {std::sin(theta.lo), std::sin(theta.hi)};
    const double cl = std::cos(theta.lo), ch = std::cos(theta.hi);
    const auto sgn = [](double x) { return (x > 0.0) - (x < 0.0); };
    const double chi = (sgn(theta.lo) == sgn(theta.hi)) ? std::max(cl, ch) : 1.0;
    tb.c = {std::min(cl, ch), chi};
    return tb;
}

SquareEnvelope square_envelope(VarId x, VarId xcheck, const Interval& bx) {
    SquareEnvelope env;
    env.x = x;
    env.xcheck = xcheck;
    env.upper = LinearFacet({{xcheck, 1.0}, {x, -(bx.lo + bx.hi)}}, -bx.lo * bx.hi, Sense::LE);
    return env;
}

std::vector<LinearFacet> mccormick(VarId x, VarId y, VarId xy,
                                   const Interval& bx, const Interval& by) {
    std::vector<LinearFacet> f;
    f.reserve(4);
    f.emplace_back(std::vector<std::pair<VarId, double>>{{xy, 1.0}, {y, -bx.lo}, {x, -by.lo}},
                   -bx.lo * by.lo, Sense::GE);
    f.emplace_back(std::vector<std::pair<VarId, double>>{{xy, 1.0}, {y, -bx.hi}, {x, -by.hi}},
                   -bx.hi * by.hi, Sense::GE);
    f.emplace_back(std::vector<std::pair<VarId, double>>{{xy, 1.0}, {y, -bx.lo}, {x, -by.hi}},
                   -bx.lo * by.hi, Sense::LE);
    f.emplace_back(std::vector<std::pair<VarId, double>>{{xy, 1.0}, {y, -bx.hi}, {x, -by.lo}},
                   -bx.hi * by.lo, Sense::LE);
    return f;
}

std::vector<LinearFacet> sin_envelope(VarId theta, VarId scheck, const Interval& b) {
    std::vector<LinearFacet> f;
    if (b.is_point(kCollapseTol)) {
        f.emplace_back(std::vector<std::pair<VarId, double>>{{scheck, 1.0}},
                       std::sin(b.mid()), Sense::EQ);
        return f;
    }
    const double xm = std::max(std::abs(b.lo), std::abs(b.hi));
    const double ct = std::cos(0.5 * xm), st = std::sin(0.5 * xm);
    // tangent pair at +-xm/2
    f.emplace_back(std::vector<std::pair<VarId, double>>{{scheck, 1.0}, {theta, -ct}},
                   st - ct * 0.5 * xm, Sense::LE);
    f.emplace_back(std::vector<std::pair<VarId, double>>{{scheck, 1.0}, {theta, -ct}},
                   -st + ct * 0.5 * xm, Sense::GE);
    const double slope = (std::sin(b.lo) - std::sin(b.hi)) / (b.lo - b.hi);
    const double offset = std::sin(b.lo) - slope * b.lo;
    if (b.lo >= 0.0)
        f.emplace_back(std::vector<std::pair<VarId, double>>{{scheck, 1.0}, {theta, -slope}},
                       offset, Sense::GE);
    if (b.hi <= 0.0)
        f.emplace_back(std::vector<std::pair<VarId, double>>{{scheck, 1.0}, {theta, -slope}},
                       offset, Sense::LE);
    return f;
}

CosEnvelope cos_envelope(VarId theta, VarId ccheck, const Interval& b) {
    CosEnvelope env;
    env.theta = theta;
    env.ccheck = ccheck;
    const double xm = std::max(std::abs(b.lo), std::abs(b.hi));
    if (xm < kCollapseTol) {
        env.linear.emplace_back(std::vector<std::pair<VarId, double>>{{ccheck, 1.0}},
                                1.0, Sense::EQ);
        return env;
    }
    env.quadratic_valid = true;
    env.quad_coeff = (1.0 - std::cos(xm)) / (xm * xm);
    if (b.is_point(kCollapseTol)) {
        env.linear.emplace_back(std::vector<std::pair<VarId, double>>{{ccheck, 1.0}},
                                std::cos(b.mid()), Sense::EQ);
        return env;
    }
    const double slope = (std::cos(b.lo) - std::cos(b.hi)) / (b.lo - b.hi);
    env.linear.emplace_back(std::vector<std::pair<VarId, double>>{{ccheck, 1.0}, {theta, -slope}},
                            std::cos(b.lo) - slope * b.lo, Sense::GE);
    return env;
}

std::string to_string(TriCase c) {
    switch (c) {
        case TriCase::I: return "I";
        case TriCase::II: return "II";
        case TriCase::III: return "III";
        case TriCase::IV: return "IV";
        case TriCase::V: return "V";
        case TriCase::VI: return "VI";
        case TriCase::VII: return "VII";
    }
    return "?";
}

namespace {

// Scale a set of bilinear facets by a constant (the collapsed third factor).
// Negative scales flip inequality senses; zero pins the product variable.
std::vector<LinearFacet> scaled_mccormick(VarId x, VarId y, VarId prod, const Interval& bx,
                                          const Interval& by, double scale) {
    std::vector<LinearFacet> out;
    if (std::abs(scale) < kCollapseTol) {
        out.emplace_back(std::vector<std::pair<VarId, double>>{{prod, 1.0}}, 0.0, Sense::EQ);
        return out;
    }
    for (LinearFacet f : mccormick(x, y, prod, bx, by)) {
        for (auto& [id, c] : f.coeffs)
            if (id != prod) c *= scale;
        f.rhs *= scale;
        if (scale < 0.0) f.sense = (f.sense == Sense::LE) ? Sense::GE : Sense::LE;
        out.push_back(std::move(f));
    }
    return out;
}

struct TriBox {
    VarId vl, vm, z, xyz;
    double ll, lh; // vl bounds
    double ml, mh; // vm bounds
    double zl, zh; // z bounds
};

LinearFacet tri_facet(const TriBox& t, Sense sense, double a, double b, double c, double d) {
    // xyz (sense) a*vl + b*vm + c*z + d
    return LinearFacet({{t.xyz, 1.0}, {t.vl, -a}, {t.vm, -b}, {t.z, -c}}, d, sense);
}

void case_I(const TriBox& t, std::vector<LinearFacet>& f) {
    const double ll = t.ll, lh = t.lh, ml = t.ml, mh = t.mh, sl = t.zl, sh = t.zh;
    f.push_back(tri_facet(t, Sense::GE, mh * sl, ll * sl, ll * ml, -ll * mh * sl - ll * ml * sl));
    f.push_back(tri_facet(t, Sense::GE, mh * sl, ll * sh, ll * mh, -ll * mh * sl - ll * mh * sh));
    f.push_back(tri_facet(t, Sense::GE, ml * sh, lh * sl, lh * ml, -lh * ml * sh - lh * ml * sl));
    f.push_back(tri_facet(t, Sense::GE, ml * sh, lh * sh, lh * mh, -lh * ml * sh - lh * mh * sh));
    f.push_back(tri_facet(t, Sense::GE, ml * sl, lh * sl, ll * ml, -lh * ml * sl - ll * ml * sl));
    f.push_back(tri_facet(t, Sense::GE, mh * sh, ll * sh, lh * mh, -lh * mh * sh - ll * mh * sh));
}

void case_II(const TriBox& t, std::vector<LinearFacet>& f) {
    const double ll = t.ll, lh = t.lh, ml = t.ml, mh = t.mh, sl = t.zl, sh = t.zh;
    f.push_back(tri_facet(t, Sense::LE, ml * sl, lh * sl, lh * mh, -lh * mh * sl - lh * ml * sl));
    f.push_back(tri_facet(t, Sense::LE, mh * sl, ll * sl, lh * mh, -lh * mh * sl - ll * mh * sl));
    f.push_back(tri_facet(t, Sense::LE, ml * sl, lh * sh, lh * ml, -lh * ml * sh - lh * ml * sl));
    f.push_back(tri_facet(t, Sense::LE, mh * sh, ll * sl, ll * mh, -ll * mh * sh - ll * mh * sl));
    f.push_back(tri_facet(t, Sense::LE, ml * sh, lh * sh, ll * ml, -lh * ml * sh - ll * ml * sh));
    f.push_back(tri_facet(t, Sense::LE, mh * sh, ll * sh, ll * ml, -ll * mh * sh - ll * ml * sh));
}

void case_III(const TriBox& t, std::vector<LinearFacet>& f) {
    const double ll = t.ll, lh = t.lh, ml = t.ml, mh = t.mh, sl = t.zl, sh = t.zh;
    f.push_back(tri_facet(t, Sense::GE, ml * sl, ll * sl, ll * ml, -2.0 * ll * ml * sl));
    f.push_back(tri_facet(t, Sense::GE, mh * sh, lh * sh, lh * mh, -2.0 * lh * mh * sh));
    f.push_back(tri_facet(t, Sense::GE, ml * sh, ll * sh, lh * ml, -ll * ml * sh - lh * ml * sh));
    f.push_back(tri_facet(t, Sense::GE, mh * sl, lh * sl, ll * mh, -lh * mh * sl - ll * mh * sl));
    const double lam3 = lh * mh * sl - ll * mh * sh - lh * ml * sl + lh * ml * sh;
    f.push_back(tri_facet(t, Sense::GE, lam3 / (lh - ll), lh * sl, lh * ml,
                          -lam3 * ll / (lh - ll) - lh * mh * sl - lh * ml * sh + ll * mh * sh));
    const double gam3 = ll * ml * sh - lh * ml * sl - ll * mh * sh + ll * mh * sl;
    f.push_back(tri_facet(t, Sense::GE, gam3 / (ll - lh), ll * sh, ll * mh,
                          -gam3 * lh / (ll - lh) - ll * ml * sh - ll * mh * sl + lh * ml * sl));
}

void case_IV(const TriBox& t, std::vector<LinearFacet>& f) {
    const double ll = t.ll, lh = t.lh, ml = t.ml, mh = t.mh, sl = t.zl, sh = t.zh;
    f.push_back(tri_facet(t, Sense::LE, ml * sh, ll * sh, ll * ml, -2.0 * ll * ml * sh));
    f.push_back(tri_facet(t, Sense::LE, mh * sl, lh * sl, lh * mh, -2.0 * lh * mh * sl));
    f.push_back(tri_facet(t, Sense::LE, ml * sl, lh * sh, lh * ml, -lh * ml * sh - lh * ml * sl));
    f.push_back(tri_facet(t, Sense::LE, mh * sh, ll * sl, ll * mh, -ll * mh * sh - ll * mh * sl));
    const double lam4 = lh * ml * sl - lh * mh * sh - ll * ml * sl + ll * mh * sl;
    f.push_back(tri_facet(t, Sense::LE, ml * sl, ll * sl, lam4 / (sl - sh),
                          -lam4 * sh / (sl - sh) - lh * ml * sl - ll * mh * sl + lh * mh * sh));
    const double gam4 = lh * ml * sh - ll * ml * sl - lh * mh * sh + ll * mh * sh;
    f.push_back(tri_facet(t, Sense::LE, mh * sh, lh * sh, -gam4 / (sh - sl),
                          -gam4 * sl / (sh - sl) - lh * ml * sh - ll * mh * sh + ll * ml * sl));
}

void case_V(const TriBox& t, std::vector<LinearFacet>& f) {
    const double ll = t.ll, lh = t.lh, ml = t.ml, mh = t.mh, sl = t.zl, sh = t.zh;
    f.push_back(tri_facet(t, Sense::LE, ml * sh, ll * sh, ll * ml, -2.0 * ll * ml * sh));
    f.push_back(tri_facet(t, Sense::LE, mh * sl, lh * sl, lh * mh, -2.0 * lh * mh * sl));
    f.push_back(tri_facet(t, Sense::LE, ml * sl, ll * sl, ll * mh, -ll * ml * sl - ll * mh * sl));
    f.push_back(tri_facet(t, Sense::LE, mh * sh, lh * sh, lh * ml, -lh * ml * sh - lh * mh * sh));
    const double lam5 = ll * ml * sl - ll * mh * sh - lh * ml * sl + lh * ml * sh;
    f.push_back(tri_facet(t, Sense::LE, ml * sl, lam5 / (ml - mh), lh * ml,
                          -lam5 * mh / (ml - mh) - ll * ml * sl - lh * ml * sh + ll * mh * sh));
    const double gam5 = ll * mh * sl - lh * ml * sl - ll * mh * sh + lh * mh * sh;
    f.push_back(tri_facet(t, Sense::LE, mh * sh, gam5 / (mh - ml), ll * mh,
                          -gam5 * ml / (mh - ml) - ll * mh * sl - lh * mh * sh + lh * ml * sl));
}

void case_VI(const TriBox& t, std::vector<LinearFacet>& f) {
    const double ll = t.ll, lh = t.lh, ml = t.ml, mh = t.mh, sl = t.zl, sh = t.zh;
    f.push_back(tri_facet(t, Sense::GE, mh * sh, lh * sh, lh * mh, -2.0 * lh * mh * sh));
    f.push_back(tri_facet(t, Sense::GE, mh * sl, ll * sh, ll * mh, -ll * mh * sl - ll * mh * sh));
    f.push_back(tri_facet(t, Sense::GE, mh * sl, ll * sl, ll * ml, -ll * mh * sl - ll * ml * sl));
    f.push_back(tri_facet(t, Sense::GE, ml * sh, lh * sl, lh * ml, -lh * ml * sh - lh * ml * sl));
    f.push_back(tri_facet(t, Sense::GE, ml * sl, lh * sl, ll * ml, -lh * ml * sl - ll * ml * sl));
    const double lam6 = ll * mh * sh - lh * mh * sl - ll * ml * sh + lh * ml * sh;
    f.push_back(tri_facet(t, Sense::GE, ml * sh, ll * sh, lam6 / (sh - sl),
                          -lam6 * sl / (sh - sl) - ll * mh * sh - lh * ml * sh + lh * mh * sl));
}

void case_VII(const TriBox& t, std::vector<LinearFacet>& f) {
    const double ll = t.ll, lh = t.lh, ml = t.ml, mh = t.mh, sl = t.zl, sh = t.zh;
    f.push_back(tri_facet(t, Sense::LE, mh * sl, lh * sl, lh * mh, -2.0 * lh * mh * sl));
    f.push_back(tri_facet(t, Sense::LE, ml * sl, lh * sh, lh * ml, -lh * ml * sh - lh * ml * sl));
    f.push_back(tri_facet(t, Sense::LE, mh * sh, ll * sh, ll * ml, -ll * mh * sh - ll * ml * sh));
    f.push_back(tri_facet(t, Sense::LE, mh * sh, ll * sl, ll * mh, -ll * mh * sh - ll * mh * sl));
    f.push_back(tri_facet(t, Sense::LE, ml * sh, lh * sh, ll * ml, -lh * ml * sh - ll * ml * sh));
    const double lam7 = lh * ml * sl - lh * mh * sh - ll * ml * sl + ll * mh * sl;
    f.push_back(tri_facet(t, Sense::LE, ml * sl, ll * sl, lam7 / (sl - sh),
                          -lam7 * sh / (sl - sh) - lh * ml * sl - ll * mh * sl + lh * mh * sh));
}

// Affine expression a*vl + b*vm + d used while eliminating the intermediate
// product variable from the nested-McCormick system.
struct VExpr {
    double a, b, d;
};

// Projection of { xyz <= cw*w + cz*z + d0, w within its McCormick facets }
// onto (vl, vm, z, xyz) space. `sense` carries through for the lower side.
void substitute_w(const TriBox& t, Sense sense, double cw, double cz, double d0,
                  const std::vector<VExpr>& subs, std::vector<LinearFacet>& out) {
    if (std::abs(cw) < kCollapseTol) {
        out.push_back(tri_facet(t, sense, 0.0, 0.0, cz, d0));
        return;
    }
    for (const VExpr& e : subs)
        out.push_back(tri_facet(t, sense, cw * e.a, cw * e.b, cz, d0 + cw * e.d));
}

// Nested-McCormick facets for one side of the trilinear product, with the
// intermediate vl*vm variable eliminated exactly (Fourier-Motzkin).
std::vector<LinearFacet> nested_side(const TriBox& t, bool upper) {
    const double wlo = t.ll * t.ml, whi = t.lh * t.mh;
    const double zl = t.zl, zh = t.zh;
    const std::vector<VExpr> w_lower = {{t.ml, t.ll, -t.ll * t.ml}, {t.mh, t.lh, -t.lh * t.mh}};
    const std::vector<VExpr> w_upper = {{t.mh, t.ll, -t.ll * t.mh}, {t.ml, t.lh, -t.lh * t.ml}};

    std::vector<LinearFacet> out;
    if (upper) {
        // xyz <= zl*w + whi*z - zl*whi  and  xyz <= zh*w + wlo*z - zh*wlo
        substitute_w(t, Sense::LE, zl, whi, -zl * whi, zl > 0 ? w_upper : w_lower, out);
        substitute_w(t, Sense::LE, zh, wlo, -zh * wlo, zh > 0 ? w_upper : w_lower, out);
        if (zl < -kCollapseTol && zh > kCollapseTol) {
            // cross-combination of the two rows above
            const double den = zl - zh;
            out.push_back(tri_facet(t, Sense::LE, 0.0, 0.0, (zl * wlo - zh * whi) / den,
                                    zl * zh * (whi - wlo) / den));
        }
    } else {
        // xyz >= zl*w + wlo*z - zl*wlo  and  xyz >= zh*w + whi*z - zh*whi
        substitute_w(t, Sense::GE, zl, wlo, -zl * wlo, zl > 0 ? w_lower : w_upper, out);
        substitute_w(t, Sense::GE, zh, whi, -zh * whi, zh > 0 ? w_lower : w_upper, out);
        if (zl < -kCollapseTol && zh > kCollapseTol) {
            const double den = zh - zl;
            out.push_back(tri_facet(t, Sense::GE, 0.0, 0.0, (zh * wlo - zl * whi) / den,
                                    zl * zh * (whi - wlo) / den));
        }
    }
    return out;
}

bool facet_equal(const LinearFacet& a, const LinearFacet& b) {
    if (a.sense != b.sense) return false;
    if (std::abs(a.rhs - b.rhs) > 1e-12) return false;
    if (a.coeffs.size() != b.coeffs.size()) return false;
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
        if (a.coeffs[i].first != b.coeffs[i].first) return false;
        if (std::abs(a.coeffs[i].second - b.coeffs[i].second) > 1e-12) return false;
    }
    return true;
}

void dedupe(std::vector<LinearFacet>& facets) {
    for (auto& f : facets)
        std::sort(f.coeffs.begin(), f.coeffs.end(),
                  [](const auto& p, const auto& q) { return p.first < q.first; });
    std::vector<LinearFacet> unique;
    for (auto& f : facets) {
        bool dup = false;
        for (const auto& u : unique)
            if (facet_equal(f, u)) { dup = true; break; }
        if (!dup) unique.push_back(std::move(f));
    }
    facets = std::move(unique);
}

} // namespace

TrilinearEnvelope mf_trilinear(VarId vl, VarId vm, VarId z, VarId xyz,
                               const Interval& bvl, const Interval& bvm,
                               const Interval& bz, bool cosine_mode) {
    if (bvl.lo <= 0.0 || bvm.lo <= 0.0)
        throw std::domain_error("trilinear envelope requires positive magnitude bounds");

    TrilinearEnvelope env;

    const bool l_pt = bvl.is_point(kCollapseTol);
    const bool m_pt = bvm.is_point(kCollapseTol);
    const bool z_pt = bz.is_point(kCollapseTol);

    // Collapsed boxes reduce to exact lower-dimensional relations.
    if (l_pt || m_pt || z_pt) {
        if (l_pt && m_pt && z_pt) {
            env.facets.emplace_back(std::vector<std::pair<VarId, double>>{{xyz, 1.0}},
                                    bvl.mid() * bvm.mid() * bz.mid(), Sense::EQ);
        } else if (l_pt && m_pt) {
            env.facets.emplace_back(
                std::vector<std::pair<VarId, double>>{{xyz, 1.0}, {z, -bvl.mid() * bvm.mid()}},
                0.0, Sense::EQ);
        } else if (l_pt && z_pt) {
            env.facets.emplace_back(
                std::vector<std::pair<VarId, double>>{{xyz, 1.0}, {vm, -bvl.mid() * bz.mid()}},
                0.0, Sense::EQ);
        } else if (m_pt && z_pt) {
            env.facets.emplace_back(
                std::vector<std::pair<VarId, double>>{{xyz, 1.0}, {vl, -bvm.mid() * bz.mid()}},
                0.0, Sense::EQ);
        } else if (l_pt) {
            env.facets = scaled_mccormick(vm, z, xyz, bvm, bz, bvl.mid());
        } else if (m_pt) {
            env.facets = scaled_mccormick(vl, z, xyz, bvl, bz, bvm.mid());
        } else {
            env.facets = scaled_mccormick(vl, vm, xyz, bvl, bvm, bz.mid());
        }
        return env;
    }

    const TriBox t{vl, vm, z, xyz, bvl.lo, bvl.hi, bvm.lo, bvm.hi, bz.lo, bz.hi};
    const double ll = t.ll, lh = t.lh, ml = t.ml, mh = t.mh, sl = t.zl, sh = t.zh;

    bool have_lower = false, have_upper = false;

    if (!cosine_mode && sh <= 0.0) {
        case_I(t, env.facets);
        env.applied.push_back(TriCase::I);
        have_lower = true;
    }
    if (sl >= 0.0) {
        case_II(t, env.facets);
        env.applied.push_back(TriCase::II);
        have_upper = true;
    }
    if (sl >= 0.0 &&
        lh * ml * sl + ll * mh * sh <= ll * mh * sl + lh * ml * sh &&
        lh * ml * sl + ll * mh * sh <= lh * mh * sl + ll * ml * sh) {
        case_III(t, env.facets);
        env.applied.push_back(TriCase::III);
        have_lower = true;
    }
    if (!cosine_mode) {
        if (sh <= 0.0 &&
            ll * ml * sl + lh * mh * sh >= lh * ml * sl + ll * mh * sh &&
            ll * ml * sl + lh * mh * sh >= ll * mh * sl + lh * ml * sh) {
            case_IV(t, env.facets);
            env.applied.push_back(TriCase::IV);
            have_upper = true;
        }
        if (sh <= 0.0 &&
            lh * ml * sl + ll * mh * sh >= ll * mh * sl + lh * ml * sh &&
            ll * ml * sl + lh * mh * sh < lh * ml * sl + ll * mh * sh &&
            ll * ml * sl + lh * mh * sh < ll * mh * sl + lh * ml * sh) {
            case_V(t, env.facets);
            env.applied.push_back(TriCase::V);
            have_upper = true;
        }
        if (sl <= 0.0 && sh >= 0.0) {
            case_VI(t, env.facets);
            env.applied.push_back(TriCase::VI);
            have_lower = true;
            case_VII(t, env.facets);
            env.applied.push_back(TriCase::VII);
            have_upper = true;
        }
    }

    if (!have_lower) {
        auto extra = nested_side(t, /*upper=*/false);
        env.facets.insert(env.facets.end(), extra.begin(), extra.end());
        env.lower_fallback = true;
    }
    if (!have_upper) {
        auto extra = nested_side(t, /*upper=*/true);
        env.facets.insert(env.facets.end(), extra.begin(), extra.end());
        env.upper_fallback = true;
    }

    dedupe(env.facets);
    return env;
}

} // namespace qcopf
