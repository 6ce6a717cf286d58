#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace qcopf {

/// Column index of a decision variable inside a program.
using VarId = std::int32_t;

enum class Sense { LE, GE, EQ };

/// A single linear constraint: sum(coeff_i * x_i) <sense> rhs.
struct LinearFacet {
    std::vector<std::pair<VarId, double>> coeffs;
    double rhs = 0.0;
    Sense sense = Sense::LE;

    LinearFacet() = default;
    LinearFacet(std::vector<std::pair<VarId, double>> c, double r, Sense s)
        : coeffs(std::move(c)), rhs(r), sense(s) {}

    /// Signed slack at a point: >= 0 means satisfied.
    /// LE: rhs - a'x, GE: a'x - rhs, EQ: -(|a'x - rhs|).
    double slack(const std::vector<double>& x) const;
    double lhs_value(const std::vector<double>& x) const;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double l, double h) : lo(l), hi(h) {
        if (!(l <= h)) throw std::invalid_argument("interval lo > hi");
    }
    double width() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
    bool is_point(double tol = 1e-12) const { return hi - lo < tol; }
};

/// Interval arithmetic helpers used when deriving bounds for lifted variables.
Interval interval_product(const Interval& a, const Interval& b);
Interval interval_intersect(const Interval& a, const Interval& b);
Interval interval_square(const Interval& a);

/// Bounds on sin/cos over an angle interval strictly inside (-pi/2, pi/2).
struct TrigBounds {
    Interval s;
    Interval c;
};

TrigBounds trig_bounds(const Interval& theta);

/// Convex hull of xc = x^2 over a box: one linear upper facet plus the
/// conic relation xc >= x^2 (kept symbolic; callers emit the cone).
struct SquareEnvelope {
    LinearFacet upper;
    VarId x;
    VarId xcheck;
};

SquareEnvelope square_envelope(VarId x, VarId xcheck, const Interval& bx);

/// The four McCormick inequalities for xy over bx * by.
std::vector<LinearFacet> mccormick(VarId x, VarId y, VarId xy,
                                   const Interval& bx, const Interval& by);

/// Tangent/chord facets bounding scheck against sin(theta).
std::vector<LinearFacet> sin_envelope(VarId theta, VarId scheck, const Interval& btheta);

/// Upper facet ccheck <= 1 - k*theta^2 with k = (1 - cos(xm)) / xm^2.
/// Degenerate xm == 0 collapses to the constant relation ccheck = 1.
struct CosEnvelope {
    bool quadratic_valid = false; // false when xm == 0
    double quad_coeff = 0.0;      // k above
    VarId theta;
    VarId ccheck;
    std::vector<LinearFacet> linear; // chord lower facet (and pins for degenerate boxes)
};

CosEnvelope cos_envelope(VarId theta, VarId ccheck, const Interval& btheta);

/// Facet cases of the trilinear-product convex hull, named after the
/// sign-regime case tables they come from.
enum class TriCase { I = 1, II, III, IV, V, VI, VII };

std::string to_string(TriCase c);

struct TrilinearEnvelope {
    std::vector<LinearFacet> facets;
    std::vector<TriCase> applied;
    bool lower_fallback = false; // lower side completed with nested McCormick
    bool upper_fallback = false; // upper side completed with nested McCormick
};

/// Convex hull facets for the product vl * vm * z over a box with strictly
/// positive vl/vm ranges. When cosine_mode is set, only the cases valid for a
/// nonnegative z range are consulted. Sides not covered by any applicable
/// case are completed with the projection of the nested McCormick system.
TrilinearEnvelope mf_trilinear(VarId vl, VarId vm, VarId z, VarId xyz,
                               const Interval& bvl, const Interval& bvm,
                               const Interval& bz, bool cosine_mode = false);

} // namespace qcopf
