#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qcopf/conic.hpp"
#include "qcopf/envelopes.hpp"
#include "qcopf/netdata.hpp"

namespace qcopf {

/// Identity of a model variable: kind plus the bus/generator/branch/pair
/// ordinal it belongs to.
enum class VarKind : std::uint8_t {
    pg,          // active generation, per generator
    qg,          // reactive generation, per generator
    theta,       // bus voltage angle, per bus
    vmag,        // bus voltage magnitude, per bus
    wii,         // squared voltage magnitude, per bus
    wpair,       // magnitude product, per pair
    cpair,       // product with the cosine term, per pair
    spair,       // product with the sine term, per pair
    cos_dummy,   // cosine envelope variable, per pair
    sin_dummy,   // sine envelope variable, per pair
    theta_diff,  // angle difference, per pair
    pf, qf,      // from-side flows, per branch
    pt, qt,      // to-side flows, per branch
    vdiff,       // magnitude difference, per pair
    wdiff,       // squared magnitude difference, per pair
    what_l,      // vdiff * V_l product, per pair
    what_m,      // vdiff * V_m product, per pair
    cost_epi,    // quadratic-cost epigraph, per generator
    const_half,  // shared constant 0.5 for cone modeling
    jabr_half,   // w_mm / 2, per pair
    flow_limit,  // apparent-power limit constant, per branch
    cos_dev,     // 1 - cos_dummy, per pair
    cos_arg,     // scaled angle difference in the cosine cone, per pair
    vdsq_bound,  // right-hand side of the vdiff square inequality, per pair
};

struct VarTag {
    VarKind kind;
    int index = 0;
    auto operator<=>(const VarTag&) const = default;
};

std::string to_string(const VarTag& tag);

/// Box bounds subject to tightening. theta and vdiff entries are per branch.
struct BoundSet {
    std::vector<Interval> v;
    std::vector<Interval> theta;
    std::vector<Interval> vdiff; // empty when magnitude-difference constraints are off
};

/// Bounds straight from the network data; vdiff from the magnitude boxes.
BoundSet initial_bounds(const Network& net, bool with_vdiff);

enum class ObjectiveKind { cost, min_variable, max_variable };

struct QcVariant {
    bool use_mf = true;
    bool use_vdiff = true;
    ObjectiveKind objective = ObjectiveKind::cost;
    std::optional<VarTag> target;
};

/// One unordered pair of adjacent buses; lifted c/s variables live here and
/// are shared by parallel branches.
struct PairInfo {
    int l = 0, m = 0;          // bus indices, l < m
    std::vector<int> branches; // branch indices touching this pair
    Interval theta;            // intersected over branches, pair orientation
    Interval vdiff;
    double cos_quad_coeff = 0.0; // k in ccheck <= 1 - k * theta^2
};

struct LiftedBounds {
    std::vector<Interval> wii;                           // per bus
    std::vector<Interval> wpair, cpair, spair;           // per pair
    std::vector<Interval> cos_dummy, sin_dummy;          // per pair
    std::vector<Interval> wdiff, what_l, what_m;         // per pair (vdiff mode)
    std::vector<PairInfo> pairs;
};

LiftedBounds derive_lifted_bounds(const BoundSet& bounds, const Network& net);

struct QcModel {
    ConicProgram program;
    std::map<VarTag, VarId> var_map;
    BoundSet bounds;
    QcVariant variant;
    std::vector<PairInfo> pairs;
    // which trilinear cases fired, per pair (sine then cosine), for reporting
    std::vector<std::string> trilinear_notes;

    VarId var(const VarTag& tag) const;
    bool has(const VarTag& tag) const { return var_map.count(tag) > 0; }
};

class BuildError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

QcModel build(const Network& net, const BoundSet& bounds, const QcVariant& variant);

/// A full assignment for the nonconvex problem.
struct AcPoint {
    std::vector<double> v, theta; // per bus
    std::vector<double> pg, qg;   // per generator
};

struct BranchFlow {
    double pf = 0.0, qf = 0.0, pt = 0.0, qt = 0.0;
};

/// Flows implied by terminal voltages; theta_lm is oriented from->to.
BranchFlow ac_branch_flow(const Branch& br, double v_from, double v_to, double theta_lm);

struct AcResiduals {
    double balance_p = 0.0, balance_q = 0.0;
    double v_bound = 0.0, theta_bound = 0.0, gen_bound = 0.0;
    double flow_limit = 0.0, ref_angle = 0.0;
    double objective = 0.0;
    double max() const;
};

AcResiduals check_ac_point(const Network& net, const AcPoint& point);

double ac_objective(const Network& net, const AcPoint& point);

/// Lift an AC assignment into the model's variable space (w, c, s, auxiliary
/// cone variables included). Feasible AC points lift into the relaxation.
std::vector<double> lift_ac_point(const QcModel& model, const Network& net, const AcPoint& point);

} // namespace qcopf
