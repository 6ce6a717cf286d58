#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/SparseCholesky>

#include "compiled.hpp"

namespace qcopf::detail {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;
using Trip = Eigen::Triplet<double>;

struct Settings {
    double feastol = 1e-8;
    double abstol = 1e-8;
    double reltol = 1e-8;
    double feastol_reduced = 1e-4;
    double abstol_reduced = 5e-5;
    double reltol_reduced = 5e-5;
    int max_iters = 200;
    double gamma = 0.99;
    double stepmin = 1e-6;
    double stepmax = 0.9999;
    double sigmamin = 1e-4;
    double sigmamax = 1.0;
    double delta_static = 1e-9;
    int nitref = 2;
    double linsys_acc = 1e-14;
    double safeguard = 500.0;
    int equil_iters = 3;
};

struct SocScaling {
    double eta2 = 1.0;
    double a = 1.0; // first entry of the scaling point
    Vec q;          // remaining entries
};

enum class Exit { not_yet, optimal, pinf, dinf, reduced_optimal, reduced_pinf, reduced_dinf };

class Ipm {
  public:
    Ipm(const StandardForm& sf, const SolveOptions& opts) : dims(sf.soc_dims) {
        settings.feastol = opts.feas_tol;
        settings.abstol = opts.gap_tol;
        settings.reltol = opts.gap_tol;
        settings.max_iters = opts.max_iters;

        A = sf.A;
        G = sf.G;
        b = sf.b;
        h = sf.h;
        c = sf.c;
        n = static_cast<int>(sf.n);
        p = static_cast<int>(A.rows());
        m = static_cast<int>(G.rows());
        n_lp = sf.n_lp;

        equilibrate();
        cost_scale = std::max(1.0, c.lpNorm<Eigen::Infinity>());
        c /= cost_scale;

        At = A.transpose();
        Gt = G.transpose();

        lp_w2 = Vec::Ones(n_lp);
        socs.resize(dims.size());
        for (std::size_t k = 0; k < dims.size(); ++k) {
            socs[k].q = Vec::Zero(dims[k] - 1);
            socs[k].a = 1.0;
            socs[k].eta2 = 1.0;
        }
    }

    SolveResult run();

  private:
    Settings settings;
    SpMat A, G, At, Gt;
    Vec b, h, c;
    int n = 0, p = 0, m = 0, n_lp = 0;
    std::vector<int> dims;
    double cost_scale = 1.0;

    Vec e_col, e_rowA, e_rowG;

    // iterate
    Vec x, y, z, s, lambda;
    double tau = 1.0, kap = 1.0;

    Vec lp_w2; // s_i / z_i on the LP cone
    std::vector<SocScaling> socs;

    Eigen::SimplicialLDLT<SpMat, Eigen::Lower> ldlt;
    SpMat K;
    bool pattern_analyzed = false;
    double delta = 1e-9;

    // residuals and stats
    Vec rx, ry, rz;
    double rt = 0.0, hresx = 0.0, hresy = 0.0, hresz = 0.0;
    double cx = 0.0, by = 0.0, hz = 0.0;
    double nx = 0.0, ny = 0.0, nz = 0.0, ns = 0.0;
    double resx0 = 1.0, resy0 = 1.0, resz0 = 1.0;
    double gap = 0.0, mu = 0.0, pcost = 0.0, dcost = 0.0;
    double relgap = std::numeric_limits<double>::quiet_NaN();
    double pres = 0.0, dres = 0.0;
    double pinfres = std::numeric_limits<double>::quiet_NaN();
    double dinfres = std::numeric_limits<double>::quiet_NaN();

    int n_cone_members() const { return n_lp + static_cast<int>(dims.size()); }

    void equilibrate();
    void compute_residuals();
    void update_statistics();
    Exit check_exit(bool reduced) const;
    bool update_scalings();
    void assemble_kkt(bool identity_scaling);
    bool factorize();
    void scale_w(const Vec& u, Vec& out) const;       // out = W u
    void apply_w2(const Vec& u, Vec& out) const;      // out = W^2 u
    void conic_product(const Vec& u, const Vec& v, Vec& out) const;
    void conic_division(const Vec& u, const Vec& w, Vec& out) const;
    void bring_to_cone(const Vec& r, Vec& out) const;
    double line_search(const Vec& lam, const Vec& ds, const Vec& dz, double tau_, double dtau,
                       double kap_, double dkap) const;
    void solve_kkt(const Vec& rhs, Vec& dx, Vec& dy, Vec& dz, bool identity_scaling);
};

void Ipm::equilibrate() {
    e_col = Vec::Ones(n);
    e_rowA = Vec::Ones(p);
    e_rowG = Vec::Ones(m);

    const auto sqrt_or_one = [](double v) { return v < 1e-6 ? 1.0 : std::sqrt(v); };

    for (int it = 0; it < settings.equil_iters; ++it) {
        Vec ct = Vec::Zero(n), at = Vec::Zero(p), gt = Vec::Zero(m);
        for (int j = 0; j < A.outerSize(); ++j)
            for (SpMat::InnerIterator q(A, j); q; ++q) {
                ct[j] = std::max(ct[j], std::abs(q.value()));
                at[q.row()] = std::max(at[q.row()], std::abs(q.value()));
            }
        for (int j = 0; j < G.outerSize(); ++j)
            for (SpMat::InnerIterator q(G, j); q; ++q) {
                ct[j] = std::max(ct[j], std::abs(q.value()));
                gt[q.row()] = std::max(gt[q.row()], std::abs(q.value()));
            }
        // rows of one cone must share a scaling factor
        int off = n_lp;
        for (int d : dims) {
            const double mx = gt.segment(off, d).maxCoeff();
            gt.segment(off, d).setConstant(mx);
            off += d;
        }
        ct = ct.unaryExpr(sqrt_or_one);
        at = at.unaryExpr(sqrt_or_one);
        gt = gt.unaryExpr(sqrt_or_one);
        for (int j = 0; j < A.outerSize(); ++j)
            for (SpMat::InnerIterator q(A, j); q; ++q)
                q.valueRef() /= at[q.row()] * ct[j];
        for (int j = 0; j < G.outerSize(); ++j)
            for (SpMat::InnerIterator q(G, j); q; ++q)
                q.valueRef() /= gt[q.row()] * ct[j];
        e_col = e_col.cwiseProduct(ct);
        e_rowA = e_rowA.cwiseProduct(at);
        e_rowG = e_rowG.cwiseProduct(gt);
    }
    c = c.cwiseQuotient(e_col);
    b = b.cwiseQuotient(e_rowA);
    h = h.cwiseQuotient(e_rowG);
}

void Ipm::compute_residuals() {
    rx = -(Gt * z);
    if (p > 0) rx -= At * y;
    hresx = rx.norm();
    rx -= tau * c;

    if (p > 0) {
        ry = A * x;
        hresy = ry.norm();
        ry -= tau * b;
    } else {
        ry.resize(0);
        hresy = 0.0;
    }

    rz = s + G * x;
    hresz = rz.norm();
    rz -= tau * h;

    cx = c.dot(x);
    by = p > 0 ? b.dot(y) : 0.0;
    hz = h.dot(z);
    rt = kap + cx + by + hz;

    nx = x.norm();
    ny = y.norm();
    nz = z.norm();
    ns = s.norm();
}

void Ipm::update_statistics() {
    gap = s.dot(z);
    mu = (gap + kap * tau) / (n_cone_members() + 1);
    pcost = cx / tau;
    dcost = -(hz + by) / tau;
    if (pcost < 0.0)
        relgap = gap / (-pcost);
    else if (dcost > 0.0)
        relgap = gap / dcost;
    else
        relgap = std::numeric_limits<double>::quiet_NaN();

    const double nry = p > 0 ? ry.norm() / std::max(resy0 + nx, 1.0) : 0.0;
    const double nrz = rz.norm() / std::max(resz0 + nx + ns, 1.0);
    pres = std::max(nry, nrz) / tau;
    dres = rx.norm() / std::max(resx0 + ny + nz, 1.0) / tau;

    pinfres = std::numeric_limits<double>::quiet_NaN();
    dinfres = std::numeric_limits<double>::quiet_NaN();
    if ((hz + by) / std::max(ny + nz, 1.0) < -settings.reltol)
        pinfres = hresx / std::max(ny + nz, 1.0);
    if (cx / std::max(nx, 1.0) < -settings.reltol)
        dinfres = std::max(hresy / std::max(nx, 1.0), hresz / std::max(nx + ns, 1.0));
}

Exit Ipm::check_exit(bool reduced) const {
    const double ft = reduced ? settings.feastol_reduced : settings.feastol;
    const double at = reduced ? settings.abstol_reduced : settings.abstol;
    const double rt_ = reduced ? settings.reltol_reduced : settings.reltol;

    if ((-cx > 0.0 || -by - hz >= -at) && pres < ft && dres < ft &&
        (gap < at || (!std::isnan(relgap) && relgap < rt_)))
        return reduced ? Exit::reduced_optimal : Exit::optimal;
    if (!std::isnan(dinfres) && dinfres < ft && tau < kap)
        return reduced ? Exit::reduced_dinf : Exit::dinf;
    if (((!std::isnan(pinfres) && pinfres < ft) && tau < kap) ||
        (tau < ft && kap < ft && !std::isnan(pinfres) && pinfres < ft))
        return reduced ? Exit::reduced_pinf : Exit::pinf;
    return Exit::not_yet;
}

bool Ipm::update_scalings() {
    for (int i = 0; i < n_lp; ++i) {
        if (s[i] <= 0.0 || z[i] <= 0.0) return false;
        lp_w2[i] = s[i] / z[i];
    }
    int off = n_lp;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        const int d = dims[k];
        const double sres = s[off] * s[off] - s.segment(off + 1, d - 1).squaredNorm();
        const double zres = z[off] * z[off] - z.segment(off + 1, d - 1).squaredNorm();
        if (sres <= 0.0 || zres <= 0.0) return false;
        const double snorm = std::sqrt(sres), znorm = std::sqrt(zres);
        const Vec sbar = s.segment(off, d) / snorm;
        const Vec zbar = z.segment(off, d) / znorm;
        socs[k].eta2 = snorm / znorm;
        double gamma = 0.5 * (1.0 + sbar.dot(zbar));
        if (gamma <= 0.0) return false;
        gamma = std::sqrt(gamma);
        socs[k].a = (0.5 / gamma) * (sbar[0] + zbar[0]);
        socs[k].q = (0.5 / gamma) * (sbar.tail(d - 1) - zbar.tail(d - 1));
        off += d;
    }
    scale_w(z, lambda);
    return true;
}

void Ipm::scale_w(const Vec& u, Vec& out) const {
    out.resize(m);
    out.head(n_lp) = lp_w2.cwiseSqrt().cwiseProduct(u.head(n_lp));
    int off = n_lp;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        const int d = dims[k];
        const SocScaling& sc = socs[k];
        const double eta = std::sqrt(sc.eta2);
        const double zeta = sc.q.dot(u.segment(off + 1, d - 1));
        const double factor = u[off] + zeta / (1.0 + sc.a);
        out[off] = eta * (sc.a * u[off] + zeta);
        out.segment(off + 1, d - 1) = eta * (u.segment(off + 1, d - 1) + factor * sc.q);
        off += d;
    }
}

void Ipm::apply_w2(const Vec& u, Vec& out) const {
    // W^2 = eta^2 (2 wbar wbar' - J) per cone; diagonal on the LP part
    out.resize(m);
    out.head(n_lp) = lp_w2.cwiseProduct(u.head(n_lp));
    int off = n_lp;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        const int d = dims[k];
        const SocScaling& sc = socs[k];
        const double wu = sc.a * u[off] + sc.q.dot(u.segment(off + 1, d - 1));
        out[off] = sc.eta2 * (2.0 * sc.a * wu - u[off]);
        out.segment(off + 1, d - 1) =
            sc.eta2 * (2.0 * wu * sc.q + u.segment(off + 1, d - 1));
        off += d;
    }
}

void Ipm::conic_product(const Vec& u, const Vec& v, Vec& out) const {
    out.resize(m);
    out.head(n_lp) = u.head(n_lp).cwiseProduct(v.head(n_lp));
    int off = n_lp;
    for (int d : dims) {
        out[off] = u.segment(off, d).dot(v.segment(off, d));
        out.segment(off + 1, d - 1) =
            u[off] * v.segment(off + 1, d - 1) + v[off] * u.segment(off + 1, d - 1);
        off += d;
    }
}

void Ipm::conic_division(const Vec& u, const Vec& w, Vec& out) const {
    out.resize(m);
    out.head(n_lp) = w.head(n_lp).cwiseQuotient(u.head(n_lp));
    int off = n_lp;
    for (int d : dims) {
        const double u0 = u[off], w0 = w[off];
        const double rho = u0 * u0 - u.segment(off + 1, d - 1).squaredNorm();
        const double zeta = u.segment(off + 1, d - 1).dot(w.segment(off + 1, d - 1));
        const double factor = (zeta / u0 - w0) / rho;
        out[off] = (u0 * w0 - zeta) / rho;
        out.segment(off + 1, d - 1) =
            factor * u.segment(off + 1, d - 1) + w.segment(off + 1, d - 1) / u0;
        off += d;
    }
}

void Ipm::bring_to_cone(const Vec& r, Vec& out) const {
    double alpha = -0.99;
    for (int i = 0; i < n_lp; ++i)
        if (r[i] <= 0.0) alpha = std::max(alpha, -r[i]);
    int off = n_lp;
    for (int d : dims) {
        const double res = r[off] - r.segment(off + 1, d - 1).norm();
        if (res <= 0.0) alpha = std::max(alpha, -res);
        off += d;
    }
    alpha += 1.0;
    out = r;
    out.head(n_lp).array() += alpha;
    off = n_lp;
    for (int d : dims) {
        out[off] += alpha;
        off += d;
    }
}

double Ipm::line_search(const Vec& lam, const Vec& ds, const Vec& dz, double tau_, double dtau,
                        double kap_, double dkap) const {
    double alpha = 2.0;
    if (n_lp > 0) {
        const double rhomin = (ds.head(n_lp).cwiseQuotient(lam.head(n_lp))).minCoeff();
        const double sigmamin_ = (dz.head(n_lp).cwiseQuotient(lam.head(n_lp))).minCoeff();
        const double worst = std::min(rhomin, sigmamin_);
        if (worst < 0.0) alpha = 1.0 / (-worst);
    }
    if (dtau < 0.0) alpha = std::min(alpha, -tau_ / dtau);
    if (dkap < 0.0) alpha = std::min(alpha, -kap_ / dkap);

    int off = n_lp;
    for (int d : dims) {
        const double lk2 = lam[off] * lam[off] - lam.segment(off + 1, d - 1).squaredNorm();
        if (lk2 <= 0.0) { off += d; continue; }
        const double lknorm = std::sqrt(lk2);
        const Vec lkbar = lam.segment(off, d) / lknorm;
        const double inv = 1.0 / lknorm;

        const double lds =
            lkbar[0] * ds[off] - lkbar.tail(d - 1).dot(ds.segment(off + 1, d - 1));
        const double ldz =
            lkbar[0] * dz[off] - lkbar.tail(d - 1).dot(dz.segment(off + 1, d - 1));

        double factor = (lds + ds[off]) / (lkbar[0] + 1.0);
        const double rho_norm =
            (inv * (ds.segment(off + 1, d - 1) - factor * lkbar.tail(d - 1))).norm() - inv * lds;
        factor = (ldz + dz[off]) / (lkbar[0] + 1.0);
        const double sigma_norm =
            (inv * (dz.segment(off + 1, d - 1) - factor * lkbar.tail(d - 1))).norm() - inv * ldz;

        const double step = std::max(0.0, std::max(rho_norm, sigma_norm));
        if (step > 0.0) alpha = std::min(alpha, 1.0 / step);
        off += d;
    }
    return std::clamp(alpha, settings.stepmin, settings.stepmax);
}

void Ipm::assemble_kkt(bool identity_scaling) {
    const int dim = n + p + m;
    std::vector<Trip> trips;
    trips.reserve(static_cast<std::size_t>(2 * (A.nonZeros() + G.nonZeros())) + dim + 16 * dims.size());

    for (int i = 0; i < n; ++i) trips.emplace_back(i, i, delta);
    for (int i = 0; i < p; ++i) trips.emplace_back(n + i, n + i, -delta);
    for (int j = 0; j < A.outerSize(); ++j)
        for (SpMat::InnerIterator it(A, j); it; ++it) {
            trips.emplace_back(n + it.row(), it.col(), it.value());
            trips.emplace_back(it.col(), n + it.row(), it.value());
        }
    for (int j = 0; j < G.outerSize(); ++j)
        for (SpMat::InnerIterator it(G, j); it; ++it) {
            trips.emplace_back(n + p + it.row(), it.col(), it.value());
            trips.emplace_back(it.col(), n + p + it.row(), it.value());
        }
    for (int i = 0; i < n_lp; ++i) {
        const double v = identity_scaling ? 1.0 : lp_w2[i];
        trips.emplace_back(n + p + i, n + p + i, -v - delta);
    }
    int off = n_lp;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        const int d = dims[k];
        const SocScaling& sc = socs[k];
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                double w2;
                if (identity_scaling) {
                    w2 = (i == j) ? 1.0 : 0.0;
                } else {
                    const double wi = (i == 0) ? sc.a : sc.q[i - 1];
                    const double wj = (j == 0) ? sc.a : sc.q[j - 1];
                    const double Jij = (i != j) ? 0.0 : (i == 0 ? 1.0 : -1.0);
                    w2 = sc.eta2 * (2.0 * wi * wj - Jij);
                }
                double v = -w2;
                if (i == j) v -= delta;
                if (v != 0.0) trips.emplace_back(n + p + off + i, n + p + off + j, v);
            }
        }
        off += d;
    }
    K.resize(dim, dim);
    K.setFromTriplets(trips.begin(), trips.end());
}

bool Ipm::factorize() {
    if (!pattern_analyzed) {
        ldlt.analyzePattern(K);
        pattern_analyzed = true;
    }
    ldlt.factorize(K);
    return ldlt.info() == Eigen::Success;
}

void Ipm::solve_kkt(const Vec& rhs, Vec& dx, Vec& dy, Vec& dz, bool identity_scaling) {
    Vec sol = ldlt.solve(rhs);
    const double threshold = (1.0 + rhs.lpNorm<Eigen::Infinity>()) * settings.linsys_acc;

    double prev_err = std::numeric_limits<double>::max();
    Vec best = sol;
    for (int it = 0; it <= settings.nitref; ++it) {
        const auto xs = sol.head(n);
        const auto ys = sol.segment(n, p);
        const auto zs = sol.tail(m);

        // residual against the unregularized KKT matrix
        Vec ex = rhs.head(n) - Gt * zs;
        if (p > 0) ex -= At * ys;
        Vec ey = rhs.segment(n, p);
        if (p > 0) ey -= A * xs;
        Vec vz;
        if (identity_scaling)
            vz = zs;
        else
            apply_w2(zs, vz);
        Vec ez = rhs.tail(m) - G * xs + vz;

        double err = std::max(ex.lpNorm<Eigen::Infinity>(), ez.lpNorm<Eigen::Infinity>());
        if (p > 0) err = std::max(err, ey.lpNorm<Eigen::Infinity>());

        if (err < prev_err) {
            best = sol;
            prev_err = err;
        }
        if (err < threshold || it == settings.nitref) break;

        Vec e(n + p + m);
        e << ex, ey, ez;
        sol += ldlt.solve(e);
    }
    dx = best.head(n);
    dy = best.segment(n, p);
    dz = best.tail(m);
}

SolveResult Ipm::run() {
    const auto t0 = std::chrono::steady_clock::now();
    SolveResult result;

    delta = settings.delta_static;
    resx0 = std::max(1.0, c.norm());
    resy0 = std::max(1.0, b.norm());
    resz0 = std::max(1.0, h.norm());

    assemble_kkt(true);
    bool ok = factorize();
    for (int attempt = 0; !ok && attempt < 4; ++attempt) {
        delta *= 100.0;
        assemble_kkt(true);
        ok = factorize();
    }
    if (!ok) {
        result.status = SolveStatus::numerical_failure;
        result.message = "initial factorization failed";
        return result;
    }

    Vec rhs1 = Vec::Zero(n + p + m);
    rhs1.segment(n, p) = b;
    rhs1.tail(m) = h;
    Vec rhs2 = Vec::Zero(n + p + m);
    rhs2.head(n) = -c;

    Vec dx1(n), dy1(p), dz1(m), dx2(n), dy2(p), dz2(m);
    solve_kkt(rhs1, dx1, dy1, dz1, true);
    x = dx1;
    bring_to_cone(-dz1, s);
    solve_kkt(rhs2, dx2, dy2, dz2, true);
    y = dy2;
    bring_to_cone(dz2, z);
    tau = 1.0;
    kap = 1.0;
    lambda = Vec::Zero(m);
    rhs1.head(n) = -c;

    double pres_prev = std::numeric_limits<double>::max();
    double best_score = std::numeric_limits<double>::max();
    Vec best_x = x;
    double best_tau = tau;
    struct Stats { double pres, dres, gap, relgap, pcost; int iter; } best_stats{};

    Exit exit_code = Exit::not_yet;
    int iter = 0;
    std::string note;

    const auto record_best = [&]() {
        const double rg = std::isnan(relgap) ? std::abs(gap) : relgap;
        const double score = std::max(pres, dres) + std::max(0.0, rg);
        if (score < best_score) {
            best_score = score;
            best_x = x;
            best_tau = tau;
            best_stats = {pres, dres, gap, relgap, pcost, iter};
        }
    };

    for (iter = 0; iter <= settings.max_iters; ++iter) {
        compute_residuals();
        update_statistics();

        if (iter > 0 && (pres > settings.safeguard * pres_prev || gap < 0.0)) {
            exit_code = check_exit(true);
            if (exit_code == Exit::not_yet) {
                result.status = SolveStatus::numerical_failure;
                note = "search direction unreliable";
            }
            break;
        }
        pres_prev = pres;

        exit_code = check_exit(false);
        if (exit_code != Exit::not_yet) break;

        if (std::isnan(pcost)) {
            result.status = SolveStatus::numerical_failure;
            note = "iterate diverged";
            break;
        }
        if (iter == settings.max_iters) {
            exit_code = check_exit(true);
            if (exit_code == Exit::not_yet) {
                result.status = SolveStatus::iteration_limit;
                note = "iteration limit reached";
            }
            break;
        }
        record_best();

        if (!update_scalings()) {
            exit_code = check_exit(true);
            if (exit_code == Exit::not_yet) {
                result.status = SolveStatus::numerical_failure;
                note = "iterate left the cone";
            }
            break;
        }

        assemble_kkt(false);
        ok = factorize();
        for (int attempt = 0; !ok && attempt < 3; ++attempt) {
            delta *= 100.0;
            assemble_kkt(false);
            ok = factorize();
        }
        if (!ok) {
            result.status = SolveStatus::numerical_failure;
            note = "factorization failed";
            break;
        }
        delta = settings.delta_static;

        solve_kkt(rhs1, dx1, dy1, dz1, false);

        // affine (predictor) direction
        rhs2.head(n) = rx;
        if (p > 0) rhs2.segment(n, p) = -ry;
        rhs2.tail(m) = s - rz;
        solve_kkt(rhs2, dx2, dy2, dz2, false);

        const double dtau_denom =
            kap / tau - c.dot(dx1) - (p > 0 ? b.dot(dy1) : 0.0) - h.dot(dz1);
        const double dtauaff =
            (rt - kap + c.dot(dx2) + (p > 0 ? b.dot(dy2) : 0.0) + h.dot(dz2)) / dtau_denom;

        dz2 += dtauaff * dz1;
        Vec w_dzaff;
        scale_w(dz2, w_dzaff);
        Vec ds_by_w = -w_dzaff - lambda;
        const double dkapaff = -kap - kap / tau * dtauaff;

        const double alpha_aff = line_search(lambda, ds_by_w, w_dzaff, tau, dtauaff, kap, dkapaff);
        const double sigma =
            std::clamp(std::pow(1.0 - alpha_aff, 3), settings.sigmamin, settings.sigmamax);

        // combined (corrector) direction
        Vec ds1, ds2;
        conic_product(lambda, lambda, ds1);
        conic_product(ds_by_w, w_dzaff, ds2);
        ds1 += ds2;
        const double sigmamu = sigma * mu;
        ds1.head(n_lp).array() -= sigmamu;
        int off = n_lp;
        for (int d : dims) {
            ds1[off] -= sigmamu;
            off += d;
        }
        Vec lam_div;
        conic_division(lambda, ds1, lam_div);
        Vec w_lam_div;
        scale_w(lam_div, w_lam_div);

        const double one_minus_sigma = 1.0 - sigma;
        rhs2.head(n) = one_minus_sigma * rx;
        if (p > 0) rhs2.segment(n, p) = -one_minus_sigma * ry;
        rhs2.tail(m) = -one_minus_sigma * rz + w_lam_div;
        solve_kkt(rhs2, dx2, dy2, dz2, false);

        const double bkap = kap * tau + dkapaff * dtauaff - sigmamu;
        const double dtau = (one_minus_sigma * rt - bkap / tau + c.dot(dx2) +
                             (p > 0 ? b.dot(dy2) : 0.0) + h.dot(dz2)) /
                            dtau_denom;
        dx2 += dtau * dx1;
        if (p > 0) dy2 += dtau * dy1;
        dz2 += dtau * dz1;

        Vec w_dz;
        scale_w(dz2, w_dz);
        ds_by_w = -(lam_div + w_dz);
        const double dkap = -(bkap + kap * dtau) / tau;

        const double alpha =
            settings.gamma * line_search(lambda, ds_by_w, w_dz, tau, dtau, kap, dkap);

        Vec ds;
        scale_w(ds_by_w, ds);
        x += alpha * dx2;
        if (p > 0) y += alpha * dy2;
        z += alpha * dz2;
        s += alpha * ds;
        kap += alpha * dkap;
        tau += alpha * dtau;

        if (alpha <= settings.stepmin * settings.gamma + 1e-15) {
            compute_residuals();
            update_statistics();
            exit_code = check_exit(true);
            if (exit_code == Exit::not_yet) {
                result.status = SolveStatus::numerical_failure;
                note = "step size collapsed";
            }
            ++iter;
            break;
        }
    }

    result.iterations = iter;
    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const auto fill_primal = [&](const Vec& xv, double tauv) {
        result.primal.resize(n);
        for (int j = 0; j < n; ++j) result.primal[j] = xv[j] / (e_col[j] * tauv);
    };

    switch (exit_code) {
        case Exit::optimal:
        case Exit::reduced_optimal:
            result.status = SolveStatus::optimal;
            fill_primal(x, tau);
            result.objective = pcost * cost_scale;
            result.primal_residual = pres;
            result.dual_residual = dres;
            result.gap = gap / (tau * tau) * cost_scale;
            if (exit_code == Exit::reduced_optimal) {
                result.status = SolveStatus::iteration_limit;
                result.message = "close to optimal (reduced accuracy)";
            }
            break;
        case Exit::pinf:
            result.status = SolveStatus::infeasible;
            result.message = "primal infeasibility certificate found (residual " +
                             std::to_string(pinfres) + ")";
            result.primal_residual = pres;
            result.dual_residual = dres;
            break;
        case Exit::dinf:
            result.status = SolveStatus::unbounded;
            result.message = "dual infeasibility certificate found (residual " +
                             std::to_string(dinfres) + ")";
            break;
        case Exit::reduced_pinf:
            result.status = SolveStatus::numerical_failure;
            result.message = "likely infeasible (reduced accuracy certificate)";
            break;
        case Exit::reduced_dinf:
            result.status = SolveStatus::numerical_failure;
            result.message = "likely unbounded (reduced accuracy certificate)";
            break;
        case Exit::not_yet:
            // status already set above; report the best iterate seen
            if (best_score < std::numeric_limits<double>::max()) {
                fill_primal(best_x, best_tau);
                result.objective = best_stats.pcost * cost_scale;
                result.primal_residual = best_stats.pres;
                result.dual_residual = best_stats.dres;
                result.gap = best_stats.gap * cost_scale;
            }
            if (result.message.empty()) result.message = note;
            else if (!note.empty()) result.message += "; " + note;
            break;
    }
    return result;
}

} // namespace

SolveResult solve_standard(const StandardForm& sf, const SolveOptions& opts) {
    Ipm ipm(sf, opts);
    return ipm.run();
}

} // namespace qcopf::detail
