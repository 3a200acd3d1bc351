#include "gridtwin/nlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>
#include <lapacke.h>
#include <spdlog/spdlog.h>

namespace gridtwin::nlp {

std::string_view to_string(Status status) {
    switch (status) {
        case Status::optimal: return "optimal";
        case Status::infeasible: return "infeasible";
        case Status::iteration_limit: return "iteration-limit";
        case Status::numerical_failure: return "numerical-failure";
    }
    return "?";
}

double infeasibility(const Problem& problem, const Vector& x) {
    double worst = 0.0;
    if (problem.num_equalities() > 0) worst = problem.equalities(x).cwiseAbs().maxCoeff();
    if (problem.num_inequalities() > 0) worst = std::max(worst, (-problem.inequalities(x)).maxCoeff());
    return std::max(worst, 0.0);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Symmetric indefinite factorisation (Bunch-Kaufman) with inertia.
class KktFactor {
public:
    /// `zero_tol` classifies pivots; it must not scale with the regularisation.
    bool factor(const Matrix& k, double zero_tol) {
        n_ = static_cast<int>(k.rows());
        lu_ = k;
        ipiv_.assign(static_cast<std::size_t>(n_), 0);
        const lapack_int info = LAPACKE_dsytrf(LAPACK_COL_MAJOR, 'L', n_, lu_.data(), n_, ipiv_.data());
        if (info < 0) return false;
        count_inertia(zero_tol);
        return true;
    }

    int positive() const { return pos_; }
    int negative() const { return neg_; }
    int zero() const { return zero_; }

    Vector solve(const Vector& rhs) const {
        Vector out = rhs;
        LAPACKE_dsytrs(LAPACK_COL_MAJOR, 'L', n_, 1, lu_.data(), n_, ipiv_.data(), out.data(), n_);
        return out;
    }

private:
    void count_inertia(double eps) {
        pos_ = neg_ = zero_ = 0;
        for (int k = 0; k < n_; ++k) {
            if (ipiv_[static_cast<std::size_t>(k)] > 0) {
                const double d = lu_(k, k);
                if (std::abs(d) <= eps) {
                    ++zero_;
                } else if (d > 0) {
                    ++pos_;
                } else {
                    ++neg_;
                }
            } else {
                // 2x2 pivot block occupying rows k and k+1.
                const double a = lu_(k, k);
                const double b = lu_(k + 1, k);
                const double c = lu_(k + 1, k + 1);
                const double det = a * c - b * b;
                if (det < 0) {
                    ++pos_;
                    ++neg_;
                } else if (det > 0) {
                    if (a + c > 0) {
                        pos_ += 2;
                    } else {
                        neg_ += 2;
                    }
                } else {
                    ++zero_;
                    if (a + c > 0) {
                        ++pos_;
                    } else {
                        ++neg_;
                    }
                }
                ++k;
            }
        }
    }

    int n_ = 0;
    Matrix lu_;
    std::vector<lapack_int> ipiv_;
    int pos_ = 0;
    int neg_ = 0;
    int zero_ = 0;
};

struct Iterate {
    Vector x, s, y, z;
};

struct Eval {
    double f = 0.0;
    Vector g, c, d;
    Matrix jc, jd;
};

Eval evaluate(const Problem& p, const Vector& x) {
    Eval e;
    e.f = p.objective(x);
    e.g = p.gradient(x);
    e.c = p.equalities(x);
    e.jc = p.equality_jacobian(x);
    e.d = p.inequalities(x);
    e.jd = p.inequality_jacobian(x);
    return e;
}

double inf_norm(const Vector& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
double one_norm(const Vector& v) { return v.size() ? v.cwiseAbs().sum() : 0.0; }

bool finite(const Vector& v) { return v.allFinite(); }

struct Outcome {
    Status status = Status::numerical_failure;
    Iterate it;
    int iterations = 0;
    double dual_inf = 0.0;
    double compl_err = 0.0;
    bool stalled_infeasible = false;
    std::string message;
};

/// Barrier iteration without restoration.
Outcome barrier_solve(const Problem& p, const Vector& x0, const Options& opt, int iteration_budget) {
    const int n = p.num_variables();
    const int me = p.num_equalities();
    const int mi = p.num_inequalities();

    Outcome out;
    Iterate it;
    it.x = x0;
    Eval ev = evaluate(p, it.x);
    if (!std::isfinite(ev.f) || !finite(ev.c) || !finite(ev.d)) {
        out.status = Status::numerical_failure;
        out.message = "non-finite function values at the starting point";
        out.it = it;
        return out;
    }

    double mu = opt.mu_init;
    it.s = Vector(mi);
    for (int i = 0; i < mi; ++i) {
        it.s(i) = std::max(ev.d(i), opt.bound_push * std::max(1.0, std::abs(ev.d(i))));
    }
    it.z = (mu / it.s.array()).matrix();

    // Least-squares equality multipliers; dropped if implausibly large.
    it.y = Vector::Zero(me);
    if (me > 0) {
        const Vector r = ev.g - ev.jd.transpose() * it.z;
        const Matrix a = ev.jc * ev.jc.transpose() + 1e-8 * Matrix::Identity(me, me);
        Vector y0 = a.ldlt().solve(ev.jc * r);
        if (finite(y0) && inf_norm(y0) <= 1e3) it.y = y0;
    }

    double nu = 1.0;
    double delta_w_last = 0.0;
    int failed_searches = 0;
    double best_theta = kInf;
    int since_progress = 0;
    constexpr double s_max = 100.0;
    constexpr double kappa_sigma = 1e10;

    for (int iter = 0;; ++iter) {
        out.iterations = iter;
        const Vector r_d = ev.g - ev.jc.transpose() * it.y - ev.jd.transpose() * it.z;
        const Vector r_i = ev.d - it.s;
        const double primal = std::max(inf_norm(ev.c), inf_norm(r_i));
        const double violation = std::max(inf_norm(ev.c), mi ? std::max((-ev.d).maxCoeff(), 0.0) : 0.0);
        const double s_d = std::max(s_max, (one_norm(it.y) + one_norm(it.z)) / std::max(1, me + mi)) / s_max;
        const double s_c = std::max(s_max, one_norm(it.z) / std::max(1, mi)) / s_max;
        const Vector sz = it.s.cwiseProduct(it.z);
        const double dual_inf = inf_norm(r_d) / s_d;
        const double compl_err = inf_norm(sz) / s_c;
        out.dual_inf = dual_inf;
        out.compl_err = compl_err;

        const double e0 = std::max({dual_inf, primal, compl_err});
        if (e0 <= opt.tol && violation <= opt.constr_viol_tol) {
            out.status = Status::optimal;
            out.it = it;
            return out;
        }
        if (iter >= iteration_budget) {
            out.status = Status::iteration_limit;
            out.message = fmt::format("iteration limit ({}) reached, kkt error {:.3e}", iteration_budget, e0);
            out.it = it;
            return out;
        }

        // Stall on infeasibility: hand over to restoration.
        const double theta = one_norm(ev.c) + one_norm(r_i);
        if (theta < 0.99 * best_theta) {
            best_theta = theta;
            since_progress = 0;
        } else if (++since_progress > opt.stall_window && primal > 1e-6) {
            out.status = Status::numerical_failure;
            out.stalled_infeasible = true;
            out.message = fmt::format("no progress on constraint violation ({:.3e})", primal);
            out.it = it;
            return out;
        }

        // Barrier parameter update (monotone).
        for (;;) {
            const double e_mu = std::max({dual_inf, primal, inf_norm((sz.array() - mu).matrix()) / s_c});
            if (e_mu > 10.0 * mu || mu <= opt.tol / 10.0) break;
            mu = std::max(opt.tol / 10.0, std::min(0.2 * mu, std::pow(mu, 1.5)));
        }

        // Newton system on (dx, -dy) after eliminating ds and dz.
        const Vector sigma = it.z.cwiseQuotient(it.s);
        const Matrix h = p.lagrangian_hessian(it.x, 1.0, it.y, it.z);
        Matrix w = h;
        if (mi > 0) w.noalias() += ev.jd.transpose() * sigma.asDiagonal() * ev.jd;
        const Vector comp = it.z - (mu / it.s.array()).matrix();
        Vector rhs1 = -r_d;
        if (mi > 0) rhs1 -= ev.jd.transpose() * (comp + sigma.cwiseProduct(r_i));

        Matrix kkt = Matrix::Zero(n + me, n + me);
        kkt.topLeftCorner(n, n) = w;
        if (me > 0) {
            kkt.bottomLeftCorner(me, n) = ev.jc;
            kkt.topRightCorner(n, me) = ev.jc.transpose();
        }
        Vector rhs(n + me);
        rhs.head(n) = rhs1;
        if (me > 0) rhs.tail(me) = -ev.c;

        KktFactor fac;
        const double zero_tol = 1e-14 * std::max(1.0, kkt.cwiseAbs().maxCoeff());
        double delta_w = 0.0;
        double delta_c = 0.0;
        bool ok = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            Matrix k = kkt;
            k.topLeftCorner(n, n).diagonal().array() += delta_w;
            if (me > 0) k.bottomRightCorner(me, me).diagonal().array() -= delta_c;
            if (!fac.factor(k, zero_tol)) break;
            if (fac.positive() == n && fac.negative() == me && fac.zero() == 0) {
                ok = true;
                kkt = std::move(k);
                break;
            }
            // Missing negative pivots mean rank-deficient constraint Jacobians.
            if ((fac.zero() > 0 || fac.negative() < me) && delta_c == 0.0) {
                delta_c = std::max(1e-8 * std::pow(mu, 0.25), 1e2 * zero_tol);
            }
            if (delta_w == 0.0) {
                delta_w = delta_w_last == 0.0 ? 1e-4 : std::max(1e-20, delta_w_last / 3.0);
            } else {
                delta_w *= delta_w_last == 0.0 ? 100.0 : 8.0;
            }
            if (delta_w > 1e40) break;
        }
        if (!ok) {
            out.status = Status::numerical_failure;
            out.message = "could not obtain a KKT factorisation with correct inertia";
            out.it = it;
            return out;
        }
        if (delta_w > 0.0) delta_w_last = delta_w;

        Vector sol = fac.solve(rhs);
        for (int refine = 0; refine < 2; ++refine) {
            const Vector res = rhs - kkt * sol;
            sol += fac.solve(res);
        }
        if (!finite(sol)) {
            out.status = Status::numerical_failure;
            out.message = "non-finite Newton step";
            out.it = it;
            return out;
        }
        const Vector dx = sol.head(n);
        const Vector dy = me > 0 ? Vector(-sol.tail(me)) : Vector();
        const Vector ds = mi > 0 ? Vector(ev.jd * dx + r_i) : Vector();
        const Vector dz = mi > 0 ? Vector(-comp - sigma.cwiseProduct(ds)) : Vector();

        const double tau = std::max(0.99, 1.0 - mu);
        double alpha_p = 1.0;
        double alpha_d = 1.0;
        for (int i = 0; i < mi; ++i) {
            if (ds(i) < 0) alpha_p = std::min(alpha_p, -tau * it.s(i) / ds(i));
            if (dz(i) < 0) alpha_d = std::min(alpha_d, -tau * it.z(i) / dz(i));
        }

        // l1 merit function on the barrier problem.
        const auto merit = [&](double f, const Vector& c, const Vector& d, const Vector& s) {
            double barrier = 0.0;
            for (int i = 0; i < mi; ++i) barrier -= std::log(s(i));
            return f + mu * barrier + nu * (one_norm(c) + one_norm(d - s));
        };
        double grad_phi = ev.g.dot(dx);
        for (int i = 0; i < mi; ++i) grad_phi -= mu * ds(i) / it.s(i);
        if (theta > 0.0) {
            const double quad = std::max(0.0, dx.dot(h * dx) + (mi > 0 ? ds.dot(sigma.cwiseProduct(ds)) : 0.0));
            const double nu_trial = (grad_phi + 0.5 * quad) / (0.9 * theta);
            if (nu < nu_trial) nu = nu_trial + 1.0;
        }
        const double dphi = grad_phi - nu * theta;
        const double phi0 = merit(ev.f, ev.c, ev.d, it.s);

        double alpha = alpha_p;
        bool accepted = false;
        Iterate trial;
        Eval trial_ev;
        Vector step_dy = dy;
        Vector step_dz = dz;
        const auto acceptable = [&](const Eval& e, const Vector& s_trial, double a) {
            if (!std::isfinite(e.f) || !finite(e.c) || !finite(e.d)) return false;
            const double phi = merit(e.f, e.c, e.d, s_trial);
            return phi <= phi0 + 1e-4 * a * dphi || dphi > -1e-14 * std::max(1.0, std::abs(phi0));
        };
        for (int bt = 0; bt < 40; ++bt) {
            trial.x = it.x + alpha * dx;
            trial.s = it.s + alpha * ds;
            trial_ev = evaluate(p, trial.x);
            if (acceptable(trial_ev, trial.s, alpha)) {
                accepted = true;
                break;
            }
            if (bt == 0 && std::isfinite(trial_ev.f) && finite(trial_ev.c) && finite(trial_ev.d)) {
                // Second-order correction against the Maratos effect.
                Vector c_soc = alpha * ev.c + trial_ev.c;
                Vector ri_soc = alpha * r_i + (trial_ev.d - trial.s);
                for (int k = 0; k < 3 && !accepted; ++k) {
                    Vector rhs_soc(n + me);
                    rhs_soc.head(n) = -r_d;
                    if (mi > 0) rhs_soc.head(n) -= ev.jd.transpose() * (comp + sigma.cwiseProduct(ri_soc));
                    if (me > 0) rhs_soc.tail(me) = -c_soc;
                    const Vector sol_soc = fac.solve(rhs_soc);
                    if (!finite(sol_soc)) break;
                    const Vector dx_soc = sol_soc.head(n);
                    const Vector ds_soc = mi > 0 ? Vector(ev.jd * dx_soc + ri_soc) : Vector();
                    double a_soc = 1.0;
                    for (int i = 0; i < mi; ++i) {
                        if (ds_soc(i) < 0) a_soc = std::min(a_soc, -tau * it.s(i) / ds_soc(i));
                    }
                    Iterate t2;
                    t2.x = it.x + a_soc * dx_soc;
                    t2.s = it.s + a_soc * ds_soc;
                    Eval e2 = evaluate(p, t2.x);
                    if (acceptable(e2, t2.s, alpha)) {
                        accepted = true;
                        trial = std::move(t2);
                        trial_ev = std::move(e2);
                        alpha = a_soc;
                        if (me > 0) step_dy = -sol_soc.tail(me);
                        if (mi > 0) {
                            step_dz = -comp - sigma.cwiseProduct(ds_soc);
                            alpha_d = 1.0;
                            for (int i = 0; i < mi; ++i) {
                                if (step_dz(i) < 0) alpha_d = std::min(alpha_d, -tau * it.z(i) / step_dz(i));
                            }
                        }
                        break;
                    }
                    if (!std::isfinite(e2.f) || !finite(e2.c) || !finite(e2.d)) break;
                    c_soc = a_soc * c_soc + e2.c;
                    ri_soc = a_soc * ri_soc + (e2.d - t2.s);
                }
                if (accepted) break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            if (++failed_searches >= 5) {
                out.status = Status::numerical_failure;
                out.message = "line search failed repeatedly";
                out.it = it;
                return out;
            }
            // Take a short step anyway to escape.
            alpha = std::min(alpha_p, 1e-3);
            trial.x = it.x + alpha * dx;
            trial.s = it.s + alpha * ds;
            trial_ev = evaluate(p, trial.x);
            if (!std::isfinite(trial_ev.f) || !finite(trial_ev.c) || !finite(trial_ev.d)) {
                out.status = Status::numerical_failure;
                out.message = "non-finite function values after step";
                out.it = it;
                return out;
            }
        } else {
            failed_searches = 0;
        }

        spdlog::trace("ipm {:3d} f={:.6e} inf_pr={:.2e} inf_du={:.2e} compl={:.2e} mu={:.1e} dw={:.1e} a_p={:.2e} a_d={:.2e} nu={:.1e}",
                      iter, ev.f, primal, dual_inf, compl_err, mu, delta_w, alpha, alpha_d, nu);
        it.x = trial.x;
        it.s = trial.s;
        if (me > 0) it.y += alpha * step_dy;
        if (mi > 0) {
            it.z += alpha_d * step_dz;
            for (int i = 0; i < mi; ++i) {
                const double lo = mu / (kappa_sigma * it.s(i));
                const double hi = kappa_sigma * mu / it.s(i);
                it.z(i) = std::clamp(it.z(i), lo, hi);
            }
        }
        ev = std::move(trial_ev);
    }
}

/// Phase-1 problem: min sum(p + q + r) + zeta/2 |D (x - x_ref)|^2
/// s.t. c(x) - p + q = 0, d(x) + r >= 0, p, q, r >= 0.
class FeasibilityProblem final : public Problem {
public:
    FeasibilityProblem(const Problem& inner, Vector x_ref, double zeta)
        : inner_(inner), x_ref_(std::move(x_ref)), zeta_(zeta) {
        n_ = inner.num_variables();
        me_ = inner.num_equalities();
        mi_ = inner.num_inequalities();
        scale_ = (1.0 / x_ref_.cwiseAbs().array().max(1.0)).matrix();
    }

    int num_variables() const override { return n_ + 2 * me_ + mi_; }
    int num_equalities() const override { return me_; }
    int num_inequalities() const override { return mi_ + 2 * me_ + mi_; }

    double objective(const Vector& v) const override {
        const Vector dx = (v.head(n_) - x_ref_).cwiseProduct(scale_);
        return v.tail(2 * me_ + mi_).sum() + 0.5 * zeta_ * dx.squaredNorm();
    }
    Vector gradient(const Vector& v) const override {
        Vector g(num_variables());
        g.head(n_) = zeta_ * (v.head(n_) - x_ref_).cwiseProduct(scale_).cwiseProduct(scale_);
        g.tail(2 * me_ + mi_).setOnes();
        return g;
    }
    Vector equalities(const Vector& v) const override {
        return inner_.equalities(v.head(n_)) - v.segment(n_, me_) + v.segment(n_ + me_, me_);
    }
    Matrix equality_jacobian(const Vector& v) const override {
        Matrix j = Matrix::Zero(me_, num_variables());
        j.leftCols(n_) = inner_.equality_jacobian(v.head(n_));
        j.block(0, n_, me_, me_) = -Matrix::Identity(me_, me_);
        j.block(0, n_ + me_, me_, me_) = Matrix::Identity(me_, me_);
        return j;
    }
    Vector inequalities(const Vector& v) const override {
        Vector d(num_inequalities());
        d.head(mi_) = inner_.inequalities(v.head(n_)) + v.tail(mi_);
        d.tail(2 * me_ + mi_) = v.tail(2 * me_ + mi_);
        return d;
    }
    Matrix inequality_jacobian(const Vector& v) const override {
        Matrix j = Matrix::Zero(num_inequalities(), num_variables());
        j.topLeftCorner(mi_, n_) = inner_.inequality_jacobian(v.head(n_));
        j.block(0, n_ + 2 * me_, mi_, mi_) = Matrix::Identity(mi_, mi_);
        j.bottomRightCorner(2 * me_ + mi_, 2 * me_ + mi_) = Matrix::Identity(2 * me_ + mi_, 2 * me_ + mi_);
        return j;
    }
    Matrix lagrangian_hessian(const Vector& v, double sigma, const Vector& y, const Vector& z) const override {
        Matrix h = Matrix::Zero(num_variables(), num_variables());
        h.topLeftCorner(n_, n_) = inner_.lagrangian_hessian(v.head(n_), 0.0, y, z.head(mi_));
        h.topLeftCorner(n_, n_).diagonal() += sigma * zeta_ * scale_.cwiseProduct(scale_);
        return h;
    }

    Vector start() const {
        Vector v(num_variables());
        v.head(n_) = x_ref_;
        const Vector c = inner_.equalities(x_ref_);
        const Vector d = inner_.inequalities(x_ref_);
        constexpr double push = 1e-4;
        for (int i = 0; i < me_; ++i) {
            v(n_ + i) = std::max(c(i), 0.0) + push;
            v(n_ + me_ + i) = std::max(-c(i), 0.0) + push;
        }
        for (int i = 0; i < mi_; ++i) v(n_ + 2 * me_ + i) = std::max(-d(i), 0.0) + push;
        return v;
    }

private:
    const Problem& inner_;
    Vector x_ref_;
    Vector scale_;
    double zeta_;
    int n_ = 0;
    int me_ = 0;
    int mi_ = 0;
};

Result finish(const Problem& p, const Outcome& o, int iterations, bool restoration) {
    Result r;
    r.status = o.status;
    r.x = o.it.x;
    r.y = o.it.y;
    r.z = o.it.z;
    r.s = o.it.s;
    r.objective = p.objective(o.it.x);
    r.iterations = iterations;
    r.restoration_used = restoration;
    r.primal_infeasibility = infeasibility(p, o.it.x);
    r.dual_infeasibility = o.dual_inf;
    r.complementarity = o.compl_err;
    r.message = o.message;
    return r;
}

}  // namespace

Result minimize(const Problem& problem, const Vector& x0, const Options& opt) {
    if (x0.size() != problem.num_variables()) {
        Result r;
        r.status = Status::numerical_failure;
        r.message = "starting point has the wrong dimension";
        return r;
    }
    Outcome first = barrier_solve(problem, x0, opt, opt.max_iter);
    if (first.status == Status::optimal || !opt.feasibility_restoration) {
        return finish(problem, first, first.iterations, false);
    }
    spdlog::debug("barrier stopped after {} iterations: {}", first.iterations, first.message);
    const double viol = first.it.x.size() ? infeasibility(problem, first.it.x) : kInf;
    if (viol <= opt.constr_viol_tol && !first.stalled_infeasible) {
        return finish(problem, first, first.iterations, false);
    }

    // Feasibility restoration from the point where the barrier method stopped.
    const Vector ref = first.it.x.allFinite() ? first.it.x : x0;
    FeasibilityProblem phase1(problem, ref, 1e-4);
    Options inner = opt;
    inner.feasibility_restoration = false;
    Outcome resto = barrier_solve(phase1, phase1.start(), inner, opt.max_iter);
    const int n = problem.num_variables();
    spdlog::debug("restoration stopped after {} iterations ({}): {}", resto.iterations, to_string(resto.status),
                  resto.message);
    const Vector x_resto = resto.it.x.head(n);
    const double resto_viol = infeasibility(problem, x_resto);
    int used = first.iterations + resto.iterations;

    if (resto_viol > opt.restoration_tol) {
        // Only a converged phase-1 problem certifies local infeasibility.
        Outcome o = first;
        o.status = resto.status == Status::optimal ? Status::infeasible : Status::numerical_failure;
        o.message = fmt::format("feasibility restoration ended with constraint violation {:.3e} ({})", resto_viol,
                                to_string(resto.status));
        Result r = finish(problem, o, used, true);
        r.x = x_resto;
        r.primal_infeasibility = resto_viol;
        return r;
    }

    Outcome second = barrier_solve(problem, x_resto, opt, opt.max_iter);
    used += second.iterations;
    if (second.status != Status::optimal && second.message.empty()) {
        second.message = "barrier method failed after feasibility restoration";
    }
    return finish(problem, second, used, true);
}

}  // namespace gridtwin::nlp
