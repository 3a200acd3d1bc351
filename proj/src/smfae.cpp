#include "gridtwin/smfae.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "gridtwin/error.hpp"

namespace gridtwin {

std::string ActivationMode::to_string() const {
    if (kind == ActivationKind::corrective) return "corrective";
    return fmt::format("preventive:{}", element ? element->to_string() : std::string("?"));
}

std::string_view to_string(ScheduleStatus status) {
    switch (status) {
        case ScheduleStatus::optimal: return "optimal";
        case ScheduleStatus::infeasible: return "infeasible";
        case ScheduleStatus::solver_failure: return "solver-failure";
    }
    return "?";
}

RedispatchProblem build_problem(const Network& network, const OperatingPoint& point, ActivationMode mode,
                                double p_ext_base_mw, const RedispatchConfig& config) {
    check_operating_point(network, point);
    if (mode.kind == ActivationKind::preventive && !mode.element) {
        throw ProblemError("preventive activation needs the outaged element");
    }
    RedispatchProblem pb;
    pb.network = network;
    pb.admittance = build_admittance(network);
    pb.point = point;
    pb.mode = mode;
    pb.config = config;

    const double base = network.s_base_mva;
    const int nb = pb.admittance.size();
    for (std::size_t k = 0; k < network.generators.size(); ++k) {
        const auto& g = network.generators[k];
        if (!g.in_service) continue;
        const auto bus = pb.admittance.index_of(g.bus);
        if (!bus) continue;
        if (!g.has_hist_max()) {
            throw ProblemError(fmt::format("missing hist-max data for generator {}", g.id));
        }
        pb.units.push_back({k, g.id, *bus, point.generators[k].p_mw / base, point.generators[k].q_mvar / base,
                            g.p_hist_max_mw / base});
    }
    if (pb.units.empty()) throw ProblemError("empty generator set");

    pb.p_load_pu = Eigen::VectorXd::Zero(nb);
    pb.q_load_pu = Eigen::VectorXd::Zero(nb);
    for (std::size_t k = 0; k < network.loads.size(); ++k) {
        const auto& l = network.loads[k];
        if (!l.in_service) continue;
        if (const auto bus = pb.admittance.index_of(l.bus)) {
            pb.p_load_pu(*bus) += point.loads[k].p_mw / base;
            pb.q_load_pu(*bus) += point.loads[k].q_mvar / base;
        }
    }
    pb.p_ext_fixed_pu = p_ext_base_mw / base;
    pb.vm_slack_pu = network.ext_grid.vm_pu;

    try {
        const PowerFlowSolution sol = solve_power_flow(network, pb.admittance, point, config.power_flow);
        pb.warm_vm = sol.vm();
        pb.warm_va = sol.va();
        pb.warm_q_ext_pu = sol.q_ext_mvar / base;
        pb.warm_start_from_power_flow = true;
    } catch (const PowerFlowError&) {
        pb.warm_vm = Eigen::VectorXd::Constant(nb, pb.vm_slack_pu);
        pb.warm_va = Eigen::VectorXd::Zero(nb);
    }
    return pb;
}

namespace {

using nlp::Matrix;
using nlp::Vector;

enum class Row { p_upper, p_lower, pf_upper, pf_lower, branch, v_lower, v_upper, theta_upper, theta_lower };

struct IneqRow {
    Row kind;
    int index;  // meaning follows the row kind
};

/// Variables: [P_u..., Q_u..., V_i..., theta_i..., Q_ext], all p.u.
/// Equalities: P balance (every bus), Q balance (every bus), V_slack, theta_slack,
/// then P_u = Q_u = 0 for units without historical output.
class RedispatchNlp final : public nlp::Problem {
public:
    explicit RedispatchNlp(const RedispatchProblem& pb) : pb_(pb) {
        nu_ = static_cast<int>(pb.units.size());
        nb_ = pb.admittance.size();
        slack_ = pb.admittance.slack_index();
        g_ = pb.admittance.conductance();
        b_ = pb.admittance.susceptance();
        neighbours_.resize(static_cast<std::size_t>(nb_));
        for (int i = 0; i < nb_; ++i) {
            for (int j = 0; j < nb_; ++j) {
                if (i != j && (g_(i, j) != 0.0 || b_(i, j) != 0.0)) neighbours_[static_cast<std::size_t>(i)].push_back(j);
            }
        }
        const auto& cfg = pb.config;
        k_pf_ = std::tan(std::acos(cfg.min_power_factor)) * (1.0 - cfg.limit_margin_pu);
        for (int u = 0; u < nu_; ++u) {
            if (pb.units[static_cast<std::size_t>(u)].p_hist_max_pu > 0.0) {
                rows_.push_back({Row::p_upper, u});
                rows_.push_back({Row::p_lower, u});
                rows_.push_back({Row::pf_upper, u});
                rows_.push_back({Row::pf_lower, u});
            } else {
                frozen_.push_back(u);
            }
        }
        const auto& branches = pb.admittance.branches();
        for (int k = 0; k < static_cast<int>(branches.size()); ++k) rows_.push_back({Row::branch, k});
        for (int i = 0; i < nb_; ++i) {
            if (i == slack_) continue;
            rows_.push_back({Row::v_lower, i});
            rows_.push_back({Row::v_upper, i});
            rows_.push_back({Row::theta_upper, i});
            rows_.push_back({Row::theta_lower, i});
        }
    }

    int num_variables() const override { return 2 * nu_ + 2 * nb_ + 1; }
    int num_equalities() const override { return 2 * nb_ + 2 + 2 * static_cast<int>(frozen_.size()); }
    int num_inequalities() const override { return static_cast<int>(rows_.size()); }

    int ip(int u) const { return u; }
    int iq(int u) const { return nu_ + u; }
    int iv(int i) const { return 2 * nu_ + i; }
    int it(int i) const { return 2 * nu_ + nb_ + i; }
    int iqext() const { return 2 * nu_ + 2 * nb_; }

    double objective(const Vector& x) const override {
        const auto& w = pb_.config.weights;
        double f = 0.0;
        for (int u = 0; u < nu_; ++u) {
            const auto& unit = pb_.units[static_cast<std::size_t>(u)];
            const double dp = x(ip(u)) - unit.p_base_pu;
            const double dq = x(iq(u)) - unit.q_base_pu;
            f += w.w_p * dp * dp + w.w_q * dq * dq;
        }
        return f;
    }

    Vector gradient(const Vector& x) const override {
        const auto& w = pb_.config.weights;
        Vector g = Vector::Zero(num_variables());
        for (int u = 0; u < nu_; ++u) {
            const auto& unit = pb_.units[static_cast<std::size_t>(u)];
            g(ip(u)) = 2.0 * w.w_p * (x(ip(u)) - unit.p_base_pu);
            g(iq(u)) = 2.0 * w.w_q * (x(iq(u)) - unit.q_base_pu);
        }
        return g;
    }

    /// Calculated injections P_i(V, theta), Q_i(V, theta) and optionally their
    /// derivatives w.r.t. (V, theta) in an nb x 2nb block each.
    void injections(const Vector& x, Vector& p, Vector& q, Matrix* dp, Matrix* dq) const {
        p = Vector::Zero(nb_);
        q = Vector::Zero(nb_);
        if (dp) *dp = Matrix::Zero(nb_, 2 * nb_);
        if (dq) *dq = Matrix::Zero(nb_, 2 * nb_);
        for (int i = 0; i < nb_; ++i) {
            const double vi = x(iv(i));
            const double ti = x(it(i));
            p(i) += g_(i, i) * vi * vi;
            q(i) -= b_(i, i) * vi * vi;
            if (dp) (*dp)(i, i) += 2.0 * g_(i, i) * vi;
            if (dq) (*dq)(i, i) -= 2.0 * b_(i, i) * vi;
            for (const int j : neighbours_[static_cast<std::size_t>(i)]) {
                const double vj = x(iv(j));
                const double th = ti - x(it(j));
                const double c = std::cos(th);
                const double s = std::sin(th);
                const double a = g_(i, j) * c + b_(i, j) * s;
                const double bb = g_(i, j) * s - b_(i, j) * c;
                p(i) += vi * vj * a;
                q(i) += vi * vj * bb;
                if (dp) {
                    (*dp)(i, i) += vj * a;
                    (*dp)(i, j) += vi * a;
                    (*dp)(i, nb_ + i) -= vi * vj * bb;
                    (*dp)(i, nb_ + j) += vi * vj * bb;
                }
                if (dq) {
                    (*dq)(i, i) += vj * bb;
                    (*dq)(i, j) += vi * bb;
                    (*dq)(i, nb_ + i) += vi * vj * a;
                    (*dq)(i, nb_ + j) -= vi * vj * a;
                }
            }
        }
    }

    Vector equalities(const Vector& x) const override {
        Vector p, q;
        injections(x, p, q, nullptr, nullptr);
        Vector c(num_equalities());
        for (int i = 0; i < nb_; ++i) {
            c(i) = -pb_.p_load_pu(i) - p(i);
            c(nb_ + i) = -pb_.q_load_pu(i) - q(i);
        }
        for (int u = 0; u < nu_; ++u) {
            const int bus = pb_.units[static_cast<std::size_t>(u)].bus;
            c(bus) += x(ip(u));
            c(nb_ + bus) += x(iq(u));
        }
        c(slack_) += pb_.p_ext_fixed_pu;
        c(nb_ + slack_) += x(iqext());
        c(2 * nb_) = x(iv(slack_)) - pb_.vm_slack_pu;
        c(2 * nb_ + 1) = x(it(slack_));
        int row = 2 * nb_ + 2;
        for (const int u : frozen_) {
            c(row++) = x(ip(u));
            c(row++) = x(iq(u));
        }
        return c;
    }

    Matrix equality_jacobian(const Vector& x) const override {
        Vector p, q;
        Matrix dp, dq;
        injections(x, p, q, &dp, &dq);
        Matrix j = Matrix::Zero(num_equalities(), num_variables());
        j.block(0, iv(0), nb_, 2 * nb_) = -dp;
        j.block(nb_, iv(0), nb_, 2 * nb_) = -dq;
        for (int u = 0; u < nu_; ++u) {
            const int bus = pb_.units[static_cast<std::size_t>(u)].bus;
            j(bus, ip(u)) += 1.0;
            j(nb_ + bus, iq(u)) += 1.0;
        }
        j(nb_ + slack_, iqext()) = 1.0;
        j(2 * nb_, iv(slack_)) = 1.0;
        j(2 * nb_ + 1, it(slack_)) = 1.0;
        int row = 2 * nb_ + 2;
        for (const int u : frozen_) {
            j(row++, ip(u)) = 1.0;
            j(row++, iq(u)) = 1.0;
        }
        return j;
    }

    double branch_limit_sq(const BranchModel& br) const {
        const double lim = pb_.config.branch_current_fraction * br.i_max_pu - pb_.config.limit_margin_pu;
        return lim * lim;
    }

    double p_bound(const DispatchUnit& unit) const {
        const double b = pb_.config.p_bound_fraction * unit.p_hist_max_pu;
        return b - std::min(pb_.config.limit_margin_pu, 1e-2 * b);
    }

    // |Q| <= k |P| is imposed on the half-plane of the base output's sign,
    // where it is linear: k s P - Q >= 0 and k s P + Q >= 0. The nonlinear
    // cone form has a vanishing gradient at P = Q = 0 and stalls the solver.
    double orientation(int u) const { return pb_.units[static_cast<std::size_t>(u)].p_base_pu < 0.0 ? -1.0 : 1.0; }

    Vector inequalities(const Vector& x) const override {
        const auto& lim = pb_.config.limits;
        const double margin = pb_.config.limit_margin_pu;
        const auto& branches = pb_.admittance.branches();
        Vector d(num_inequalities());
        for (int r = 0; r < num_inequalities(); ++r) {
            const IneqRow& row = rows_[static_cast<std::size_t>(r)];
            switch (row.kind) {
                case Row::p_upper: {
                    const auto& unit = pb_.units[static_cast<std::size_t>(row.index)];
                    d(r) = p_bound(unit) - x(ip(row.index));
                    break;
                }
                case Row::p_lower: {
                    const auto& unit = pb_.units[static_cast<std::size_t>(row.index)];
                    d(r) = x(ip(row.index)) + p_bound(unit);
                    break;
                }
                case Row::pf_upper:
                case Row::pf_lower: {
                    const double sign = row.kind == Row::pf_upper ? -1.0 : 1.0;
                    d(r) = k_pf_ * orientation(row.index) * x(ip(row.index)) + sign * x(iq(row.index));
                    break;
                }
                case Row::branch: {
                    const auto& br = branches[static_cast<std::size_t>(row.index)];
                    d(r) = branch_limit_sq(br) - branch_current_sq(x, br);
                    break;
                }
                case Row::v_lower: d(r) = x(iv(row.index)) - (lim.v_min_pu + margin); break;
                case Row::v_upper: d(r) = (lim.v_max_pu - margin) - x(iv(row.index)); break;
                case Row::theta_upper: d(r) = std::numbers::pi - x(it(row.index)); break;
                case Row::theta_lower: d(r) = x(it(row.index)) + std::numbers::pi; break;
            }
        }
        return d;
    }

    Matrix inequality_jacobian(const Vector& x) const override {
        const auto& branches = pb_.admittance.branches();
        Matrix j = Matrix::Zero(num_inequalities(), num_variables());
        for (int r = 0; r < num_inequalities(); ++r) {
            const IneqRow& row = rows_[static_cast<std::size_t>(r)];
            switch (row.kind) {
                case Row::p_upper: j(r, ip(row.index)) = -1.0; break;
                case Row::p_lower: j(r, ip(row.index)) = 1.0; break;
                case Row::pf_upper:
                case Row::pf_lower: {
                    j(r, ip(row.index)) = k_pf_ * orientation(row.index);
                    j(r, iq(row.index)) = row.kind == Row::pf_upper ? -1.0 : 1.0;
                    break;
                }
                case Row::branch: {
                    const auto& br = branches[static_cast<std::size_t>(row.index)];
                    const double y2 = std::norm(br.y_series);
                    const double vi = x(iv(br.from));
                    const double vj = x(iv(br.to));
                    const double th = x(it(br.from)) - x(it(br.to));
                    const double c = std::cos(th);
                    const double s = std::sin(th);
                    j(r, iv(br.from)) = -y2 * (2.0 * vi - 2.0 * vj * c);
                    j(r, iv(br.to)) = -y2 * (2.0 * vj - 2.0 * vi * c);
                    j(r, it(br.from)) = -y2 * 2.0 * vi * vj * s;
                    j(r, it(br.to)) = y2 * 2.0 * vi * vj * s;
                    break;
                }
                case Row::v_lower: j(r, iv(row.index)) = 1.0; break;
                case Row::v_upper: j(r, iv(row.index)) = -1.0; break;
                case Row::theta_upper: j(r, it(row.index)) = -1.0; break;
                case Row::theta_lower: j(r, it(row.index)) = 1.0; break;
            }
        }
        return j;
    }

    Matrix lagrangian_hessian(const Vector& x, double sigma, const Vector& y, const Vector& z) const override {
        const auto& w = pb_.config.weights;
        Matrix h = Matrix::Zero(num_variables(), num_variables());
        for (int u = 0; u < nu_; ++u) {
            h(ip(u), ip(u)) += 2.0 * sigma * w.w_p;
            h(iq(u), iq(u)) += 2.0 * sigma * w.w_q;
        }

        // -y'c with c = ... - P_i(V, theta): contributes +y_P,i * Hess(P_i).
        for (int i = 0; i < nb_; ++i) {
            const double lp = y(i);
            const double lq = y(nb_ + i);
            const double vi = x(iv(i));
            const double ti = x(it(i));
            h(iv(i), iv(i)) += lp * 2.0 * g_(i, i) - lq * 2.0 * b_(i, i);
            if (lp == 0.0 && lq == 0.0) continue;
            for (const int j : neighbours_[static_cast<std::size_t>(i)]) {
                const double vj = x(iv(j));
                const double th = ti - x(it(j));
                const double c = std::cos(th);
                const double s = std::sin(th);
                const double a = g_(i, j) * c + b_(i, j) * s;
                const double bb = g_(i, j) * s - b_(i, j) * c;
                const auto add = [&](int r, int col, double v) {
                    h(r, col) += v;
                    if (r != col) h(col, r) += v;
                };
                add(iv(i), iv(j), lp * a + lq * bb);
                add(iv(i), it(i), -lp * vj * bb + lq * vj * a);
                add(iv(i), it(j), lp * vj * bb - lq * vj * a);
                add(iv(j), it(i), -lp * vi * bb + lq * vi * a);
                add(iv(j), it(j), lp * vi * bb - lq * vi * a);
                const double tt = -lp * vi * vj * a - lq * vi * vj * bb;
                h(it(i), it(i)) += tt;
                h(it(j), it(j)) += tt;
                add(it(i), it(j), -tt);
            }
        }

        const auto& branches = pb_.admittance.branches();
        for (int r = 0; r < num_inequalities(); ++r) {
            const IneqRow& row = rows_[static_cast<std::size_t>(r)];
            const double zr = z(r);
            if (row.kind == Row::branch) {
                // d = limit - h_ij, so -z * Hess(d) = +z * Hess(h_ij).
                const auto& br = branches[static_cast<std::size_t>(row.index)];
                const double k = zr * std::norm(br.y_series);
                const int a = br.from;
                const int b = br.to;
                const double vi = x(iv(a));
                const double vj = x(iv(b));
                const double th = x(it(a)) - x(it(b));
                const double c = std::cos(th);
                const double s = std::sin(th);
                const auto add = [&](int r1, int c1, double v) {
                    h(r1, c1) += v;
                    if (r1 != c1) h(c1, r1) += v;
                };
                add(iv(a), iv(a), 2.0 * k);
                add(iv(b), iv(b), 2.0 * k);
                add(iv(a), iv(b), -2.0 * k * c);
                add(iv(a), it(a), 2.0 * k * vj * s);
                add(iv(a), it(b), -2.0 * k * vj * s);
                add(iv(b), it(a), 2.0 * k * vi * s);
                add(iv(b), it(b), -2.0 * k * vi * s);
                add(it(a), it(a), 2.0 * k * vi * vj * c);
                add(it(b), it(b), 2.0 * k * vi * vj * c);
                add(it(a), it(b), -2.0 * k * vi * vj * c);
            }
        }
        return h;
    }

    double branch_current_sq(const Vector& x, const BranchModel& br) const {
        const double vi = x(iv(br.from));
        const double vj = x(iv(br.to));
        const double th = x(it(br.from)) - x(it(br.to));
        return std::norm(br.y_series) * (vi * vi + vj * vj - 2.0 * vi * vj * std::cos(th));
    }

    Vector base_point() const {
        Vector x(num_variables());
        for (int u = 0; u < nu_; ++u) {
            x(ip(u)) = pb_.units[static_cast<std::size_t>(u)].p_base_pu;
            x(iq(u)) = pb_.units[static_cast<std::size_t>(u)].q_base_pu;
        }
        x.segment(iv(0), nb_) = pb_.warm_vm;
        x.segment(it(0), nb_) = pb_.warm_va;
        x(iqext()) = pb_.warm_q_ext_pu;
        return x;
    }

    Vector start_point() const {
        Vector x = base_point();
        for (int u = 0; u < nu_; ++u) {
            const auto& unit = pb_.units[static_cast<std::size_t>(u)];
            if (unit.p_hist_max_pu <= 0.0) {
                x(ip(u)) = 0.0;
                x(iq(u)) = 0.0;
            } else if (std::abs(unit.p_base_pu) < 1e-4 * unit.p_hist_max_pu) {
                // Start inside the power-factor wedge, not at its apex.
                x(ip(u)) = 0.05 * pb_.config.p_bound_fraction * unit.p_hist_max_pu;
                x(iq(u)) = 0.0;
            }
        }
        return x;
    }

private:
    const RedispatchProblem& pb_;
    int nu_ = 0;
    int nb_ = 0;
    int slack_ = 0;
    double k_pf_ = 0.0;
    Matrix g_;
    Matrix b_;
    std::vector<std::vector<int>> neighbours_;
    std::vector<IneqRow> rows_;
    std::vector<int> frozen_;
};

SetpointSchedule schedule_from(const RedispatchProblem& pb, const RedispatchNlp& model, const Vector& x) {
    const double base = pb.network.s_base_mva;
    SetpointSchedule sch;
    sch.timestamp = pb.point.timestamp;
    sch.mode = pb.mode;
    for (std::size_t u = 0; u < pb.units.size(); ++u) {
        const auto& unit = pb.units[u];
        const auto& gp = pb.point.generators[unit.generator];
        sch.setpoints.push_back({unit.id, gp.p_mw, gp.q_mvar, x(model.ip(static_cast<int>(u))) * base,
                                 x(model.iq(static_cast<int>(u))) * base});
    }
    sch.objective = redispatch_cost(sch, pb.config.weights, base);
    sch.p_ext_mw = pb.p_ext_fixed_pu * base;
    sch.q_ext_mvar = x(model.iqext()) * base;
    sch.bus_ids = pb.admittance.bus_ids();
    sch.vm = x.segment(model.iv(0), pb.admittance.size());
    sch.va = x.segment(model.it(0), pb.admittance.size());
    sch.max_equality_residual_pu = model.num_equalities() ? model.equalities(x).cwiseAbs().maxCoeff() : 0.0;
    return sch;
}

}  // namespace

std::unique_ptr<nlp::Problem> make_nlp(const RedispatchProblem& problem) {
    return std::make_unique<RedispatchNlp>(problem);
}

Eigen::VectorXd warm_start(const RedispatchProblem& problem) { return RedispatchNlp(problem).start_point(); }

double redispatch_cost(const SetpointSchedule& schedule, const RedispatchWeights& weights, double s_base_mva) {
    double f = 0.0;
    for (const auto& sp : schedule.setpoints) {
        const double dp = sp.delta_p_mw() / s_base_mva;
        const double dq = sp.delta_q_mvar() / s_base_mva;
        f += weights.w_p * dp * dp + weights.w_q * dq * dq;
    }
    return f;
}

SetpointSchedule solve(const RedispatchProblem& pb) {
    const RedispatchNlp model(pb);

    if (pb.warm_start_from_power_flow) {
        const Vector x_base = model.base_point();
        const double eq = model.equalities(x_base).cwiseAbs().maxCoeff();
        const double ineq = model.num_inequalities() ? (-model.inequalities(x_base)).maxCoeff() : 0.0;
        if (eq <= 1e-7 && ineq <= 0.0) {
            SetpointSchedule sch = schedule_from(pb, model, x_base);
            sch.status = ScheduleStatus::optimal;
            sch.message = "base point is feasible";
            return sch;
        }
    }

    const nlp::Result res = nlp::minimize(model, model.start_point(), pb.config.optimizer);
    SetpointSchedule sch = schedule_from(pb, model, res.x);
    sch.iterations = res.iterations;
    sch.restoration_used = res.restoration_used;
    sch.stationarity = res.dual_infeasibility;
    sch.message = res.message;
    switch (res.status) {
        case nlp::Status::optimal: sch.status = ScheduleStatus::optimal; break;
        case nlp::Status::infeasible: sch.status = ScheduleStatus::infeasible; break;
        default: sch.status = ScheduleStatus::solver_failure; break;
    }
    if (sch.status == ScheduleStatus::optimal && sch.max_equality_residual_pu > 1e-6) {
        sch.status = ScheduleStatus::solver_failure;
        sch.message = fmt::format("equality residual {:.3e} p.u. above tolerance", sch.max_equality_residual_pu);
    }
    return sch;
}

OperatingPoint apply_schedule(const Network& network, OperatingPoint point, const SetpointSchedule& schedule) {
    for (const auto& sp : schedule.setpoints) {
        for (std::size_t k = 0; k < network.generators.size(); ++k) {
            if (network.generators[k].id == sp.id) {
                point.generators[k] = {sp.p_new_mw, sp.q_new_mvar};
                break;
            }
        }
    }
    return point;
}

Verification verify(SetpointSchedule& schedule, const RedispatchProblem& pb) {
    Verification v;
    v.performed = true;
    const double base = pb.network.s_base_mva;
    const double k = std::tan(std::acos(pb.config.min_power_factor));
    v.max_pf_excess_pu = -std::numeric_limits<double>::infinity();
    for (const auto& sp : schedule.setpoints) {
        v.max_pf_excess_pu = std::max(v.max_pf_excess_pu, (std::abs(sp.q_new_mvar) - k * std::abs(sp.p_new_mw)) / base);
    }

    std::vector<std::string> problems;
    try {
        const OperatingPoint point = apply_schedule(pb.network, pb.point, schedule);
        const PowerFlowSolution sol = solve_power_flow(pb.network, pb.admittance, point, pb.config.power_flow);
        const ViolationReport report = assess(sol, pb.config.limits, pb.mode.element);
        v.violations = static_cast<int>(report.violations.size());
        v.slack_deviation_pu = std::abs(sol.p_ext_mw / base - pb.p_ext_fixed_pu);
        if (v.violations > 0) problems.push_back(summarize(report));
        if (v.slack_deviation_pu > pb.config.verify_slack_tol_pu) {
            problems.push_back(fmt::format("slack import deviates by {:.3e} p.u.", v.slack_deviation_pu));
        }
    } catch (const PowerFlowError& e) {
        v.violations = -1;
        problems.push_back(fmt::format("verification power flow failed: {}", e.what()));
    }
    if (v.max_pf_excess_pu > 1e-6) {
        problems.push_back(fmt::format("power-factor envelope exceeded by {:.3e} p.u.", v.max_pf_excess_pu));
    }
    for (std::size_t u = 0; u < schedule.setpoints.size(); ++u) {
        const double bound = pb.config.p_bound_fraction * pb.units[u].p_hist_max_pu * base;
        if (std::abs(schedule.setpoints[u].p_new_mw) > bound + 1e-9) {
            problems.push_back(fmt::format("generator {} outside its active-power bound", schedule.setpoints[u].id));
        }
    }

    for (std::size_t i = 0; i < problems.size(); ++i) {
        if (i > 0) v.diagnostics += "; ";
        v.diagnostics += problems[i];
    }
    if (!problems.empty() && schedule.status == ScheduleStatus::optimal) {
        schedule.status = ScheduleStatus::solver_failure;
        schedule.message = "verification failed: " + v.diagnostics;
    }
    schedule.verification = v;
    return v;
}

SetpointSchedule solve_and_verify(const RedispatchProblem& problem) {
    SetpointSchedule sch = solve(problem);
    if (sch.status == ScheduleStatus::optimal) verify(sch, problem);
    return sch;
}

nlohmann::json to_json(const SetpointSchedule& s) {
    nlohmann::json doc;
    doc["timestamp"] = format_timestamp(s.timestamp);
    doc["mode"] = s.mode.to_string();
    doc["status"] = to_string(s.status);
    doc["objective"] = s.objective;
    doc["p_ext_mw"] = s.p_ext_mw;
    doc["q_ext_mvar"] = s.q_ext_mvar;
    doc["iterations"] = s.iterations;
    doc["restoration_used"] = s.restoration_used;
    doc["max_equality_residual_pu"] = s.max_equality_residual_pu;
    doc["setpoints"] = nlohmann::json::array();
    for (const auto& sp : s.setpoints) {
        doc["setpoints"].push_back({{"generator", sp.id},
                                    {"p_base_mw", sp.p_base_mw},
                                    {"q_base_mvar", sp.q_base_mvar},
                                    {"p_new_mw", sp.p_new_mw},
                                    {"q_new_mvar", sp.q_new_mvar},
                                    {"delta_p_mw", sp.delta_p_mw()},
                                    {"delta_q_mvar", sp.delta_q_mvar()}});
    }
    if (s.verification.performed) {
        doc["verification"] = {{"violations", s.verification.violations},
                               {"slack_deviation_pu", s.verification.slack_deviation_pu},
                               {"max_pf_excess_pu", s.verification.max_pf_excess_pu},
                               {"diagnostics", s.verification.diagnostics}};
    }
    if (!s.message.empty()) doc["message"] = s.message;
    return doc;
}

}  // namespace gridtwin
