#include "gridtwin/powerflow.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "gridtwin/error.hpp"

namespace gridtwin {

void check_operating_point(const Network& net, const OperatingPoint& point) {
    if (point.loads.size() != net.loads.size()) {
        throw DataError(fmt::format("operating point has {} load entries, network has {} loads", point.loads.size(),
                                    net.loads.size()));
    }
    if (point.generators.size() != net.generators.size()) {
        throw DataError(fmt::format("operating point has {} generator entries, network has {} generators",
                                    point.generators.size(), net.generators.size()));
    }
    for (std::size_t k = 0; k < point.loads.size(); ++k) {
        if (net.loads[k].in_service &&
            !(std::isfinite(point.loads[k].p_mw) && std::isfinite(point.loads[k].q_mvar))) {
            throw DataError(fmt::format("load {} has a non-finite set point", net.loads[k].id));
        }
    }
    for (std::size_t k = 0; k < point.generators.size(); ++k) {
        if (net.generators[k].in_service &&
            !(std::isfinite(point.generators[k].p_mw) && std::isfinite(point.generators[k].q_mvar))) {
            throw DataError(fmt::format("generator {} has a non-finite set point", net.generators[k].id));
        }
    }
}

Eigen::VectorXd PowerFlowSolution::vm() const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(buses.size()));
    for (std::size_t i = 0; i < buses.size(); ++i) out(static_cast<Eigen::Index>(i)) = buses[i].vm_pu;
    return out;
}

Eigen::VectorXd PowerFlowSolution::va() const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(buses.size()));
    for (std::size_t i = 0; i < buses.size(); ++i) out(static_cast<Eigen::Index>(i)) = buses[i].va_rad;
    return out;
}

Eigen::VectorXcd specified_injections(const Network& net, const AdmittanceMatrix& y, const OperatingPoint& point) {
    Eigen::VectorXcd s = Eigen::VectorXcd::Zero(y.size());
    const double base = net.s_base_mva;
    for (std::size_t k = 0; k < net.generators.size(); ++k) {
        const auto& g = net.generators[k];
        if (!g.in_service) continue;
        if (const auto i = y.index_of(g.bus)) {
            s(*i) += Complex{point.generators[k].p_mw, point.generators[k].q_mvar} / base;
        }
    }
    for (std::size_t k = 0; k < net.loads.size(); ++k) {
        const auto& l = net.loads[k];
        if (!l.in_service) continue;
        if (const auto i = y.index_of(l.bus)) {
            s(*i) -= Complex{point.loads[k].p_mw, point.loads[k].q_mvar} / base;
        }
    }
    return s;
}

namespace {

Eigen::VectorXcd phasors(const Eigen::VectorXd& vm, const Eigen::VectorXd& va) {
    Eigen::VectorXcd v(vm.size());
    for (Eigen::Index i = 0; i < vm.size(); ++i) v(i) = std::polar(vm(i), va(i));
    return v;
}

}  // namespace

Eigen::VectorXcd power_mismatch(const AdmittanceMatrix& y, const Eigen::VectorXd& vm, const Eigen::VectorXd& va,
                                const Eigen::VectorXcd& specified) {
    const Eigen::VectorXcd v = phasors(vm, va);
    const Eigen::VectorXcd current = y.matrix() * v;
    return specified - v.cwiseProduct(current.conjugate());
}

PowerFlowSolution solve_power_flow(const Network& net, const OperatingPoint& point, const SolverOptions& options) {
    return solve_power_flow(net, build_admittance(net), point, options);
}

PowerFlowSolution solve_power_flow(const Network& net, const AdmittanceMatrix& y, const OperatingPoint& point,
                                   const SolverOptions& options) {
    check_operating_point(net, point);
    const int n = y.size();
    const int slack = y.slack_index();
    const Eigen::VectorXcd s_spec = specified_injections(net, y, point);

    std::vector<int> pq;
    pq.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        if (i != slack) pq.push_back(i);
    }
    const int m = static_cast<int>(pq.size());

    Eigen::VectorXd vm = Eigen::VectorXd::Constant(n, net.ext_grid.vm_pu);
    Eigen::VectorXd va = Eigen::VectorXd::Zero(n);

    PowerFlowSolution sol;
    sol.timestamp = point.timestamp;

    Eigen::MatrixXd jac(2 * m, 2 * m);
    Eigen::VectorXd f(2 * m);
    const Eigen::MatrixXcd& ybus = y.matrix();

    for (int iter = 0;; ++iter) {
        const Eigen::VectorXcd v = phasors(vm, va);
        const Eigen::VectorXcd current = ybus * v;
        const Eigen::VectorXcd s_calc = v.cwiseProduct(current.conjugate());
        for (int k = 0; k < m; ++k) {
            const Complex d = s_spec(pq[k]) - s_calc(pq[k]);
            f(k) = d.real();
            f(m + k) = d.imag();
        }
        const double worst = m > 0 ? f.cwiseAbs().maxCoeff() : 0.0;
        sol.mismatch_history.push_back(worst);
        sol.iterations = iter;
        sol.max_mismatch_pu = worst;

        if (!std::isfinite(worst) || worst > 1e10) {
            throw DivergedError(fmt::format("power flow diverged at iteration {} (mismatch {:.3e} p.u.)", iter, worst),
                                iter, worst);
        }
        if (worst <= options.tol_pu) {
            const Complex s_ext = (s_calc(slack) - s_spec(slack)) * net.s_base_mva;
            sol.p_ext_mw = s_ext.real();
            sol.q_ext_mvar = s_ext.imag();
            break;
        }
        if (iter >= options.max_iter) {
            throw DivergedError(fmt::format("power flow did not converge in {} iterations (mismatch {:.3e} p.u.)",
                                            options.max_iter, worst),
                                iter, worst);
        }

        // dS/dVa = j diag(V) conj(diag(I) - Y diag(V))
        // dS/dVm = diag(V) conj(Y diag(V/|V|)) + conj(diag(I)) diag(V/|V|)
        for (int a = 0; a < m; ++a) {
            const int i = pq[a];
            for (int b = 0; b < m; ++b) {
                const int k = pq[b];
                const Complex unit = v(k) / vm(k);
                Complex ds_dva = -Complex{0.0, 1.0} * v(i) * std::conj(ybus(i, k) * v(k));
                Complex ds_dvm = v(i) * std::conj(ybus(i, k) * unit);
                if (i == k) {
                    ds_dva += Complex{0.0, 1.0} * v(i) * std::conj(current(i));
                    ds_dvm += std::conj(current(i)) * unit;
                }
                jac(a, b) = ds_dva.real();
                jac(a, m + b) = ds_dvm.real();
                jac(m + a, b) = ds_dva.imag();
                jac(m + a, m + b) = ds_dvm.imag();
            }
        }

        Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
        if (!(lu.rcond() > 1e-14)) {
            throw SingularJacobianError(
                fmt::format("singular Jacobian at iteration {} (rcond {:.3e})", iter, lu.rcond()));
        }
        const Eigen::VectorXd dx = lu.solve(f);
        for (int k = 0; k < m; ++k) {
            va(pq[k]) += dx(k);
            vm(pq[k]) += dx(m + k);
        }
    }

    sol.buses.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        sol.buses[static_cast<std::size_t>(i)] = {y.bus_ids()[static_cast<std::size_t>(i)], vm(i), va(i)};
    }
    sol.branches = compute_branch_results(net, y, vm, va);
    return sol;
}

std::vector<BranchResult> compute_branch_results(const Network& net, const AdmittanceMatrix& y,
                                                 const Eigen::VectorXd& vm, const Eigen::VectorXd& va) {
    const Eigen::VectorXcd v = phasors(vm, va);
    const double base = net.s_base_mva;
    std::vector<BranchResult> out;
    out.reserve(y.branches().size());
    for (const auto& br : y.branches()) {
        const Complex vi = v(br.from);
        const Complex vj = v(br.to);
        const Complex i_series = br.y_series * (vi - vj);
        const Complex i_from = i_series + Complex{0.0, br.b_half} * vi;
        const Complex i_to = -i_series + Complex{0.0, br.b_half} * vj;
        const Complex s_from = vi * std::conj(i_from) * base;
        const Complex s_to = vj * std::conj(i_to) * base;

        BranchResult r;
        r.ref = br.ref;
        r.i_ka = std::abs(i_series) * br.i_base_ka;
        r.p_from_mw = s_from.real();
        r.q_from_mvar = s_from.imag();
        r.p_to_mw = s_to.real();
        r.q_to_mvar = s_to.imag();
        r.s_from_mva = std::abs(s_from);
        r.s_to_mva = std::abs(s_to);
        if (br.ref.kind == BranchKind::line) {
            r.loading_percent = 100.0 * std::abs(i_series) / br.i_max_pu;
        } else {
            r.loading_percent = 100.0 * std::max(r.s_from_mva, r.s_to_mva) / br.sn_mva;
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace gridtwin
