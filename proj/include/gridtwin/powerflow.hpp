#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gridtwin/admittance.hpp"
#include "gridtwin/network.hpp"
#include "gridtwin/time.hpp"

namespace gridtwin {

struct PQ {
    double p_mw = 0.0;
    double q_mvar = 0.0;
};

/// One power-flow case. `loads[k]` and `generators[k]` are index-aligned with
/// `Network::loads` / `Network::generators`. Load values are consumption,
/// generator values are injection.
struct OperatingPoint {
    Timestamp timestamp{};
    std::vector<PQ> loads;
    std::vector<PQ> generators;
};

/// Throws DataError unless the point has a finite entry for every element.
void check_operating_point(const Network& network, const OperatingPoint& point);

struct SolverOptions {
    double tol_pu = 1e-8;
    int max_iter = 30;
};

struct BusResult {
    ElementId id = 0;
    double vm_pu = 0.0;
    double va_rad = 0.0;
};

struct BranchResult {
    BranchRef ref;
    double i_ka = 0.0;  // series current magnitude
    double p_from_mw = 0.0;
    double q_from_mvar = 0.0;
    double p_to_mw = 0.0;
    double q_to_mvar = 0.0;
    double s_from_mva = 0.0;
    double s_to_mva = 0.0;
    double loading_percent = 0.0;
};

struct PowerFlowSolution {
    Timestamp timestamp{};
    std::vector<BusResult> buses;  // energised buses, admittance order
    std::vector<BranchResult> branches;
    double p_ext_mw = 0.0;
    double q_ext_mvar = 0.0;
    int iterations = 0;
    double max_mismatch_pu = 0.0;
    std::vector<double> mismatch_history;  // max-norm before each Newton step

    Eigen::VectorXd vm() const;
    Eigen::VectorXd va() const;
};

/// Net specified injection (generation minus load) per admittance index, p.u.
Eigen::VectorXcd specified_injections(const Network& network, const AdmittanceMatrix& y,
                                      const OperatingPoint& point);

/// S_specified - S_calculated at every bus for the given voltage state, p.u.
Eigen::VectorXcd power_mismatch(const AdmittanceMatrix& y, const Eigen::VectorXd& vm, const Eigen::VectorXd& va,
                                const Eigen::VectorXcd& specified);

/// Full polar Newton-Raphson with every non-slack bus treated as PQ.
/// Throws DivergedError or SingularJacobianError.
PowerFlowSolution solve_power_flow(const Network& network, const OperatingPoint& point,
                                   const SolverOptions& options = {});

/// Same, reusing a prebuilt admittance matrix of `network`.
PowerFlowSolution solve_power_flow(const Network& network, const AdmittanceMatrix& y,
                                   const OperatingPoint& point, const SolverOptions& options = {});

/// Branch flows and loading for a converged state. Line loading is the series
/// current against max_i_ka; transformer loading is the larger terminal
/// apparent power against sn_mva.
std::vector<BranchResult> compute_branch_results(const Network& network, const AdmittanceMatrix& y,
                                                 const Eigen::VectorXd& vm, const Eigen::VectorXd& va);

}  // namespace gridtwin
