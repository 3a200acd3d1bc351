#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "gridtwin/admittance.hpp"
#include "gridtwin/network.hpp"
#include "gridtwin/nlp.hpp"
#include "gridtwin/powerflow.hpp"
#include "gridtwin/rsae.hpp"

namespace gridtwin {

struct RedispatchWeights {
    double w_p = 10.0;
    double w_q = 1.0;
};

struct RedispatchConfig {
    RedispatchWeights weights;
    SecurityLimits limits;
    double p_bound_fraction = 0.85;      // |P_new| <= fraction * P_hist,max
    double min_power_factor = 0.95;      // |Q_new| <= tan(acos(pf)) * |P_new|
    double branch_current_fraction = 0.9;
    /// Limits are tightened by this much inside the optimiser so that the
    /// independent re-solve lands on the secure side of every boundary.
    double limit_margin_pu = 1e-6;
    double verify_slack_tol_pu = 1e-4;
    SolverOptions power_flow;
    nlp::Options optimizer;
};

enum class ActivationKind { corrective, preventive };

struct ActivationMode {
    ActivationKind kind = ActivationKind::corrective;
    std::optional<BranchRef> element;  // preventive only

    static ActivationMode corrective() { return {}; }
    static ActivationMode preventive(BranchRef ref) { return {ActivationKind::preventive, ref}; }
    std::string to_string() const;
};

/// One generator taking part in the redispatch.
struct DispatchUnit {
    std::size_t generator = 0;  // index into Network::generators
    ElementId id = 0;
    int bus = 0;                // admittance index
    double p_base_pu = 0.0;
    double q_base_pu = 0.0;
    double p_hist_max_pu = 0.0;
};

/// AC redispatch problem for one timestamp (and, for preventive activation,
/// one outage). All quantities are per unit on the network base.
struct RedispatchProblem {
    Network network;  // post-outage when preventive
    AdmittanceMatrix admittance;
    OperatingPoint point;  // base set points and (possibly scaled) loads
    ActivationMode mode;
    RedispatchConfig config;

    std::vector<DispatchUnit> units;
    Eigen::VectorXd p_load_pu;  // per admittance index
    Eigen::VectorXd q_load_pu;
    double p_ext_fixed_pu = 0.0;
    double vm_slack_pu = 1.0;

    Eigen::VectorXd warm_vm;
    Eigen::VectorXd warm_va;
    double warm_q_ext_pu = 0.0;
    bool warm_start_from_power_flow = false;

    int generator_variable_count() const { return 2 * static_cast<int>(units.size()); }
    int voltage_variable_count() const { return 2 * admittance.size(); }
};

/// Assembles the problem. `p_ext_base_mw` is the external-grid import that
/// the redispatch must hold. Units at islanded buses are excluded.
/// Throws ProblemError for missing historical maxima or an empty unit set.
RedispatchProblem build_problem(const Network& network, const OperatingPoint& point, ActivationMode mode,
                                double p_ext_base_mw, const RedispatchConfig& config = {});

enum class ScheduleStatus { optimal, infeasible, solver_failure };

std::string_view to_string(ScheduleStatus status);

struct GeneratorSetpoint {
    ElementId id = 0;
    double p_base_mw = 0.0;
    double q_base_mvar = 0.0;
    double p_new_mw = 0.0;
    double q_new_mvar = 0.0;

    double delta_p_mw() const { return p_new_mw - p_base_mw; }
    double delta_q_mvar() const { return q_new_mvar - q_base_mvar; }
};

struct Verification {
    bool performed = false;
    int violations = 0;
    double slack_deviation_pu = 0.0;
    double max_pf_excess_pu = 0.0;  // max over units of |Q| - tan(acos pf)|P|; <= 0 is compliant
    std::string diagnostics;
};

struct SetpointSchedule {
    Timestamp timestamp{};
    ActivationMode mode;
    ScheduleStatus status = ScheduleStatus::solver_failure;
    std::vector<GeneratorSetpoint> setpoints;
    double objective = 0.0;  // sum of w_P dP^2 + w_Q dQ^2 in p.u.
    double p_ext_mw = 0.0;
    double q_ext_mvar = 0.0;
    int iterations = 0;
    bool restoration_used = false;
    double max_equality_residual_pu = 0.0;
    double stationarity = 0.0;
    std::vector<ElementId> bus_ids;
    Eigen::VectorXd vm;
    Eigen::VectorXd va;
    Verification verification;
    std::string message;
};

/// Solves the problem with the interior-point method. A base point that
/// already satisfies every constraint is returned unchanged (objective 0).
SetpointSchedule solve(const RedispatchProblem& problem);

/// Re-solves the power flow with the new set points and re-assesses it.
/// A failed check downgrades an optimal schedule to solver_failure.
Verification verify(SetpointSchedule& schedule, const RedispatchProblem& problem);

/// solve() followed by verify() for optimal schedules.
SetpointSchedule solve_and_verify(const RedispatchProblem& problem);

/// Copy of `point` with the schedule's set points applied.
OperatingPoint apply_schedule(const Network& network, OperatingPoint point, const SetpointSchedule& schedule);

/// Recomputes sum of w_P dP^2 + w_Q dQ^2 (p.u.) from the reported set points.
double redispatch_cost(const SetpointSchedule& schedule, const RedispatchWeights& weights, double s_base_mva);

nlohmann::json to_json(const SetpointSchedule& schedule);

/// Exposes the optimisation model, e.g. for derivative checks.
std::unique_ptr<nlp::Problem> make_nlp(const RedispatchProblem& problem);
Eigen::VectorXd warm_start(const RedispatchProblem& problem);

}  // namespace gridtwin
