#pragma once

#include <string>

#include <Eigen/Dense>

namespace gridtwin::nlp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Smooth problem  min f(x)  s.t.  c(x) = 0,  d(x) >= 0.
class Problem {
public:
    virtual ~Problem() = default;

    virtual int num_variables() const = 0;
    virtual int num_equalities() const = 0;
    virtual int num_inequalities() const = 0;

    virtual double objective(const Vector& x) const = 0;
    virtual Vector gradient(const Vector& x) const = 0;
    virtual Vector equalities(const Vector& x) const = 0;
    virtual Matrix equality_jacobian(const Vector& x) const = 0;
    virtual Vector inequalities(const Vector& x) const = 0;
    virtual Matrix inequality_jacobian(const Vector& x) const = 0;

    /// Hessian of  sigma*f(x) - y'c(x) - z'd(x).
    virtual Matrix lagrangian_hessian(const Vector& x, double sigma, const Vector& y, const Vector& z) const = 0;
};

struct Options {
    double tol = 1e-8;              // scaled KKT error
    double constr_viol_tol = 1e-9;  // unscaled, on c and on the negative part of d
    int max_iter = 200;
    double mu_init = 1e-1;
    double bound_push = 1e-2;
    bool feasibility_restoration = true;
    double restoration_tol = 1e-7;  // phase-1 residual that still counts as feasible
    int stall_window = 25;
};

enum class Status { optimal, infeasible, iteration_limit, numerical_failure };

std::string_view to_string(Status status);

struct Result {
    Status status = Status::numerical_failure;
    Vector x;
    Vector y;  // equality multipliers
    Vector z;  // inequality multipliers (>= 0)
    Vector s;  // inequality slacks
    double objective = 0.0;
    int iterations = 0;
    bool restoration_used = false;
    double primal_infeasibility = 0.0;  // max |c|, max(-d, 0)
    double dual_infeasibility = 0.0;    // scaled stationarity residual
    double complementarity = 0.0;
    std::string message;
};

/// max(|c(x)|_inf, |min(d(x), 0)|_inf)
double infeasibility(const Problem& problem, const Vector& x);

/// Primal-dual interior-point method. If the barrier iteration fails while
/// the iterate is still infeasible, a phase-1 problem minimising the l1
/// constraint violation is solved; the problem is declared infeasible only
/// when that phase cannot reach a feasible point.
Result minimize(const Problem& problem, const Vector& x0, const Options& options = {});

}  // namespace gridtwin::nlp
