#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gridtwin/network.hpp"

namespace gridtwin {

using Complex = std::complex<double>;

/// Per-unit model of one in-service branch, endpoints given as matrix indices.
struct BranchModel {
    BranchRef ref;
    int from = 0;
    int to = 0;
    Complex y_series;       // p.u.
    double b_half = 0.0;    // shunt susceptance at each end, p.u.
    double i_max_pu = 0.0;  // thermal current rating on the from-side base
    double i_base_ka = 0.0; // current base at the from side
    double sn_mva = 0.0;    // transformers only
};

/// Bus admittance matrix over the energised buses, in p.u. on s_base_mva.
/// Shunt elements and line charging live on the diagonal.
class AdmittanceMatrix {
public:
    AdmittanceMatrix() = default;

    const Eigen::MatrixXcd& matrix() const { return y_; }
    const Eigen::MatrixXd& conductance() const { return g_; }
    const Eigen::MatrixXd& susceptance() const { return b_; }
    const std::vector<BranchModel>& branches() const { return branches_; }
    const std::vector<ElementId>& bus_ids() const { return bus_ids_; }
    int size() const { return static_cast<int>(bus_ids_.size()); }
    int slack_index() const { return slack_; }
    std::optional<int> index_of(ElementId bus) const;

    /// Sum of shunt admittance (line charging + shunt elements) at each bus.
    const Eigen::VectorXcd& shunt_admittance() const { return y_shunt_; }

private:
    friend AdmittanceMatrix build_admittance(const Network& network);

    Eigen::MatrixXcd y_;
    Eigen::MatrixXd g_;
    Eigen::MatrixXd b_;
    Eigen::VectorXcd y_shunt_;
    std::vector<BranchModel> branches_;
    std::vector<ElementId> bus_ids_;
    int slack_ = 0;
};

/// Per-unit series admittance and charging of a line on the given base.
BranchModel line_model(const Line& line, double vn_kv, double s_base_mva, double f_hz);

/// Per-unit series admittance of a transformer (unit tap, no magnetising branch).
BranchModel transformer_model(const Transformer& trafo, double s_base_mva);

/// Throws DataError for a branch with zero series impedance.
AdmittanceMatrix build_admittance(const Network& network);

}  // namespace gridtwin
