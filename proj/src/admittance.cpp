#include "gridtwin/admittance.hpp"

#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "gridtwin/error.hpp"

namespace gridtwin {

std::optional<int> AdmittanceMatrix::index_of(ElementId bus) const {
    for (std::size_t i = 0; i < bus_ids_.size(); ++i) {
        if (bus_ids_[i] == bus) return static_cast<int>(i);
    }
    return std::nullopt;
}

BranchModel line_model(const Line& line, double vn_kv, double s_base_mva, double f_hz) {
    const double z_base = vn_kv * vn_kv / s_base_mva;
    const Complex z{line.r_ohm_per_km * line.length_km / z_base, line.x_ohm_per_km * line.length_km / z_base};
    if (std::abs(z) == 0.0) {
        throw DataError(fmt::format("zero series impedance on line {}", line.id));
    }
    BranchModel m;
    m.ref = {BranchKind::line, line.id};
    m.y_series = 1.0 / z;
    const double b_total_siemens = 2.0 * std::numbers::pi * f_hz * line.c_nf_per_km * 1e-9 * line.length_km;
    m.b_half = 0.5 * b_total_siemens * z_base;
    m.i_base_ka = s_base_mva / (std::numbers::sqrt3 * vn_kv);
    m.i_max_pu = line.max_i_ka / m.i_base_ka;
    return m;
}

BranchModel transformer_model(const Transformer& t, double s_base_mva) {
    const double z_mag = t.vk_percent / 100.0 * s_base_mva / t.sn_mva;
    const double r = t.vkr_percent / 100.0 * s_base_mva / t.sn_mva;
    const double x = std::sqrt(std::max(z_mag * z_mag - r * r, 0.0));
    if (z_mag == 0.0) {
        throw DataError(fmt::format("zero series impedance on transformer {}", t.id));
    }
    BranchModel m;
    m.ref = {BranchKind::transformer, t.id};
    m.y_series = 1.0 / Complex{r, x};
    m.sn_mva = t.sn_mva;
    m.i_base_ka = s_base_mva / (std::numbers::sqrt3 * t.vn_hv_kv);
    // Rated current at the HV side, expressed on the HV current base.
    m.i_max_pu = t.sn_mva / s_base_mva;
    return m;
}

AdmittanceMatrix build_admittance(const Network& net) {
    AdmittanceMatrix out;
    for (const auto& b : net.buses) {
        if (b.in_service) out.bus_ids_.push_back(b.id);
    }
    const int n = static_cast<int>(out.bus_ids_.size());
    out.y_ = Eigen::MatrixXcd::Zero(n, n);
    out.y_shunt_ = Eigen::VectorXcd::Zero(n);
    out.slack_ = out.index_of(net.slack_bus()).value_or(0);

    const auto energised = [&](ElementId a, ElementId b) { return out.index_of(a) && out.index_of(b); };

    const auto stamp = [&](BranchModel m) {
        const int i = m.from;
        const int j = m.to;
        const Complex ysh{0.0, m.b_half};
        out.y_(i, i) += m.y_series + ysh;
        out.y_(j, j) += m.y_series + ysh;
        out.y_(i, j) -= m.y_series;
        out.y_(j, i) -= m.y_series;
        out.y_shunt_(i) += ysh;
        out.y_shunt_(j) += ysh;
        out.branches_.push_back(m);
    };

    for (const auto& l : net.lines) {
        if (!l.in_service || !energised(l.from_bus, l.to_bus)) continue;
        BranchModel m = line_model(l, net.bus(l.from_bus).vn_kv, net.s_base_mva, net.f_hz);
        m.from = *out.index_of(l.from_bus);
        m.to = *out.index_of(l.to_bus);
        stamp(m);
    }
    for (const auto& t : net.transformers) {
        if (!t.in_service || !energised(t.hv_bus, t.lv_bus)) continue;
        BranchModel m = transformer_model(t, net.s_base_mva);
        m.from = *out.index_of(t.hv_bus);
        m.to = *out.index_of(t.lv_bus);
        stamp(m);
    }
    for (const auto& s : net.shunts) {
        if (!s.in_service) continue;
        const auto i = out.index_of(s.bus);
        if (!i) continue;
        // Consumption p + jq at 1 p.u. corresponds to y = (p - jq) / s_base.
        const Complex y{s.p_mw / net.s_base_mva, -s.q_mvar / net.s_base_mva};
        out.y_(*i, *i) += y;
        out.y_shunt_(*i) += y;
    }

    out.g_ = out.y_.real();
    out.b_ = out.y_.imag();
    return out;
}

}  // namespace gridtwin
