#include "cvqt/json_io.hpp"

#include <cmath>
#include <fstream>

namespace cvqt {

json to_json(const GaussianState& state) {
    const std::size_t dim = state.cm.dim();
    json cm_rows = json::array();
    for (std::size_t i = 0; i < dim; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < dim; ++j) row.push_back(state.cm(i, j));
        cm_rows.push_back(std::move(row));
    }
    return json{{"n_modes", state.n_modes()},
                {"displacement", state.displacement},
                {"cm", std::move(cm_rows)}};
}

GaussianState state_from_json(const json& j) {
    if (!j.contains("n_modes") || !j.contains("displacement") || !j.contains("cm"))
        throw Error(Errc::invalid_input, "state JSON needs n_modes, displacement and cm");
    const std::size_t n = j.at("n_modes").get<std::size_t>();
    const std::size_t dim = 2 * n;
    Vec d = j.at("displacement").get<Vec>();
    if (d.size() != dim)
        throw Error(Errc::dimension_mismatch, "displacement length must be 2 * n_modes");
    const json& rows = j.at("cm");
    if (rows.size() != dim)
        throw Error(Errc::wrong_shape, "cm row count must be 2 * n_modes");
    Mat v(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) {
        if (rows[i].size() != dim)
            throw Error(Errc::wrong_shape, "cm must be square");
        for (std::size_t jj = 0; jj < dim; ++jj) v(i, jj) = rows[i][jj].get<double>();
    }
    return GaussianState(std::move(d), CovarianceMatrix::validated(v));
}

json to_json(const EntanglementReport& report) {
    json j{{"nu_tilde_minus", report.nu_tilde_minus},
           {"log_negativity", report.log_negativity},
           {"ppt_separable", report.ppt_separable}};
    if (report.duan_witness) {
        j["duan_witness"] = json{{"q", report.duan_witness->q},
                                 {"lhs", report.duan_witness->lhs},
                                 {"rhs", report.duan_witness->rhs}};
    } else {
        j["duan_witness"] = nullptr;
    }
    if (report.aleph)
        j["aleph"] = *report.aleph;
    else
        j["aleph"] = nullptr;
    return j;
}

json to_json(const FidelityReport& report) {
    json gamma = json::array();
    for (std::size_t i = 0; i < 2; ++i)
        gamma.push_back(json::array({report.gamma.m(i, 0), report.gamma.m(i, 1)}));
    return json{{"fidelity", report.fidelity},
                {"gamma", std::move(gamma)},
                {"delta", json::array({report.delta[0], report.delta[1]})},
                {"method", report.method == FidelityMethod::closed_form ? "closed_form"
                                                                        : "oracle"}};
}

json to_json(const OptimizerResult& result) {
    json xi;
    if (std::isinf(result.xi_star))
        xi = "inf";
    else
        xi = result.xi_star;
    return json{{"xi_star", std::move(xi)},
                {"phi_star", result.phi_star},
                {"f_star", result.f_star},
                {"branch", result.branch == OptimizerBranch::interior ? "interior"
                                                                      : "boundary_homodyne"},
                {"diagnostics",
                 json{{"gamma_phi", result.gamma_at_star},
                      {"omega_phi", result.omega_at_star},
                      {"p_phi", result.p_at_star}}}};
}

GaussianState load_state(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::invalid_input, "cannot open state file: " + path);
    json j;
    in >> j;
    return state_from_json(j);
}

void save_state(const GaussianState& state, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(Errc::invalid_input, "cannot write state file: " + path);
    out << to_json(state).dump(2) << "\n";
}

}  // namespace cvqt
