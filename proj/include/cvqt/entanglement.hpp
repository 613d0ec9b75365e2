#pragma once

#include <optional>

#include "cvqt/symplectic.hpp"

namespace cvqt {

/// Minimum symplectic eigenvalue of the partially transposed CM, via the
/// closed two-mode form with det C sign-flipped.
double pt_min_symplectic_eigenvalue(const CovarianceMatrix& cm);

/// max(0, -ln(2 nu_tilde_minus)); natural logarithm.
double log_negativity(const CovarianceMatrix& cm);

/// Witnessing parameter for the EPR-like variance test, when one exists.
struct DuanWitness {
    double q;
    double lhs;  // Var L(q) + Var M(q)
    double rhs;  // q^2 + q^-2
};

std::optional<DuanWitness> duan_test(const CovarianceMatrix& cm);

/// Common variance of x_A - x_B and p_A + p_B when the two agree;
/// values below 1 indicate an EPR channel.
std::optional<double> epr_aleph(const CovarianceMatrix& cm);

struct EntanglementReport {
    double nu_tilde_minus;
    double log_negativity;
    bool ppt_separable;
    std::optional<DuanWitness> duan_witness;
    std::optional<double> aleph;
};

EntanglementReport entanglement_report(const CovarianceMatrix& cm);

}  // namespace cvqt
