#pragma once

namespace cvqt {

/// Numerical tolerances used by validators and invariant checks.
struct Tolerances {
    double symmetry = 1e-12;    // relative, CM symmetry check
    double invariant = 1e-9;    // absolute, bona-fide and shape checks
    double symplectic = 1e-10;  // absolute, ||M J M^T - J||_inf
};

/// Process-wide defaults; the CLI may override fields at startup.
Tolerances& default_tolerances();

}  // namespace cvqt
