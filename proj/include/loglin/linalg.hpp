#pragma once

#include "loglin/types.hpp"

namespace loglin::linalg {

// Relative asymmetry threshold accepted on input matrices that are typed symmetric.
inline constexpr double kAsymmetryTol = 1e-10;

// Eigenvalues below kSqrtFloor * lambda_max are floored before rooting or inverting.
inline constexpr double kSqrtFloor = 1e-12;

/// (A + A^T)/2 after rejecting inputs whose asymmetry exceeds kAsymmetryTol relative.
MatX symmetrize(const MatX& a);

/// True if a is symmetric (to kAsymmetryTol) with all eigenvalues > 0.
bool is_spd(const MatX& a);

/// Throws invalid_parameter unless a is SPD. `name` labels the message.
void require_spd(const MatX& a, const char* name);

/// True if a is symmetric with all eigenvalues >= -tol * |lambda|_max.
bool is_psd(const MatX& a, double rel_tol = 1e-10);

double logdet_spd(const MatX& a);

/// Symmetric square root via eigendecomposition; eigenvalues floored at kSqrtFloor * lambda_max.
MatX sqrt_spd(const MatX& a);

/// Symmetric inverse square root, same flooring policy as sqrt_spd.
MatX invsqrt_spd(const MatX& a);

/// Inverse via Cholesky solve (never an explicit cofactor inverse).
MatX inverse_spd(const MatX& a);

/// Solves a x = b for SPD a via Cholesky.
MatX solve_spd(const MatX& a, const MatX& b);

struct SpdRepair {
    MatX value;
    bool repaired = false;
};

/// Floors eigenvalues of a symmetric matrix at floor_rel * tr(a)/dim.
/// Reports whether any eigenvalue actually moved.
SpdRepair repair_spd(const MatX& a, double floor_rel = 1e-9);

} // namespace loglin::linalg
