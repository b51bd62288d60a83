#pragma once

#include <utility>

namespace mgspec {

/// Values of the entire fundamental solutions C, S of -u'' = lambda u on one
/// edge, evaluated at both endpoints. C(lambda,0) = 1, C'(lambda,0) = 0,
/// S(lambda,0) = 0, S'(lambda,0) = 1; for lambda > 0 these are cos(kx) and
/// sin(kx)/k, for lambda < 0 the hyperbolic continuations, and S(0,x) = x.
/// Both are entire in lambda, which keeps the secular matrix smooth across
/// lambda = 0.
///
/// Derivative identities used throughout: C' = -lambda S and S' = C, so the
/// Wronskian C S' - C' S = C^2 + lambda S^2 = 1 identically.
///
/// For deep negative lambda the stored values carry a factor exp(-log_scale)
/// with log_scale = max(0, sqrt(-lambda)*length - 30), keeping every entry
/// below ~exp(30); log_scale is 0 otherwise, and the onset is continuous.
struct EdgeBasisEval {
    double lambda = 0.0;
    double length = 0.0;
    double log_scale = 0.0;

    double c0 = 1.0, cL = 1.0;              ///< scaled C at x = 0, x = length
    double s0 = 0.0, sL = 0.0;              ///< scaled S at x = 0, x = length
    double c_prime_0 = 0.0, c_prime_L = 0.0;
    double s_prime_0 = 1.0, s_prime_L = 1.0;

    /// |C S' - C' S - 1| at x = length, with the scale factor undone.
    /// Meaningful while exp(2*log_scale) is representable.
    double wronskian_defect() const;
};

EdgeBasisEval edge_basis(double lambda, double length);

/// (C, S) at an interior point, scaled by exp(-log_scale) consistently with
/// edge_basis(lambda, length) for the same edge.
std::pair<double, double> edge_basis_values_at(double lambda, double length, double x);

/// Unscaled (C, S) at a point; overflows only beyond sqrt(-lambda)*x ~ 700.
std::pair<double, double> edge_basis_values_unscaled(double lambda, double x);

}  // namespace mgspec
