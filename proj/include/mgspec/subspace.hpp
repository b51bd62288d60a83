#pragma once

#include <optional>

#include "mgspec/matching_conditions.hpp"
#include "mgspec/metric_graph.hpp"

namespace mgspec {

/// A linear subspace of C^ambient_dim held as an orthonormal basis
/// (columns of basis()). The zero subspace has an ambient x 0 basis.
class Subspace {
public:
    Subspace(int ambient_dim, Matrix basis);
    static Subspace zero(int ambient_dim) { return Subspace(ambient_dim, Matrix(ambient_dim, 0)); }

    int ambient_dim() const { return ambient_; }
    int dim() const { return static_cast<int>(basis_.cols()); }
    const Matrix& basis() const { return basis_; }

    /// Relative distance of v from the subspace: ||v - B B* v|| / ||v||.
    double distance(const Vector& v) const;
    bool contains(const Vector& v, double tol = 1e-10) const { return distance(v) <= tol; }

private:
    int ambient_ = 0;
    Matrix basis_;
};

/// Inertia of a Hermitian form restricted to a subspace.
struct FormInertia {
    int n_minus = 0;
    int n_zero = 0;
    int n_plus = 0;
    RealVector eigenvalues;          ///< sorted ascending, units 1/length
    double zero_tolerance_used = 0;  ///< |mu| below this counts as zero
};

/// Orthonormalize the columns of m (thin QR); assumes full column rank.
Matrix orthonormal_columns(const Matrix& m);

/// Subspace of boundary vectors with equal values at the two endpoints of
/// each edge; basis vector for edge e is (1,1)/sqrt(2) on its slot pair.
Subspace build_D0(int num_edges);
Subspace build_D0(const MetricGraph& graph);

/// Same with the antisymmetric sign pattern (1,-1)/sqrt(2); the orthogonal
/// complement of D0 within the boundary space.
Subspace build_N0(int num_edges);
Subspace build_N0(const MetricGraph& graph);

/// Orthonormal basis of the zero eigenspace of a projector.
/// Throws NotAProjector when the input fails the projector axioms.
Subspace kernel(const Matrix& projector, const Tolerances& tol = {});

/// Intersection via principal angles: singular values of A* B; directions of
/// b with cos(theta) > 1 - tol.angle span the intersection.
Subspace intersect(const Subspace& a, const Subspace& b, const Tolerances& tol = {});

/// Default zero tolerance for form inertia: 1e-8 * (1 + ||Lambda||).
double default_inertia_zero_tol(const MatchingConditions& conditions);

/// Inertia of q[G,F] = <G, P_R Lambda P_R F> restricted to the subspace:
/// eigenvalues of B* (P_R Lambda P_R) B with the given zero band.
FormInertia restricted_form_inertia(const MatchingConditions& conditions, const Subspace& subspace,
                                    std::optional<double> zero_tol = std::nullopt);

/// The 2|E|-dimensional subspace of E + E' cut out by the matching
/// conditions, spanned by {(a, Lambda P_R a) : a in Ker P_D} and
/// {(0, b) : b in Ran P_D}.
Subspace build_lagrangian(const MatchingConditions& conditions, const Tolerances& tol = {});

/// dim Proj_E( L  intersect (D0 + N0) ): rank of the stacked E-block of the
/// intersection basis. Zero iff the Non-Resonance Condition holds.
int nrc_dimension(const MatchingConditions& conditions, const Tolerances& tol = {});

/// Result of the two independent non-resonance computations.
struct NrcReport {
    int nrc_dim = 0;
    int form_nullity = 0;
    int m0 = 0;
    bool match = false;
    double angle_margin = 0.0;    ///< gap between accepted/rejected principal cosines and the threshold
    double inertia_margin = 0.0;  ///< min |mu| / zero_tol distance from the zero band edge
};

/// Cross-validate Proposition-style equivalence: nrc_dimension against the
/// nullity of the restricted form, computed by independent code paths.
/// Throws EquivalenceViolation when they disagree.
NrcReport check_nrc_equivalence(const MatchingConditions& conditions, const Tolerances& tol = {});

}  // namespace mgspec
