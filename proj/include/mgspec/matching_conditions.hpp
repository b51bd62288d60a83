#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mgspec/metric_graph.hpp"

namespace mgspec {

/// Measured axiom defects of a validated set of matching conditions.
struct ConditionDefects {
    double idempotency = 0.0;     ///< max over P of ||P^2 - P||
    double hermiticity = 0.0;     ///< max over P of ||P - P*||
    double completeness = 0.0;    ///< ||P_D + P_N + P_R - I||
    double mutual_orth = 0.0;     ///< max over i != j of ||P_i P_j||
    double lambda_margin = 0.0;   ///< smallest singular value of Lambda on Ran P_R, relative
    double lambda_discarded = 0.0;///< norm of the part of Lambda outside Ran P_R that was projected away
};

/// Self-adjoint matching conditions P_D F = 0, P_N F' = 0, P_R F' = Lambda P_R F,
/// parametrized by three mutually orthogonal projectors summing to the identity
/// and a Hermitian coupling Lambda stored pre-compressed as P_R Lambda P_R.
/// Instances are immutable; build them with validate_conditions() or presets.
class MatchingConditions {
public:
    const Matrix& p_d() const { return p_d_; }
    const Matrix& p_n() const { return p_n_; }
    const Matrix& p_r() const { return p_r_; }
    const Matrix& lambda() const { return lambda_; }

    int dim() const { return static_cast<int>(p_d_.rows()); }
    const ConditionDefects& defects() const { return defects_; }

    /// Spectral norm of the compressed coupling.
    double lambda_norm() const { return lambda_norm_; }

    /// rank P_D etc., decided during validation.
    int rank_d() const { return rank_d_; }
    int rank_n() const { return rank_n_; }
    int rank_r() const { return rank_r_; }

    /// Conditions with Lambda replaced by factor * Lambda (same projectors).
    MatchingConditions with_lambda_scaled(double factor) const;

    /// Conditions of the unperturbed operator: P_D kept, P_N = I - P_D,
    /// P_R = 0, Lambda = 0.
    MatchingConditions unperturbed() const;

    friend MatchingConditions validate_conditions(const Matrix&, const Matrix&, const Matrix&,
                                                  const Matrix&, const Tolerances&);

private:
    MatchingConditions() = default;

    Matrix p_d_, p_n_, p_r_, lambda_;
    ConditionDefects defects_;
    double lambda_norm_ = 0.0;
    int rank_d_ = 0, rank_n_ = 0, rank_r_ = 0;
};

/// Check the projector/Lambda axioms and return validated conditions with
/// Lambda compressed to P_R Lambda P_R. Throws ProjectorAxiomViolation,
/// LambdaNotInvertibleOnRange or DimensionMismatch.
MatchingConditions validate_conditions(const Matrix& p_d, const Matrix& p_n, const Matrix& p_r,
                                       const Matrix& lambda, const Tolerances& tol = {});

/// Per-vertex condition descriptors for preset assembly.
struct VertexCondition {
    enum class Type : std::uint8_t { Dirichlet, Neumann, Robin, Standard };
    Type type = Type::Neumann;
    double gamma = 0.0;  ///< Robin coefficient, 1/length
};

/// Assemble block projectors from per-vertex descriptors. vertex_of_slot maps
/// each boundary slot to the index of its vertex; conditions\[v\] describes
/// vertex v. Dirichlet/Neumann/Robin act slot-wise; a Standard vertex of
/// degree d contributes the (1/d) all-ones block to P_N and its complement
/// to P_D.
MatchingConditions preset_conditions(const std::vector<int>& vertex_of_slot,
                                     const std::vector<VertexCondition>& conditions,
                                     const Tolerances& tol = {});

/// A uniformly shrinking family: fixed base graph and conditions, scale epsilon.
struct ShrinkFamily {
    MetricGraph base_graph;
    MatchingConditions conditions;
    double epsilon = 1.0;
};

/// Graph of the family member: base lengths multiplied by epsilon.
MetricGraph scale(const ShrinkFamily& family);

/// Random valid matching conditions for property tests: a Haar-ish unitary is
/// split into three column groups of random sizes (the projectors), and
/// Lambda is assembled on Ran P_R with eigenvalues drawn away from zero.
/// Axioms hold by construction.
MatchingConditions random_conditions(int boundary_dim, std::uint64_t seed);

}  // namespace mgspec
