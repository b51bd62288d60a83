#pragma once

#include <string>
#include <vector>

#include "mgspec/matching_conditions.hpp"
#include "mgspec/metric_graph.hpp"
#include "mgspec/secular.hpp"
#include "mgspec/subspace.hpp"

namespace mgspec {

/// Linear-algebra prediction of the eigenvalue asymptotics of the family:
/// m0 slow branches split by the inertia of the coupling form on F0, the
/// rest fast with leading coefficients from the unperturbed operator.
struct Prediction {
    int m0 = 0;
    int n_minus = 0, n_zero = 0, n_plus = 0;
    /// Slopes of the slow branches: eigenvalues of the coupling form on F0
    /// in the L2 geometry of the edgewise-constant kernel, ascending.
    RealVector slow_slopes;
    /// Leading 1/eps^2 coefficients: lowest positive eigenvalues of the
    /// unperturbed operator on the base graph, ascending with multiplicity.
    RealVector fast_coefficients;
};

/// Same projectors, Lambda scaled by epsilon (the rescaled family on the
/// base graph). epsilon = 0 degenerates to the unperturbed conditions.
MatchingConditions rescaled_conditions(const MatchingConditions& conditions, double epsilon);

/// P_D kept, P_N = I - P_D, P_R = 0: the unperturbed operator.
MatchingConditions unperturbed_conditions(const MatchingConditions& conditions);

/// Predict the asymptotics. Checks that the solver-side kernel dimension of
/// the unperturbed operator equals m0 (throws KernelMismatch otherwise).
Prediction predict(const MetricGraph& base_graph, const MatchingConditions& conditions,
                   int num_fast, const Tolerances& tol = {});

enum class BranchClass { Fast, SlowNegative, Exotic, SlowPositive, Unclassified };

const char* branch_class_name(BranchClass c);

struct BranchSample {
    double epsilon = 0.0;
    double lambda = 0.0;
};

struct Branch {
    int id = 0;
    std::vector<BranchSample> samples;  ///< epsilon descending
    BranchClass cls = BranchClass::Unclassified;
    double alpha = 0.0;        ///< fitted exponent of |lambda| ~ c eps^-alpha
    double coefficient = 0.0;  ///< fitted c
    double limit = 0.0;        ///< last sample, reported for exotic branches
    bool fitted = false;
};

struct BranchTable {
    std::vector<double> epsilons;  ///< descending
    std::vector<Branch> branches;
    std::vector<std::string> warnings;
};

struct SweepOptions {
    std::vector<double> epsilons;  ///< descending; empty = geometric 1..1e-3, 13 points
    int num_fast = 6;
    SolverOptions solver;
};

std::vector<double> default_epsilon_grid();

/// Solve the family directly (scaled edge lengths, fixed conditions) across
/// the epsilon grid and connect the lowest m0 + num_fast eigenvalues into
/// branches. Matching uses the rescaled coordinate sgn(lambda) log(1+eps^2
/// |lambda|), in which all four branch types move slowly, with an optimal
/// order-preserving one-to-one alignment; ambiguous continuations are
/// recorded in warnings rather than guessed.
BranchTable sweep(const MetricGraph& base_graph, const MatchingConditions& conditions,
                  const SweepOptions& opts = {});

/// Classify each branch: bounded tail -> exotic; otherwise a power-law fit of
/// log|lambda| against log(eps) over the last half of the samples, with
/// alpha in [1.7, 2.3] -> fast and [0.7, 1.3] -> slow of the tail's sign.
/// Anything else stays Unclassified.
BranchTable fit_branches(BranchTable table);

struct VerifyItem {
    std::string check;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    bool pass = false;
    int observed_fast = 0, observed_slow_negative = 0, observed_exotic = 0,
        observed_slow_positive = 0, observed_unclassified = 0;
    std::vector<VerifyItem> items;
};

/// Compare the sweep observation with the prediction: class counts, slow
/// coefficients against slopes (15%), exotic limits non-positive within
/// 1e-6, fast coefficients against the unperturbed eigenvalues (10%).
VerifyReport verify(const Prediction& prediction, const BranchTable& fitted);

}  // namespace mgspec
