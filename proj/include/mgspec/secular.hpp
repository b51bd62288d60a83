#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mgspec/edge_basis.hpp"
#include "mgspec/matching_conditions.hpp"
#include "mgspec/metric_graph.hpp"

namespace mgspec {

/// Coefficient-to-trace maps at a fixed spectral parameter. Columns are the
/// per-edge coefficients (a_e, b_e) of f|_e = a_e C + b_e S; rows are boundary
/// slots. dirichlet maps coefficients to F, neumann to F' with the inward
/// sign convention (the derivative at e+ is negated). Columns of edge e carry
/// a factor exp(-log_scales[e]) from the hyperbolic overflow guard.
struct TraceMatrices {
    Matrix dirichlet;
    Matrix neumann;
    std::vector<double> log_scales;
    double max_log_scale = 0.0;
};

TraceMatrices trace_matrices(const MetricGraph& graph, double lambda);

/// Square 2|E| x 2|E| matrix whose nullity at lambda is the geometric
/// multiplicity of lambda as an eigenvalue: rows impose P_D F = 0, P_N F' = 0
/// and P_R F' = Lambda P_R F on the coefficient ansatz, each block expressed
/// in an orthonormal basis of the corresponding projector range. Column
/// scaling from the overflow guard is reported in max_log_scale.
struct SecularEval {
    Matrix matrix;
    double max_log_scale = 0.0;
};

SecularEval secular_matrix(const MetricGraph& graph, const MatchingConditions& conditions,
                           double lambda);

/// Geometric multiplicity of lambda (0 when it is not an eigenvalue), decided
/// by singular values below rel_tol * sigma_max.
int nullity_at(const MetricGraph& graph, const MatchingConditions& conditions, double lambda,
               double rel_tol = 1e-8);

struct SolverOptions {
    double scan_step = 0.0;        ///< lambda step for the coarse positive grid; 0 = Weyl gap / 20
    double detect_rel = 1e-7;      ///< acceptance threshold relative to the median grid sigma_min
    double refine_rel = 1e-10;     ///< golden-section bracket, relative to |lambda|
    double refine_abs = 1e-10;     ///< and absolute floor
    int max_refine_iters = 200;
    int max_grid_points = 200000;
    bool with_eigenfunctions = false;
};

struct Eigenfunction {
    double lambda = 0.0;
    /// Per-edge coefficients (a_e, b_e) in the (C, S) basis, L2-normalized,
    /// phase fixed so the largest coefficient is real positive.
    std::vector<std::pair<Complex, Complex>> coefficients;
    double condition_residual = 0.0;  ///< max defect of the matching conditions on the traces

    Complex evaluate(int edge, double x) const;
};

struct EigenvalueLine {
    double lambda = 0.0;
    int multiplicity = 1;
    double residual = 0.0;  ///< sigma_min of the secular matrix at the refined point
    std::vector<Eigenfunction> eigenfunctions;  ///< filled when requested
};

struct SpectrumResult {
    std::vector<EigenvalueLine> eigenvalues;  ///< strictly increasing lambda
    double lo = 0.0, hi = 0.0;
    double scan_resolution = 0.0;
    std::vector<std::string> warnings;

    int count_with_multiplicity() const;
    std::vector<double> expanded() const;  ///< eigenvalues repeated by multiplicity
};

SpectrumResult find_eigenvalues(const MetricGraph& graph, const MatchingConditions& conditions,
                                double lo, double hi, const SolverOptions& opts = {});

/// Eigenfunction from the nullspace of the secular matrix at an eigenvalue.
/// Throws NotAnEigenvalue when the matrix is not singular there.
Eigenfunction eigenfunction_at(const MetricGraph& graph, const MatchingConditions& conditions,
                               double lambda);

/// Defects of the three matching-condition blocks on an eigenfunction's traces.
double condition_residual(const MetricGraph& graph, const MatchingConditions& conditions,
                          const Eigenfunction& ef);

/// Completeness guard against the Weyl count (total length) sqrt(lambda) / pi:
/// flags when the cumulative deviation exceeds 2|E| + 2 anywhere, or when the
/// count jump across a gap between consecutive positive eigenvalues exceeds
/// the arriving multiplicity by more than 0.75 (a missed level).
struct WeylDiagnostic {
    bool flagged = false;
    double max_deviation = 0.0;
    double deviation_threshold = 0.0;
    double max_gap_excess = 0.0;
    std::vector<std::string> notes;
};

WeylDiagnostic weyl_sanity(const MetricGraph& graph, const SpectrumResult& result);

/// Default window for a standalone spectrum computation: negative extent
/// kappa up to 4 (1 + ||Lambda|| max_length), positive extent covering
/// n_levels Weyl levels.
std::pair<double, double> default_window(const MetricGraph& graph,
                                         const MatchingConditions& conditions, int n_levels);

}  // namespace mgspec
