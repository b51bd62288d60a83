#include "mgspec/subspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "mgspec/errors.hpp"

namespace mgspec {

Subspace::Subspace(int ambient_dim, Matrix basis) : ambient_(ambient_dim), basis_(std::move(basis)) {
    if (basis_.rows() != ambient_)
        throw AmbientMismatch("basis rows do not match ambient dimension");
    if (basis_.cols() > basis_.rows())
        throw DimensionMismatch("subspace dimension exceeds ambient dimension");
    if (basis_.cols() > 0) {
        const double gram_defect =
            (basis_.adjoint() * basis_ - Matrix::Identity(basis_.cols(), basis_.cols())).norm();
        if (gram_defect > 1e-12 * std::max<double>(1, basis_.cols()))
            throw DimensionMismatch("subspace basis is not orthonormal");
    }
}

double Subspace::distance(const Vector& v) const {
    if (v.size() != ambient_) throw AmbientMismatch("vector does not live in the ambient space");
    const double nv = v.norm();
    if (nv == 0.0) return 0.0;
    if (dim() == 0) return 1.0;
    return (v - basis_ * (basis_.adjoint() * v)).norm() / nv;
}

Matrix orthonormal_columns(const Matrix& m) {
    if (m.cols() == 0) return m;
    Eigen::HouseholderQR<Matrix> qr(m);
    return Matrix(qr.householderQ() * Matrix::Identity(m.rows(), m.cols()));
}

namespace {

Subspace pair_pattern(int num_edges, const std::vector<std::pair<int, int>>& slot_pairs, double sign) {
    const int n = 2 * num_edges;
    Matrix b = Matrix::Zero(n, num_edges);
    const double c = 1.0 / std::sqrt(2.0);
    for (int e = 0; e < num_edges; ++e) {
        b(slot_pairs[e].first, e) = c;
        b(slot_pairs[e].second, e) = sign * c;
    }
    return Subspace(n, std::move(b));
}

std::vector<std::pair<int, int>> default_pairs(int num_edges) {
    std::vector<std::pair<int, int>> pairs(num_edges);
    for (int e = 0; e < num_edges; ++e) pairs[e] = {2 * e, 2 * e + 1};
    return pairs;
}

std::vector<std::pair<int, int>> graph_pairs(const MetricGraph& g) {
    std::vector<std::pair<int, int>> pairs(g.num_edges());
    for (int e = 0; e < g.num_edges(); ++e)
        pairs[e] = {g.edge(e).endpoint_minus_index, g.edge(e).endpoint_plus_index};
    return pairs;
}

}  // namespace

Subspace build_D0(int num_edges) {
    if (num_edges < 1) throw DimensionMismatch("need at least one edge");
    return pair_pattern(num_edges, default_pairs(num_edges), +1.0);
}

Subspace build_D0(const MetricGraph& graph) {
    return pair_pattern(graph.num_edges(), graph_pairs(graph), +1.0);
}

Subspace build_N0(int num_edges) {
    if (num_edges < 1) throw DimensionMismatch("need at least one edge");
    return pair_pattern(num_edges, default_pairs(num_edges), -1.0);
}

Subspace build_N0(const MetricGraph& graph) {
    return pair_pattern(graph.num_edges(), graph_pairs(graph), -1.0);
}

Subspace kernel(const Matrix& projector, const Tolerances& tol) {
    const Eigen::Index n = projector.rows();
    if (projector.cols() != n) throw NotAProjector("kernel() expects a square matrix");
    if ((projector - projector.adjoint()).norm() > tol.proj * std::max<double>(1, n))
        throw NotAProjector("matrix is not Hermitian");
    if ((projector * projector - projector).norm() > tol.proj * std::max<double>(1, n))
        throw NotAProjector("matrix is not idempotent");

    Eigen::SelfAdjointEigenSolver<Matrix> es(projector);
    const auto& evals = es.eigenvalues();
    int k = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (evals(i) < 0.5) ++k;
    Matrix b(n, k);
    int col = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (evals(i) < 0.5) b.col(col++) = es.eigenvectors().col(i);
    return Subspace(static_cast<int>(n), std::move(b));
}

Subspace intersect(const Subspace& a, const Subspace& b, const Tolerances& tol) {
    if (a.ambient_dim() != b.ambient_dim())
        throw AmbientMismatch("subspaces live in different ambient spaces");
    if (a.dim() == 0 || b.dim() == 0) return Subspace::zero(a.ambient_dim());

    const Matrix overlap = a.basis().adjoint() * b.basis();
    Eigen::JacobiSVD<Matrix> svd(overlap, Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    int k = 0;
    while (k < sigma.size() && sigma(k) > 1.0 - tol.angle) ++k;
    if (k == 0) return Subspace::zero(a.ambient_dim());
    Matrix basis = b.basis() * svd.matrixV().leftCols(k);
    return Subspace(a.ambient_dim(), orthonormal_columns(basis));
}

double default_inertia_zero_tol(const MatchingConditions& conditions) {
    return 1e-8 * (1.0 + conditions.lambda_norm());
}

FormInertia restricted_form_inertia(const MatchingConditions& conditions, const Subspace& subspace,
                                    std::optional<double> zero_tol) {
    if (subspace.ambient_dim() != conditions.dim())
        throw DimensionMismatch("subspace ambient dimension does not match the conditions");
    const double zt = zero_tol.value_or(default_inertia_zero_tol(conditions));

    FormInertia out;
    out.zero_tolerance_used = zt;
    const int d = subspace.dim();
    out.eigenvalues = RealVector(d);
    if (d == 0) return out;

    Matrix q = subspace.basis().adjoint() * conditions.lambda() * subspace.basis();
    q = Complex(0.5) * (q + q.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<Matrix> es(q, Eigen::EigenvaluesOnly);
    for (int i = 0; i < d; ++i) {
        const double mu = es.eigenvalues()(i);
        out.eigenvalues(i) = mu;
        if (mu < -zt)
            ++out.n_minus;
        else if (mu > zt)
            ++out.n_plus;
        else
            ++out.n_zero;
    }
    return out;
}

Subspace build_lagrangian(const MatchingConditions& conditions, const Tolerances& tol) {
    const int n = conditions.dim();
    const Subspace ker_d = kernel(conditions.p_d(), tol);
    const int k = ker_d.dim();
    const int d = n - k;  // rank P_D

    Matrix stacked = Matrix::Zero(2 * n, k + d);
    if (k > 0) {
        stacked.block(0, 0, n, k) = ker_d.basis();
        stacked.block(n, 0, n, k) = conditions.lambda() * ker_d.basis();
    }
    if (d > 0) {
        // Orthonormal basis of Ran P_D = orthogonal complement of Ker P_D,
        // obtained from the same eigendecomposition family.
        Eigen::SelfAdjointEigenSolver<Matrix> es(conditions.p_d());
        int col = k;
        for (Eigen::Index i = 0; i < n; ++i)
            if (es.eigenvalues()(i) >= 0.5) stacked.block(n, col++, n, 1) = es.eigenvectors().col(i);
    }
    return Subspace(2 * n, orthonormal_columns(stacked));
}

namespace {

/// Basis of D0 + N0 inside E + E' (ambient 4|E|): {(d_i, 0)} and {(0, n_j)}.
Subspace d0_plus_n0_doubled(int num_edges) {
    const int n = 2 * num_edges;
    const Subspace d0 = build_D0(num_edges);
    const Subspace n0 = build_N0(num_edges);
    Matrix b = Matrix::Zero(2 * n, 2 * num_edges);
    b.block(0, 0, n, num_edges) = d0.basis();
    b.block(n, num_edges, n, num_edges) = n0.basis();
    return Subspace(2 * n, std::move(b));
}

}  // namespace

int nrc_dimension(const MatchingConditions& conditions, const Tolerances& tol) {
    const int n = conditions.dim();
    const int num_edges = n / 2;
    const Subspace lagrangian = build_lagrangian(conditions, tol);
    const Subspace meet = intersect(lagrangian, d0_plus_n0_doubled(num_edges), tol);
    if (meet.dim() == 0) return 0;

    // Rank of the E-block. The intersection basis is orthonormal (unit
    // scale), so the threshold is applied against that scale directly.
    const Matrix e_block = meet.basis().topRows(n);
    Eigen::JacobiSVD<Matrix> svd(e_block);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol.rank) ++rank;
    return rank;
}

NrcReport check_nrc_equivalence(const MatchingConditions& conditions, const Tolerances& tol) {
    NrcReport report;
    report.nrc_dim = nrc_dimension(conditions, tol);

    const int num_edges = conditions.dim() / 2;
    const Subspace f0 = intersect(build_D0(num_edges), kernel(conditions.p_d(), tol), tol);
    report.m0 = f0.dim();
    const FormInertia inertia = restricted_form_inertia(conditions, f0);
    report.form_nullity = inertia.n_zero;

    // Margins: how decisively the thresholded quantities cleared their bands.
    const Subspace lagrangian = build_lagrangian(conditions, tol);
    const Matrix overlap =
        lagrangian.basis().adjoint() * d0_plus_n0_doubled(num_edges).basis();
    Eigen::JacobiSVD<Matrix> svd(overlap);
    double margin = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        margin = std::min(margin, std::abs(svd.singularValues()(i) - (1.0 - tol.angle)));
    report.angle_margin = margin;

    double imargin = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < inertia.eigenvalues.size(); ++i) {
        const double rel = std::abs(inertia.eigenvalues(i)) / inertia.zero_tolerance_used;
        imargin = std::min(imargin, std::abs(rel - 1.0));
    }
    report.inertia_margin = imargin;

    report.match = (report.nrc_dim == report.form_nullity);
    if (!report.match) throw EquivalenceViolation(report.nrc_dim, report.form_nullity);
    return report;
}

}  // namespace mgspec
