#include "mgspec/matching_conditions.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/SVD>

#include "mgspec/errors.hpp"

namespace mgspec {

namespace {

double op_norm(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.jacobiSvd().singularValues()(0);
}

int projector_rank(const Matrix& p) {
    // Eigenvalues of a validated projector cluster at 0 and 1.
    Eigen::SelfAdjointEigenSolver<Matrix> es(p, Eigen::EigenvaluesOnly);
    return static_cast<int>((es.eigenvalues().array() > 0.5).count());
}

}  // namespace

ProjectorAxiomViolation::ProjectorAxiomViolation(std::string axiom, std::string matrix, double defect)
    : Error("projector axiom '" + axiom + "' violated by " + matrix +
            " (defect " + std::to_string(defect) + ")"),
      axiom_(std::move(axiom)),
      matrix_(std::move(matrix)),
      defect_(defect) {}

LambdaNotInvertibleOnRange::LambdaNotInvertibleOnRange(double margin)
    : Error("lambda is not invertible on Ran P_R (relative margin " + std::to_string(margin) + ")"),
      margin_(margin) {}

KernelMismatch::KernelMismatch(int solver_dim, int predicted_dim)
    : Error("solver kernel dimension " + std::to_string(solver_dim) +
            " != predicted m0 = " + std::to_string(predicted_dim)),
      solver_dim_(solver_dim),
      predicted_dim_(predicted_dim) {}

EquivalenceViolation::EquivalenceViolation(int nrc_dim, int form_nullity)
    : Error("non-resonance dimension " + std::to_string(nrc_dim) +
            " != form nullity " + std::to_string(form_nullity)),
      nrc_dim_(nrc_dim),
      form_nullity_(form_nullity) {}

MatchingConditions validate_conditions(const Matrix& p_d, const Matrix& p_n, const Matrix& p_r,
                                       const Matrix& lambda, const Tolerances& tol) {
    const Eigen::Index n = p_d.rows();
    const Matrix* mats[4] = {&p_d, &p_n, &p_r, &lambda};
    for (const Matrix* m : mats)
        if (m->rows() != n || m->cols() != n)
            throw DimensionMismatch("all condition matrices must be square of equal dimension");
    if (n == 0 || n % 2 != 0)
        throw DimensionMismatch("boundary dimension must be a positive even number");

    MatchingConditions out;
    const char* names[3] = {"P_D", "P_N", "P_R"};
    const Matrix* projs[3] = {&p_d, &p_n, &p_r};
    for (int i = 0; i < 3; ++i) {
        const Matrix& p = *projs[i];
        const double herm = op_norm(Matrix(p - p.adjoint()));
        out.defects_.hermiticity = std::max(out.defects_.hermiticity, herm);
        if (herm > tol.proj) throw ProjectorAxiomViolation("hermiticity", names[i], herm);
        const double idem = op_norm(Matrix(p * p - p));
        out.defects_.idempotency = std::max(out.defects_.idempotency, idem);
        if (idem > tol.proj) throw ProjectorAxiomViolation("idempotency", names[i], idem);
    }
    const double sum_defect = op_norm(Matrix(p_d + p_n + p_r - Matrix::Identity(n, n)));
    out.defects_.completeness = sum_defect;
    if (sum_defect > tol.proj)
        throw ProjectorAxiomViolation("completeness", "P_D + P_N + P_R", sum_defect);
    // Implied by the sum rule but measured independently.
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            const double cross = op_norm(Matrix(*projs[i] * *projs[j]));
            out.defects_.mutual_orth = std::max(out.defects_.mutual_orth, cross);
            if (cross > 10 * tol.proj)
                throw ProjectorAxiomViolation("mutual orthogonality",
                                              std::string(names[i]) + " " + names[j], cross);
        }

    const double lam_herm = op_norm(Matrix(lambda - lambda.adjoint()));
    if (lam_herm > tol.proj) throw ProjectorAxiomViolation("hermiticity", "Lambda", lam_herm);

    // Compress: the paper defines Lambda only on P_R E; anything outside is
    // projected away (warning via the recorded defect when sizable).
    Matrix compressed = p_r * lambda * p_r;
    compressed = Complex(0.5) * (compressed + compressed.adjoint().eval());
    out.defects_.lambda_discarded = op_norm(Matrix(lambda - compressed));

    out.rank_d_ = projector_rank(p_d);
    out.rank_n_ = projector_rank(p_n);
    out.rank_r_ = projector_rank(p_r);
    if (out.rank_d_ + out.rank_n_ + out.rank_r_ != static_cast<int>(n))
        throw ProjectorAxiomViolation("completeness", "rank P_D + rank P_N + rank P_R",
                                      std::abs(out.rank_d_ + out.rank_n_ + out.rank_r_ -
                                               static_cast<double>(n)));

    // Invertibility of Lambda restricted to Ran P_R.
    out.lambda_norm_ = op_norm(compressed);
    if (out.rank_r_ > 0) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(compressed, Eigen::EigenvaluesOnly);
        std::vector<double> mags;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
            mags.push_back(std::abs(es.eigenvalues()(i)));
        std::sort(mags.begin(), mags.end(), std::greater<>());
        // The compressed matrix has exactly rank_r meaningful eigenvalues; the
        // rest belong to Ker P_R and are ~0 by construction.
        const double smallest_on_range = mags[out.rank_r_ - 1];
        const double margin = out.lambda_norm_ > 0 ? smallest_on_range / out.lambda_norm_ : 0.0;
        out.defects_.lambda_margin = margin;
        if (smallest_on_range <= tol.rank * std::max(1.0, out.lambda_norm_))
            throw LambdaNotInvertibleOnRange(margin);
    } else if (out.lambda_norm_ > tol.proj) {
        throw ProjectorAxiomViolation("support", "Lambda (nonzero with P_R = 0)", out.lambda_norm_);
    }

    out.p_d_ = p_d;
    out.p_n_ = p_n;
    out.p_r_ = p_r;
    out.lambda_ = std::move(compressed);
    return out;
}

MatchingConditions MatchingConditions::with_lambda_scaled(double factor) const {
    MatchingConditions out = *this;
    out.lambda_ = lambda_ * factor;
    out.lambda_norm_ = lambda_norm_ * std::abs(factor);
    if (factor == 0.0) {
        // Degenerate member of the rescaled family; conditions become
        // P_D F = 0, P_R F' = 0 which is exactly the unperturbed operator.
        return unperturbed();
    }
    return out;
}

MatchingConditions MatchingConditions::unperturbed() const {
    const int n = dim();
    MatchingConditions out;
    out.p_d_ = p_d_;
    out.p_n_ = Matrix::Identity(n, n) - p_d_;
    out.p_r_ = Matrix::Zero(n, n);
    out.lambda_ = Matrix::Zero(n, n);
    out.lambda_norm_ = 0.0;
    out.rank_d_ = rank_d_;
    out.rank_n_ = n - rank_d_;
    out.rank_r_ = 0;
    out.defects_ = ConditionDefects{};
    return out;
}

MatchingConditions preset_conditions(const std::vector<int>& vertex_of_slot,
                                     const std::vector<VertexCondition>& conditions,
                                     const Tolerances& tol) {
    const int n = static_cast<int>(vertex_of_slot.size());
    if (n == 0 || n % 2 != 0) throw DimensionMismatch("slot count must be positive and even");
    const int num_vertices = static_cast<int>(conditions.size());
    std::vector<std::vector<int>> slots_of_vertex(num_vertices);
    for (int s = 0; s < n; ++s) {
        const int v = vertex_of_slot[s];
        if (v < 0 || v >= num_vertices)
            throw UnassignedSlot("boundary slot " + std::to_string(s) + " has no vertex descriptor");
        slots_of_vertex[v].push_back(s);
    }

    Matrix p_d = Matrix::Zero(n, n);
    Matrix p_n = Matrix::Zero(n, n);
    Matrix p_r = Matrix::Zero(n, n);
    Matrix lambda = Matrix::Zero(n, n);
    for (int v = 0; v < num_vertices; ++v) {
        const auto& slots = slots_of_vertex[v];
        const VertexCondition& vc = conditions[v];
        if (slots.empty()) continue;  // isolated descriptor; harmless
        switch (vc.type) {
            case VertexCondition::Type::Dirichlet:
                for (int s : slots) p_d(s, s) = 1.0;
                break;
            case VertexCondition::Type::Neumann:
                for (int s : slots) p_n(s, s) = 1.0;
                break;
            case VertexCondition::Type::Robin:
                for (int s : slots) {
                    p_r(s, s) = 1.0;
                    lambda(s, s) = vc.gamma;
                }
                break;
            case VertexCondition::Type::Standard: {
                const double d = static_cast<double>(slots.size());
                for (int a : slots)
                    for (int b : slots) {
                        p_n(a, b) += 1.0 / d;
                        p_d(a, b) += (a == b ? 1.0 : 0.0) - 1.0 / d;
                    }
                break;
            }
        }
    }
    return validate_conditions(p_d, p_n, p_r, lambda, tol);
}

MetricGraph scale(const ShrinkFamily& family) {
    if (!(family.epsilon > 0.0)) throw DimensionMismatch("epsilon must be positive");
    return family.base_graph.scaled(family.epsilon);
}

MatchingConditions random_conditions(int boundary_dim, std::uint64_t seed) {
    if (boundary_dim <= 0 || boundary_dim % 2 != 0)
        throw DimensionMismatch("boundary dimension must be positive and even");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    const int n = boundary_dim;
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(n, n);
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        const Complex d = r(j, j);
        if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
    }

    // Random split n = d_D + d_N + d_R (any of them may be zero).
    int cut1 = static_cast<int>(unif(rng) * (n + 1));
    int cut2 = static_cast<int>(unif(rng) * (n + 1));
    cut1 = std::min(cut1, n);
    cut2 = std::min(cut2, n);
    if (cut1 > cut2) std::swap(cut1, cut2);
    const int d_d = cut1, d_n = cut2 - cut1, d_r = n - cut2;

    Matrix p_d = Matrix::Zero(n, n), p_n = Matrix::Zero(n, n), p_r = Matrix::Zero(n, n);
    if (d_d > 0) p_d = q.leftCols(d_d) * q.leftCols(d_d).adjoint();
    if (d_n > 0) p_n = q.middleCols(d_d, d_n) * q.middleCols(d_d, d_n).adjoint();
    if (d_r > 0) p_r = q.rightCols(d_r) * q.rightCols(d_r).adjoint();
    p_d = Complex(0.5) * (p_d + p_d.adjoint().eval());
    p_n = Complex(0.5) * (p_n + p_n.adjoint().eval());
    p_r = Complex(0.5) * (p_r + p_r.adjoint().eval());

    Matrix lambda = Matrix::Zero(n, n);
    if (d_r > 0) {
        Matrix v = q.rightCols(d_r);
        RealVector t(d_r);
        for (int i = 0; i < d_r; ++i) {
            const double mag = 0.3 + 1.7 * unif(rng);  // away from zero: invertible by construction
            t(i) = (unif(rng) < 0.5 ? -mag : mag);
        }
        lambda = v * t.asDiagonal() * v.adjoint();
        lambda = Complex(0.5) * (lambda + lambda.adjoint().eval());
    }
    return validate_conditions(p_d, p_n, p_r, lambda);
}

}  // namespace mgspec
