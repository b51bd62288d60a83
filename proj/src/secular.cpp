#include "mgspec/secular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "mgspec/errors.hpp"

namespace mgspec {

namespace {

constexpr double kPi = std::numbers::pi;

/// Orthonormal basis of the range of a validated projector.
Matrix range_basis(const Matrix& p) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(p);
    const Eigen::Index n = p.rows();
    int r = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (es.eigenvalues()(i) > 0.5) ++r;
    Matrix w(n, r);
    int col = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (es.eigenvalues()(i) > 0.5) w.col(col++) = es.eigenvectors().col(i);
    return w;
}

/// Range bases of the three projectors, computed once per solve.
struct ConditionFrames {
    Matrix w_d, w_n, w_r;
    Matrix lambda;

    explicit ConditionFrames(const MatchingConditions& c)
        : w_d(range_basis(c.p_d())),
          w_n(range_basis(c.p_n())),
          w_r(range_basis(c.p_r())),
          lambda(c.lambda()) {}
};

SecularEval assemble(const MetricGraph& graph, const ConditionFrames& f, double lambda) {
    const TraceMatrices t = trace_matrices(graph, lambda);
    const int n = graph.boundary_dim();
    SecularEval out;
    out.matrix.resize(n, n);
    out.max_log_scale = t.max_log_scale;
    Eigen::Index row = 0;
    if (f.w_d.cols() > 0) {
        out.matrix.middleRows(row, f.w_d.cols()) = f.w_d.adjoint() * t.dirichlet;
        row += f.w_d.cols();
    }
    if (f.w_n.cols() > 0) {
        out.matrix.middleRows(row, f.w_n.cols()) = f.w_n.adjoint() * t.neumann;
        row += f.w_n.cols();
    }
    if (f.w_r.cols() > 0) {
        out.matrix.middleRows(row, f.w_r.cols()) =
            f.w_r.adjoint() * (t.neumann - f.lambda * t.dirichlet);
        row += f.w_r.cols();
    }
    return out;
}

/// log(sigma_min) + max_log_scale: the column scaling of the overflow guard
/// suppresses singular values by at most exp(-max_log_scale), so comparisons
/// against detection thresholds happen on this adjusted value.
struct SigmaEval {
    double log_sigma_adj = 0.0;
    double sigma_raw = 0.0;
};

SigmaEval eval_sigma(const MetricGraph& graph, const ConditionFrames& f, double lambda) {
    const SecularEval se = assemble(graph, f, lambda);
    Eigen::JacobiSVD<Matrix> svd(se.matrix);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    return SigmaEval{std::log(smin) + se.max_log_scale, smin};
}

struct Candidate {
    double left, right;       // refinement bracket
    double neighbor_log_min;  // smaller adjusted log sigma of the flanking grid points
    double local_h;           // bracket scale for deduplication
};

struct RefinedRoot {
    double lambda;
    double log_sigma_adj;
    double sigma_raw;
    double local_h;
};

RefinedRoot golden_refine(const MetricGraph& graph, const ConditionFrames& f, double left,
                          double right, const SolverOptions& opts) {
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = left, b = right;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    SigmaEval fc = eval_sigma(graph, f, c);
    SigmaEval fd = eval_sigma(graph, f, d);
    double best_l = c;
    SigmaEval best = fc;
    if (fd.log_sigma_adj < best.log_sigma_adj) {
        best = fd;
        best_l = d;
    }
    for (int it = 0; it < opts.max_refine_iters; ++it) {
        const double mid = 0.5 * (a + b);
        if (b - a <= std::max(opts.refine_abs, opts.refine_rel * std::abs(mid))) break;
        if (fc.log_sigma_adj < fd.log_sigma_adj) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = eval_sigma(graph, f, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = eval_sigma(graph, f, d);
        }
        if (fc.log_sigma_adj < best.log_sigma_adj) {
            best = fc;
            best_l = c;
        }
        if (fd.log_sigma_adj < best.log_sigma_adj) {
            best = fd;
            best_l = d;
        }
    }
    return RefinedRoot{best_l, best.log_sigma_adj, best.sigma_raw, right - left};
}

std::vector<double> build_grid(const MetricGraph& graph, const MatchingConditions& conditions,
                               double lo, double hi, double h, const SolverOptions& opts) {
    const double total = graph.total_length();
    std::vector<double> grid;

    if (lo < 0.0) {
        // Uniform in kappa = sqrt(-lambda); the step resolves both the Weyl
        // k-density and the Robin scale set by ||Lambda||.
        const double kappa_max = std::sqrt(-lo);
        const double dk_robin = (1.0 + conditions.lambda_norm()) / 50.0;
        const double want =
            std::max(kappa_max / dk_robin, 20.0 * total * kappa_max / kPi);
        const int n = std::clamp(static_cast<int>(std::ceil(want)), 256, 6000);
        for (int i = n; i >= 1; --i) {
            const double kappa = kappa_max * i / n;
            grid.push_back(-kappa * kappa);
        }
    }

    const double start = std::max(lo, 0.0);
    if (hi > start) {
        grid.push_back(start);
        // Fine low-k grid: slow Robin-type roots sit far below the first Weyl
        // level; the coarse lambda grid takes over from k ~ pi/(2 total).
        if (conditions.rank_r() > 0) {
            const double k_lo = std::sqrt(start);
            const double k_join = std::min(std::sqrt(hi), kPi / (1.5 * total));
            if (k_join > k_lo) {
                const double dk = (1.0 + conditions.lambda_norm()) / 50.0;
                const int n = std::clamp(static_cast<int>(std::ceil((k_join - k_lo) / dk)), 64, 6000);
                for (int i = 1; i <= n; ++i) {
                    const double k = k_lo + (k_join - k_lo) * i / n;
                    grid.push_back(k * k);
                }
            }
        }
        const double span = hi - start;
        const double h_eff = std::min(h, span / 16.0);
        const int n_coarse =
            std::min(static_cast<int>(std::ceil(span / h_eff)), opts.max_grid_points);
        for (int i = 1; i <= n_coarse; ++i) grid.push_back(start + span * i / n_coarse);
    } else {
        grid.push_back(hi);
    }

    std::sort(grid.begin(), grid.end());
    const double scale = std::max({std::abs(lo), std::abs(hi), 1.0});
    std::vector<double> out;
    out.reserve(grid.size());
    for (double x : grid)
        if (out.empty() || x - out.back() > 1e-14 * scale) out.push_back(x);
    return out;
}

}  // namespace

TraceMatrices trace_matrices(const MetricGraph& graph, double lambda) {
    const int n = graph.boundary_dim();
    TraceMatrices t;
    t.dirichlet = Matrix::Zero(n, n);
    t.neumann = Matrix::Zero(n, n);
    t.log_scales.resize(graph.num_edges());
    for (int e = 0; e < graph.num_edges(); ++e) {
        const Edge& edge = graph.edge(e);
        const EdgeBasisEval ev = edge_basis(lambda, edge.length);
        t.log_scales[e] = ev.log_scale;
        t.max_log_scale = std::max(t.max_log_scale, ev.log_scale);
        const int m = edge.endpoint_minus_index;
        const int p = edge.endpoint_plus_index;
        const int ca = 2 * e, cb = 2 * e + 1;
        t.dirichlet(m, ca) = ev.c0;
        t.dirichlet(m, cb) = ev.s0;
        t.dirichlet(p, ca) = ev.cL;
        t.dirichlet(p, cb) = ev.sL;
        // Inward derivative at e+ flips the sign.
        t.neumann(m, ca) = ev.c_prime_0;
        t.neumann(m, cb) = ev.s_prime_0;
        t.neumann(p, ca) = -ev.c_prime_L;
        t.neumann(p, cb) = -ev.s_prime_L;
    }
    return t;
}

SecularEval secular_matrix(const MetricGraph& graph, const MatchingConditions& conditions,
                           double lambda) {
    const ConditionFrames frames(conditions);
    return assemble(graph, frames, lambda);
}

int nullity_at(const MetricGraph& graph, const MatchingConditions& conditions, double lambda,
               double rel_tol) {
    const SecularEval se = secular_matrix(graph, conditions, lambda);
    Eigen::JacobiSVD<Matrix> svd(se.matrix);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    int nullity = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= rel_tol * std::max(1.0, smax)) ++nullity;
    return nullity;
}

int SpectrumResult::count_with_multiplicity() const {
    int c = 0;
    for (const auto& line : eigenvalues) c += line.multiplicity;
    return c;
}

std::vector<double> SpectrumResult::expanded() const {
    std::vector<double> out;
    for (const auto& line : eigenvalues)
        for (int i = 0; i < line.multiplicity; ++i) out.push_back(line.lambda);
    return out;
}

SpectrumResult find_eigenvalues(const MetricGraph& graph, const MatchingConditions& conditions,
                                double lo, double hi, const SolverOptions& opts) {
    if (!(lo < hi)) throw Error("window must satisfy lo < hi");
    if (conditions.dim() != graph.boundary_dim())
        throw DimensionMismatch("conditions dimension does not match the graph");

    const ConditionFrames frames(conditions);
    const double total = graph.total_length();
    const double h = opts.scan_step > 0 ? opts.scan_step : (kPi / total) * (kPi / total) / 20.0;

    SpectrumResult result;
    result.lo = lo;
    result.hi = hi;
    result.scan_resolution = h;

    const std::vector<double> grid = build_grid(graph, conditions, lo, hi, h, opts);
    const int ng = static_cast<int>(grid.size());
    std::vector<double> logs(ng);
    for (int i = 0; i < ng; ++i) logs[i] = eval_sigma(graph, frames, grid[i]).log_sigma_adj;

    std::vector<double> sorted_logs;
    sorted_logs.reserve(ng);
    for (double v : logs)
        if (std::isfinite(v)) sorted_logs.push_back(v);
    if (sorted_logs.empty()) throw Error("secular matrix vanished on the entire grid");
    std::nth_element(sorted_logs.begin(), sorted_logs.begin() + sorted_logs.size() / 2,
                     sorted_logs.end());
    const double median_log = sorted_logs[sorted_logs.size() / 2];
    const double accept_log = std::log(opts.detect_rel) + median_log;
    const double prominence = std::log(50.0);

    std::vector<Candidate> candidates;
    for (int i = 0; i < ng; ++i) {
        const double left = (i > 0) ? logs[i - 1] : std::numeric_limits<double>::infinity();
        const double right = (i + 1 < ng) ? logs[i + 1] : std::numeric_limits<double>::infinity();
        if (logs[i] <= left && logs[i] <= right) {
            Candidate c;
            c.left = (i > 0) ? grid[i - 1] : grid[i];
            c.right = (i + 1 < ng) ? grid[i + 1] : grid[i];
            c.neighbor_log_min = std::min(left, right);
            c.local_h = c.right - c.left;
            if (c.local_h > 0) candidates.push_back(c);
        }
    }

    std::vector<RefinedRoot> roots;
    for (const Candidate& c : candidates) {
        RefinedRoot r = golden_refine(graph, frames, c.left, c.right, opts);
        if (r.log_sigma_adj >= accept_log) continue;
        if (std::isfinite(c.neighbor_log_min) &&
            r.log_sigma_adj > c.neighbor_log_min - prominence)
            continue;
        roots.push_back(r);
    }
    std::sort(roots.begin(), roots.end(),
              [](const RefinedRoot& a, const RefinedRoot& b) { return a.lambda < b.lambda; });

    // Merge refinements that converged to the same root.
    std::vector<RefinedRoot> merged;
    for (const RefinedRoot& r : roots) {
        if (!merged.empty() &&
            r.lambda - merged.back().lambda <
                2e-3 * std::max(r.local_h, merged.back().local_h)) {
            if (r.log_sigma_adj < merged.back().log_sigma_adj) merged.back() = r;
        } else {
            merged.push_back(r);
        }
    }

    for (const RefinedRoot& r : merged) {
        EigenvalueLine line;
        line.lambda = r.lambda;
        line.residual = r.sigma_raw;
        const SecularEval se = assemble(graph, frames, r.lambda);
        Eigen::JacobiSVD<Matrix> svd(se.matrix);
        int mult = 0;
        for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
            const double lg = std::log(svd.singularValues()(i)) + se.max_log_scale;
            if (lg < accept_log) ++mult;
        }
        line.multiplicity = std::max(1, mult);
        if (opts.with_eigenfunctions)
            line.eigenfunctions.push_back(eigenfunction_at(graph, conditions, r.lambda));
        result.eigenvalues.push_back(std::move(line));
    }

    const WeylDiagnostic weyl = weyl_sanity(graph, result);
    if (weyl.flagged) {
        std::string note = "WindowTooCoarse: Weyl sanity check failed";
        for (const std::string& n : weyl.notes) note += "; " + n;
        note += "; suggest scan_step " + std::to_string(h / 4.0);
        result.warnings.push_back(std::move(note));
    }
    return result;
}

namespace {

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr double kGlNode[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
constexpr double kGlWeight[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};

/// Integral of |va C + vb S|^2 over the edge, in the scaled basis.
double l2_norm_sq_edge(double lambda, double length, Complex va, Complex vb) {
    const int panels =
        std::max(1, static_cast<int>(std::ceil(std::sqrt(std::abs(lambda)) * length / 2.0)));
    const double pl = length / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double x0 = p * pl;
        for (int q = 0; q < 8; ++q) {
            const double x = x0 + 0.5 * pl * (1.0 + kGlNode[q]);
            const auto [c, s] = edge_basis_values_at(lambda, length, x);
            acc += kGlWeight[q] * 0.5 * pl * std::norm(va * c + vb * s);
        }
    }
    return acc;
}

}  // namespace

Complex Eigenfunction::evaluate(int edge, double x) const {
    const auto& [a, b] = coefficients.at(edge);
    const auto [c, s] = edge_basis_values_unscaled(lambda, x);
    return a * c + b * s;
}

Eigenfunction eigenfunction_at(const MetricGraph& graph, const MatchingConditions& conditions,
                               double lambda) {
    const SecularEval se = secular_matrix(graph, conditions, lambda);
    Eigen::JacobiSVD<Matrix> svd(se.matrix, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    const double smin = sv(sv.size() - 1);
    if (smin > 1e-6 * std::max(1.0, smax))
        throw NotAnEigenvalue("secular matrix is not singular at lambda = " +
                              std::to_string(lambda));

    Vector v = svd.matrixV().col(sv.size() - 1);

    const TraceMatrices t = trace_matrices(graph, lambda);
    double norm_sq = 0.0;
    for (int e = 0; e < graph.num_edges(); ++e)
        norm_sq += l2_norm_sq_edge(lambda, graph.edge(e).length, v(2 * e), v(2 * e + 1));
    const double norm = std::sqrt(norm_sq);

    // Deterministic output: largest coefficient made real positive.
    Complex pivot = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (std::abs(v(i)) > std::abs(pivot)) pivot = v(i);
    const Complex phase = (std::abs(pivot) > 0) ? pivot / std::abs(pivot) : Complex(1.0);
    v *= std::conj(phase) / norm;

    Eigenfunction ef;
    ef.lambda = lambda;
    for (int e = 0; e < graph.num_edges(); ++e) {
        const double undo = std::exp(-t.log_scales[e]);
        ef.coefficients.emplace_back(v(2 * e) * undo, v(2 * e + 1) * undo);
    }

    const Vector f_trace = t.dirichlet * v;
    const Vector fp_trace = t.neumann * v;
    const double r1 = (conditions.p_d() * f_trace).norm();
    const double r2 = (conditions.p_n() * fp_trace).norm();
    const double r3 = (conditions.p_r() * fp_trace - conditions.lambda() * f_trace).norm();
    ef.condition_residual = std::max({r1, r2, r3});
    return ef;
}

double condition_residual(const MetricGraph& graph, const MatchingConditions& conditions,
                          const Eigenfunction& ef) {
    const int n = graph.boundary_dim();
    Vector f = Vector::Zero(n), fp = Vector::Zero(n);
    for (int e = 0; e < graph.num_edges(); ++e) {
        const Edge& edge = graph.edge(e);
        const auto& [a, b] = ef.coefficients.at(e);
        const auto [cL, sL] = edge_basis_values_unscaled(ef.lambda, edge.length);
        f(edge.endpoint_minus_index) = a;
        f(edge.endpoint_plus_index) = a * cL + b * sL;
        fp(edge.endpoint_minus_index) = b;
        fp(edge.endpoint_plus_index) = -(a * (-ef.lambda * sL) + b * cL);
    }
    const double r1 = (conditions.p_d() * f).norm();
    const double r2 = (conditions.p_n() * fp).norm();
    const double r3 = (conditions.p_r() * fp - conditions.lambda() * f).norm();
    return std::max({r1, r2, r3});
}

WeylDiagnostic weyl_sanity(const MetricGraph& graph, const SpectrumResult& result) {
    WeylDiagnostic diag;
    const double total = graph.total_length();
    diag.deviation_threshold = 2.0 * graph.num_edges() + 2.0;
    const auto est = [&](double lambda) {
        return lambda > 0 ? total * std::sqrt(lambda) / kPi : 0.0;
    };

    // Cumulative deviation over the non-negative part of the window.
    int count = 0;
    for (const auto& line : result.eigenvalues) {
        if (line.lambda < -1e-12) continue;
        count += line.multiplicity;
        const double dev = std::abs(count - est(line.lambda));
        diag.max_deviation = std::max(diag.max_deviation, dev);
    }
    if (result.hi > 0) {
        const double dev = std::abs(count - est(result.hi));
        diag.max_deviation = std::max(diag.max_deviation, dev);
    }
    if (diag.max_deviation > diag.deviation_threshold) {
        diag.flagged = true;
        diag.notes.push_back("cumulative count deviates from the Weyl estimate by " +
                             std::to_string(diag.max_deviation));
    }

    // Missed-level check: the Weyl count jump across each gap should be
    // accounted for by the multiplicity arriving at the far end.
    double prev_est = est(std::max(result.lo, 0.0));
    for (const auto& line : result.eigenvalues) {
        if (line.lambda < -1e-12) continue;
        const double excess = est(line.lambda) - prev_est - line.multiplicity;
        diag.max_gap_excess = std::max(diag.max_gap_excess, excess);
        if (excess > 0.75) {
            diag.flagged = true;
            diag.notes.push_back("apparent hole below lambda = " + std::to_string(line.lambda) +
                                 " (gap excess " + std::to_string(excess) + ")");
        }
        prev_est = est(line.lambda);
    }
    return diag;
}

std::pair<double, double> default_window(const MetricGraph& graph,
                                         const MatchingConditions& conditions, int n_levels) {
    const double kappa = 4.0 * (1.0 + conditions.lambda_norm() * graph.max_length());
    const double hi = std::pow((n_levels + 1.0) * kPi / graph.total_length(), 2);
    return {-kappa * kappa, hi};
}

}  // namespace mgspec
