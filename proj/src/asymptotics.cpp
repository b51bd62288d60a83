#include "mgspec/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "mgspec/errors.hpp"

namespace mgspec {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kExoticZeroFloor = 1e-7;  ///< |lambda| below this counts as a zero tail
constexpr double kExoticLimitTol = 1e-6;   ///< verified bound on exotic limits

double signed_log(double lambda, double epsilon) {
    // Coordinate of the rescaled spectrum lambda * eps^2; every branch type
    // moves O(eps) per sweep step here, so continuation is unambiguous.
    const double v = std::log1p(epsilon * epsilon * std::abs(lambda));
    return lambda < 0 ? -v : v;
}

}  // namespace

const char* branch_class_name(BranchClass c) {
    switch (c) {
        case BranchClass::Fast: return "fast";
        case BranchClass::SlowNegative: return "slow_negative";
        case BranchClass::Exotic: return "exotic";
        case BranchClass::SlowPositive: return "slow_positive";
        case BranchClass::Unclassified: return "unclassified";
    }
    return "unclassified";
}

MatchingConditions rescaled_conditions(const MatchingConditions& conditions, double epsilon) {
    if (epsilon < 0) throw Error("epsilon must be non-negative");
    return conditions.with_lambda_scaled(epsilon);
}

MatchingConditions unperturbed_conditions(const MatchingConditions& conditions) {
    return conditions.unperturbed();
}

Prediction predict(const MetricGraph& base_graph, const MatchingConditions& conditions,
                   int num_fast, const Tolerances& tol) {
    if (num_fast < 1) throw Error("at least one fast coefficient must be requested");
    if (conditions.dim() != base_graph.boundary_dim())
        throw DimensionMismatch("conditions dimension does not match the graph");

    Prediction out;
    const Subspace f0 = intersect(build_D0(base_graph), kernel(conditions.p_d(), tol), tol);
    out.m0 = f0.dim();

    const FormInertia inertia = restricted_form_inertia(conditions, f0);
    out.n_minus = inertia.n_minus;
    out.n_zero = inertia.n_zero;
    out.n_plus = inertia.n_plus;

    // Slopes: eigenvalues of the coupling form on the edgewise-constant
    // kernel, whose L2 Gram matrix on trace vectors is diag(l_e / 2).
    out.slow_slopes = RealVector(out.m0);
    if (out.m0 > 0) {
        const int n = base_graph.boundary_dim();
        RealVector weights(n);
        for (int e = 0; e < base_graph.num_edges(); ++e) {
            weights(base_graph.edge(e).endpoint_minus_index) = base_graph.edge(e).length / 2.0;
            weights(base_graph.edge(e).endpoint_plus_index) = base_graph.edge(e).length / 2.0;
        }
        const Matrix& b = f0.basis();
        Matrix q = b.adjoint() * conditions.lambda() * b;
        q = Complex(0.5) * (q + q.adjoint().eval());
        Matrix g = b.adjoint() * weights.asDiagonal().toDenseMatrix().cast<Complex>() * b;
        g = Complex(0.5) * (g + g.adjoint().eval());
        Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> ges(q, g);
        out.slow_slopes = ges.eigenvalues();

        // The metric is positive definite, so the sign pattern must agree
        // with the form inertia (Sylvester); a mismatch means the zero band
        // cut through a borderline eigenvalue.
        double min_l = base_graph.edge(0).length;
        for (const Edge& e : base_graph.edges()) min_l = std::min(min_l, e.length);
        const double band = inertia.zero_tolerance_used * 2.0 / base_graph.max_length();
        int sn = 0, sz = 0, sp = 0;
        for (int i = 0; i < out.m0; ++i) {
            if (out.slow_slopes(i) < -band)
                ++sn;
            else if (out.slow_slopes(i) > band)
                ++sp;
            else
                ++sz;
        }
        if (sn != out.n_minus || sz != out.n_zero || sp != out.n_plus)
            throw Error("slope sign pattern disagrees with the form inertia (tolerance failure)");
    }

    // Unperturbed operator: kernel dimension must reproduce m0.
    const MatchingConditions unpert = unperturbed_conditions(conditions);
    const int kernel_mult = nullity_at(base_graph, unpert, 0.0, tol.rank);
    if (kernel_mult != out.m0) throw KernelMismatch(kernel_mult, out.m0);

    const double l_tot = base_graph.total_length();
    const double unit = std::pow(kPi / l_tot, 2);
    const double zero_band = 1e-8 * (1.0 + unit);
    std::vector<double> fast;
    for (int attempt = 0; attempt < 3 && static_cast<int>(fast.size()) < num_fast; ++attempt) {
        const double levels = num_fast + out.m0 + 3.0 + 6.0 * attempt;
        const double hi = std::pow(levels * kPi / l_tot, 2);
        const SpectrumResult res = find_eigenvalues(base_graph, unpert, -0.01 * unit, hi);
        fast.clear();
        int zeros = 0;
        for (double lam : res.expanded()) {
            if (lam > zero_band)
                fast.push_back(lam);
            else if (std::abs(lam) <= zero_band)
                ++zeros;
        }
        if (zeros != out.m0) throw KernelMismatch(zeros, out.m0);
    }
    if (static_cast<int>(fast.size()) < num_fast)
        throw Error("could not collect the requested number of fast coefficients");
    out.fast_coefficients = RealVector(num_fast);
    for (int i = 0; i < num_fast; ++i) out.fast_coefficients(i) = fast[i];
    return out;
}

std::vector<double> default_epsilon_grid() {
    std::vector<double> eps(13);
    for (int i = 0; i < 13; ++i) eps[i] = std::pow(10.0, -3.0 * i / 12.0);
    return eps;
}

namespace {

/// Order-preserving one-to-one alignment of two coordinate lists minimizing
/// total distance, with a fixed penalty for leaving an element unmatched.
std::vector<std::pair<int, int>> align(const std::vector<double>& prev,
                                       const std::vector<double>& next, double gap_penalty) {
    const int n = static_cast<int>(prev.size());
    const int m = static_cast<int>(next.size());
    Eigen::MatrixXd dp(n + 1, m + 1);
    for (int i = 0; i <= n; ++i) dp(i, 0) = i * gap_penalty;
    for (int j = 0; j <= m; ++j) dp(0, j) = j * gap_penalty;
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= m; ++j)
            dp(i, j) = std::min({dp(i - 1, j - 1) + std::abs(prev[i - 1] - next[j - 1]),
                                 dp(i - 1, j) + gap_penalty, dp(i, j - 1) + gap_penalty});
    std::vector<std::pair<int, int>> matches;
    int i = n, j = m;
    while (i > 0 && j > 0) {
        const double here = dp(i, j);
        if (here == dp(i - 1, j - 1) + std::abs(prev[i - 1] - next[j - 1])) {
            matches.emplace_back(i - 1, j - 1);
            --i;
            --j;
        } else if (here == dp(i - 1, j) + gap_penalty) {
            --i;
        } else {
            --j;
        }
    }
    std::reverse(matches.begin(), matches.end());
    return matches;
}

}  // namespace

BranchTable sweep(const MetricGraph& base_graph, const MatchingConditions& conditions,
                  const SweepOptions& opts) {
    const std::vector<double> epsilons =
        opts.epsilons.empty() ? default_epsilon_grid() : opts.epsilons;
    if (epsilons.size() < 4) throw Error("sweep needs at least 4 epsilon values");
    for (size_t i = 0; i + 1 < epsilons.size(); ++i)
        if (!(epsilons[i] > epsilons[i + 1]) || !(epsilons.back() > 0))
            throw Error("epsilons must be positive and strictly descending");

    // Window policy: the m0 + num_fast lowest eigenvalues, with the upper
    // edge growing like 1/eps^2 and the lower like the slope scale / eps.
    const Subspace f0 =
        intersect(build_D0(base_graph), kernel(conditions.p_d()), Tolerances{});
    const int m0 = f0.dim();
    const int n_branches = m0 + opts.num_fast;

    const double l_tot = base_graph.total_length();
    double min_l = base_graph.edge(0).length;
    for (const Edge& e : base_graph.edges()) min_l = std::min(min_l, e.length);
    const double slope_bound = conditions.lambda_norm() * 2.0 / min_l;

    BranchTable table;
    table.epsilons = epsilons;
    int next_id = 0;
    std::vector<int> active;  // branch index per slot of the previous sample list
    std::vector<double> prev_coords;

    for (size_t step = 0; step < epsilons.size(); ++step) {
        const double eps = epsilons[step];
        const MetricGraph graph = base_graph.scaled(eps);
        const double hi = std::pow((n_branches + 2.0) * kPi / (eps * l_tot), 2);
        const double kappa =
            2.0 * std::sqrt(std::max(slope_bound, 1e-6) / eps) +
            4.0 * (1.0 + conditions.lambda_norm() * (1.0 + base_graph.max_length()));
        const double lo = -kappa * kappa;

        const SpectrumResult res = find_eigenvalues(graph, conditions, lo, hi, opts.solver);
        for (const std::string& w : res.warnings)
            table.warnings.push_back("eps=" + std::to_string(eps) + ": " + w);

        std::vector<double> lambdas = res.expanded();
        if (static_cast<int>(lambdas.size()) > n_branches) lambdas.resize(n_branches);
        if (static_cast<int>(lambdas.size()) < n_branches)
            table.warnings.push_back("eps=" + std::to_string(eps) + ": window produced only " +
                                     std::to_string(lambdas.size()) + " of " +
                                     std::to_string(n_branches) + " eigenvalues");

        std::vector<double> coords(lambdas.size());
        for (size_t j = 0; j < lambdas.size(); ++j) coords[j] = signed_log(lambdas[j], eps);

        // Continuation candidates closer than this are reported as ambiguous.
        constexpr double ambiguity_tol = 1e-3;
        for (size_t j = 0; j + 1 < coords.size(); ++j)
            if (coords[j + 1] - coords[j] < ambiguity_tol)
                table.warnings.push_back(
                    "BranchAmbiguity: eps=" + std::to_string(eps) + ": eigenvalues " +
                    std::to_string(lambdas[j]) + " and " + std::to_string(lambdas[j + 1]) +
                    " are within matching tolerance");

        std::vector<int> new_active(lambdas.size(), -1);
        if (step == 0) {
            for (size_t j = 0; j < lambdas.size(); ++j) {
                Branch b;
                b.id = next_id++;
                table.branches.push_back(b);
                new_active[j] = b.id;
            }
        } else {
            const auto matches = align(prev_coords, coords, 1.0);
            for (const auto& [i, j] : matches) new_active[j] = active[i];
            for (size_t j = 0; j < lambdas.size(); ++j) {
                if (new_active[j] >= 0) continue;
                Branch b;
                b.id = next_id++;
                table.branches.push_back(b);
                new_active[j] = b.id;
            }
        }
        for (size_t j = 0; j < lambdas.size(); ++j)
            table.branches[new_active[j]].samples.push_back(BranchSample{eps, lambdas[j]});

        active = std::move(new_active);
        prev_coords = std::move(coords);
    }
    return table;
}

BranchTable fit_branches(BranchTable table) {
    for (Branch& b : table.branches) {
        b.fitted = true;
        const int n = static_cast<int>(b.samples.size());
        if (n < 4) {
            b.cls = BranchClass::Unclassified;
            continue;
        }
        b.limit = b.samples.back().lambda;

        // Bounded tail -> exotic. A tail pinned at zero is bounded too, even
        // though the max/min ratio of near-zero noise is meaningless.
        double tail_max = 0.0, tail_min = std::numeric_limits<double>::infinity();
        for (int i = n - 3; i < n; ++i) {
            tail_max = std::max(tail_max, std::abs(b.samples[i].lambda));
            tail_min = std::min(tail_min, std::abs(b.samples[i].lambda));
        }
        if (tail_max < kExoticZeroFloor || (tail_min > 0 && tail_max / tail_min < 1.5)) {
            b.cls = BranchClass::Exotic;
            continue;
        }

        // Power-law fit over the last half of the samples.
        const int from = n / 2;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int count = 0;
        bool any_pos = false, any_neg = false;
        for (int i = from; i < n; ++i) {
            const double lam = b.samples[i].lambda;
            if (lam > 0) any_pos = true;
            if (lam < 0) any_neg = true;
            const double y = std::log(std::abs(lam));
            if (!std::isfinite(y)) continue;
            const double x = std::log(b.samples[i].epsilon);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++count;
        }
        if (count < 3 || (any_pos && any_neg)) {
            b.cls = BranchClass::Unclassified;
            continue;
        }
        const double denom = count * sxx - sx * sx;
        const double slope = (count * sxy - sx * sy) / denom;
        const double intercept = (sy - slope * sx) / count;
        b.alpha = -slope;
        b.coefficient = std::exp(intercept);

        if (b.alpha >= 1.7 && b.alpha <= 2.3 && any_pos)
            b.cls = BranchClass::Fast;
        else if (b.alpha >= 0.7 && b.alpha <= 1.3)
            b.cls = any_neg ? BranchClass::SlowNegative : BranchClass::SlowPositive;
        else
            b.cls = BranchClass::Unclassified;
    }
    return table;
}

VerifyReport verify(const Prediction& prediction, const BranchTable& fitted) {
    VerifyReport rep;
    std::vector<const Branch*> slow_neg, slow_pos, exotic, fast;
    for (const Branch& b : fitted.branches) {
        switch (b.cls) {
            case BranchClass::Fast: fast.push_back(&b); break;
            case BranchClass::SlowNegative: slow_neg.push_back(&b); break;
            case BranchClass::Exotic: exotic.push_back(&b); break;
            case BranchClass::SlowPositive: slow_pos.push_back(&b); break;
            case BranchClass::Unclassified: ++rep.observed_unclassified; break;
        }
    }
    rep.observed_fast = static_cast<int>(fast.size());
    rep.observed_slow_negative = static_cast<int>(slow_neg.size());
    rep.observed_exotic = static_cast<int>(exotic.size());
    rep.observed_slow_positive = static_cast<int>(slow_pos.size());

    auto item = [&rep](const std::string& check, bool pass, const std::string& detail) {
        rep.items.push_back(VerifyItem{check, pass, detail});
    };

    item("all branches classified", rep.observed_unclassified == 0,
         std::to_string(rep.observed_unclassified) + " unclassified");
    item("slow negative count", rep.observed_slow_negative == prediction.n_minus,
         "observed " + std::to_string(rep.observed_slow_negative) + ", predicted " +
             std::to_string(prediction.n_minus));
    item("exotic count", rep.observed_exotic == prediction.n_zero,
         "observed " + std::to_string(rep.observed_exotic) + ", predicted " +
             std::to_string(prediction.n_zero));
    item("slow positive count", rep.observed_slow_positive == prediction.n_plus,
         "observed " + std::to_string(rep.observed_slow_positive) + ", predicted " +
             std::to_string(prediction.n_plus));
    item("fast count", rep.observed_fast == prediction.fast_coefficients.size(),
         "observed " + std::to_string(rep.observed_fast) + ", predicted " +
             std::to_string(prediction.fast_coefficients.size()));

    // Slow coefficients against slopes, 15%, paired in sorted order.
    const auto by_signed = [](const Branch* a, const Branch* b) {
        const double sa = (a->cls == BranchClass::SlowNegative) ? -a->coefficient : a->coefficient;
        const double sb = (b->cls == BranchClass::SlowNegative) ? -b->coefficient : b->coefficient;
        return sa < sb;
    };
    std::sort(slow_neg.begin(), slow_neg.end(), by_signed);
    std::sort(slow_pos.begin(), slow_pos.end(), by_signed);
    if (rep.observed_slow_negative == prediction.n_minus)
        for (int i = 0; i < prediction.n_minus; ++i) {
            const double mu = prediction.slow_slopes(i);
            const double c = -slow_neg[i]->coefficient;
            const double rel = std::abs(c - mu) / std::max(std::abs(mu), 1e-300);
            item("slow negative slope (branch " + std::to_string(slow_neg[i]->id) + ")",
                 rel <= 0.15,
                 "fitted " + std::to_string(c) + " vs mu " + std::to_string(mu));
        }
    if (rep.observed_slow_positive == prediction.n_plus)
        for (int i = 0; i < prediction.n_plus; ++i) {
            const double mu = prediction.slow_slopes(prediction.m0 - prediction.n_plus + i);
            const double c = slow_pos[i]->coefficient;
            const double rel = std::abs(c - mu) / std::max(std::abs(mu), 1e-300);
            item("slow positive slope (branch " + std::to_string(slow_pos[i]->id) + ")",
                 rel <= 0.15,
                 "fitted " + std::to_string(c) + " vs mu " + std::to_string(mu));
        }

    for (const Branch* b : exotic)
        item("exotic limit (branch " + std::to_string(b->id) + ")", b->limit <= kExoticLimitTol,
             "limit " + std::to_string(b->limit));

    std::vector<const Branch*> fast_sorted = fast;
    std::sort(fast_sorted.begin(), fast_sorted.end(),
              [](const Branch* a, const Branch* b) { return a->coefficient < b->coefficient; });
    const int n_pair = std::min<int>(static_cast<int>(fast_sorted.size()),
                                     static_cast<int>(prediction.fast_coefficients.size()));
    for (int i = 0; i < n_pair; ++i) {
        const double mu = prediction.fast_coefficients(i);
        const double c = fast_sorted[i]->coefficient;
        const double rel = std::abs(c - mu) / std::max(mu, 1e-300);
        item("fast coefficient (branch " + std::to_string(fast_sorted[i]->id) + ")", rel <= 0.10,
             "fitted " + std::to_string(c) + " vs lambda0 " + std::to_string(mu));
    }

    rep.pass = std::all_of(rep.items.begin(), rep.items.end(),
                           [](const VerifyItem& it) { return it.pass; });
    return rep;
}

}  // namespace mgspec
