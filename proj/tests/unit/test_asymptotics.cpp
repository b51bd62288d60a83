#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mgspec/asymptotics.hpp"
#include "support/fixtures.hpp"

using namespace mgspec;

namespace {
constexpr double kPi2 = 9.869604401089358;

MetricGraph path2() { return MetricGraph(std::vector<double>{1.0, 0.7}); }

Branch synthetic_branch(int id, const std::vector<double>& eps,
                        double (*law)(double)) {
    Branch b;
    b.id = id;
    for (double e : eps) b.samples.push_back(BranchSample{e, law(e)});
    return b;
}

}  // namespace

TEST_CASE("rescaled conditions scale only lambda") {
    const MatchingConditions rn = fixtures::robin_neumann(2.0);
    const MatchingConditions same = rescaled_conditions(rn, 1.0);
    CHECK((same.lambda() - rn.lambda()).norm() < 1e-15);

    const MatchingConditions half = rescaled_conditions(rn, 0.5);
    CHECK(std::abs(half.lambda()(0, 0) - Complex(1.0)) < 1e-15);
    CHECK((half.p_r() - rn.p_r()).norm() == 0.0);
}

TEST_CASE("unperturbed conditions") {
    // Dirichlet stays Dirichlet (P_D = I).
    const MatchingConditions dir = unperturbed_conditions(fixtures::dirichlet_interval());
    CHECK((dir.p_d() - Matrix::Identity(2, 2)).norm() < 1e-14);
    CHECK(dir.p_n().norm() < 1e-14);

    // Robin-Neumann and Robin-Robin have P_D = 0 and collapse to pure Neumann.
    for (const MatchingConditions& c :
         {fixtures::robin_neumann(1.0), fixtures::robin_robin(2.0)}) {
        const MatchingConditions u = unperturbed_conditions(c);
        CHECK(u.p_d().norm() == 0.0);
        CHECK((u.p_n() - Matrix::Identity(2, 2)).norm() < 1e-14);
        CHECK(u.p_r().norm() == 0.0);
        CHECK(u.lambda().norm() == 0.0);
    }
}

TEST_CASE("rescaling identity: spectra of H_eps and R_eps/eps^2 agree") {
    const MetricGraph base = path2();
    const MatchingConditions c = fixtures::path2_robin_standard(0.8, -1.3);
    for (double eps : {0.3, 0.1}) {
        const double l_tot = base.total_length();
        const double hi = std::pow(8.0 * M_PI / (eps * l_tot), 2);
        const double lo = -std::pow(2.0 * std::sqrt(3.0 / eps) + 12.0, 2);

        const SpectrumResult direct =
            find_eigenvalues(base.scaled(eps), c, lo, hi);
        const SpectrumResult rescaled = find_eigenvalues(
            base, rescaled_conditions(c, eps), lo * eps * eps, hi * eps * eps);

        const std::vector<double> a = direct.expanded();
        const std::vector<double> b = rescaled.expanded();
        REQUIRE(a.size() >= 6);
        REQUIRE(b.size() >= 6);
        for (int i = 0; i < 6; ++i) {
            const double lhs = a[i];
            const double rhs = b[i] / (eps * eps);
            CHECK(std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)) < 1e-6);
        }
    }
}

TEST_CASE("predict: Dirichlet interval is all fast") {
    const Prediction p = predict(fixtures::unit_interval(), fixtures::dirichlet_interval(), 4);
    CHECK(p.m0 == 0);
    CHECK(p.n_minus == 0);
    CHECK(p.n_zero == 0);
    CHECK(p.n_plus == 0);
    REQUIRE(p.fast_coefficients.size() == 4);
    for (int n = 1; n <= 4; ++n)
        CHECK(p.fast_coefficients(n - 1) == doctest::Approx(n * n * kPi2).epsilon(1e-8));
}

TEST_CASE("predict: Robin-Neumann interval has one slow branch with slope gamma") {
    const Prediction p = predict(fixtures::unit_interval(), fixtures::robin_neumann(1.0), 3);
    CHECK(p.m0 == 1);
    CHECK(p.n_minus == 0);
    CHECK(p.n_zero == 0);
    CHECK(p.n_plus == 1);
    REQUIRE(p.slow_slopes.size() == 1);
    // In the L2 geometry of the kernel the slope equals gamma itself.
    CHECK(p.slow_slopes(0) == doctest::Approx(1.0).epsilon(1e-12));

    const Prediction m = predict(fixtures::unit_interval(), fixtures::robin_neumann(-1.0), 3);
    CHECK(m.n_minus == 1);
    CHECK(m.slow_slopes(0) == doctest::Approx(-1.0).epsilon(1e-12));

    // R0 is the Neumann interval: fast coefficients (pi n)^2.
    CHECK(p.fast_coefficients(0) == doctest::Approx(kPi2).epsilon(1e-8));
}

TEST_CASE("predict: Robin-Robin interval has one exotic branch") {
    const Prediction p = predict(fixtures::unit_interval(), fixtures::robin_robin(1.0), 3);
    CHECK(p.m0 == 1);
    CHECK(p.n_minus == 0);
    CHECK(p.n_zero == 1);
    CHECK(p.n_plus == 0);
}

TEST_CASE("predict: slope scales with the edge length metric") {
    // Robin(gamma)-Neumann on an interval of length l: the constant mode has
    // norm^2 = l, so the slope is gamma / l.
    const MetricGraph g{std::vector<double>{2.0}};
    const Prediction p = predict(g, fixtures::robin_neumann(1.0), 2);
    CHECK(p.slow_slopes(0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("kernel dimension of R0 equals m0 (fixtures and random conditions)") {
    const MetricGraph interval = fixtures::unit_interval();
    for (const MatchingConditions& c :
         {fixtures::dirichlet_interval(), fixtures::neumann_interval(),
          fixtures::robin_neumann(1.0), fixtures::robin_robin(2.0)}) {
        const int m0 = intersect(build_D0(1), kernel(c.p_d())).dim();
        CHECK(nullity_at(interval, unperturbed_conditions(c), 0.0) == m0);
    }

    const MetricGraph two = path2();
    std::mt19937_64 seeds(8080);
    for (int trial = 0; trial < 20; ++trial) {
        const MatchingConditions c = random_conditions(4, seeds());
        const int m0 = intersect(build_D0(2), kernel(c.p_d())).dim();
        CHECK(nullity_at(two, unperturbed_conditions(c), 0.0) == m0);
    }
}

TEST_CASE("sweep: Neumann interval carries a zero branch") {
    SweepOptions opts;
    opts.num_fast = 3;
    opts.epsilons = {1.0, 0.5, 0.1, 0.05, 0.01};
    const BranchTable table = sweep(fixtures::unit_interval(), fixtures::neumann_interval(), opts);
    REQUIRE(!table.branches.empty());
    // branch 0 tracks the lowest eigenvalue: identically zero
    const Branch& zero = table.branches[0];
    CHECK(zero.samples.size() == opts.epsilons.size());
    for (const BranchSample& s : zero.samples) CHECK(std::abs(s.lambda) < 1e-9);
    // every other branch is already far above
    for (size_t i = 1; i < table.branches.size(); ++i)
        for (const BranchSample& s : table.branches[i].samples) CHECK(s.lambda > 1.0);
}

TEST_CASE("sweep: Robin-Robin interval pins the exotic branch at -gamma^2") {
    SweepOptions opts;
    opts.num_fast = 2;
    opts.epsilons = {1.0, 0.3, 0.1, 0.03, 0.01};
    const BranchTable table = sweep(fixtures::unit_interval(), fixtures::robin_robin(1.0), opts);
    const Branch& exotic = table.branches[0];
    CHECK(exotic.samples.size() == opts.epsilons.size());
    for (const BranchSample& s : exotic.samples)
        CHECK(s.lambda == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("sweep: Robin-Neumann slow branch satisfies lambda * eps -> gamma") {
    SweepOptions opts;
    opts.num_fast = 2;
    const BranchTable table =
        sweep(fixtures::unit_interval(), fixtures::robin_neumann(1.0), opts);
    const Branch& slow = table.branches[0];
    const BranchSample last = slow.samples.back();
    CHECK(last.epsilon == doctest::Approx(1e-3));
    CHECK(last.lambda * last.epsilon == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("fit_branches classifies synthetic power laws") {
    const std::vector<double> eps = default_epsilon_grid();
    BranchTable table;
    table.epsilons = eps;
    table.branches.push_back(
        synthetic_branch(0, eps, [](double e) { return kPi2 / (e * e); }));
    table.branches.push_back(synthetic_branch(1, eps, [](double e) { return 1.0 / e; }));
    table.branches.push_back(synthetic_branch(2, eps, [](double) { return -1.0; }));
    table.branches.push_back(synthetic_branch(3, eps, [](double e) { return -2.5 / e; }));
    table.branches.push_back(synthetic_branch(4, eps, [](double) { return 0.0; }));

    const BranchTable fitted = fit_branches(std::move(table));
    CHECK(fitted.branches[0].cls == BranchClass::Fast);
    CHECK(fitted.branches[0].alpha == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(fitted.branches[0].coefficient == doctest::Approx(kPi2).epsilon(1e-6));

    CHECK(fitted.branches[1].cls == BranchClass::SlowPositive);
    CHECK(fitted.branches[1].alpha == doctest::Approx(1.0).epsilon(1e-6));

    CHECK(fitted.branches[2].cls == BranchClass::Exotic);
    CHECK(fitted.branches[2].limit == doctest::Approx(-1.0));

    CHECK(fitted.branches[3].cls == BranchClass::SlowNegative);
    CHECK(fitted.branches[4].cls == BranchClass::Exotic);
    CHECK(fitted.branches[4].limit == 0.0);
}

TEST_CASE("fit_branches leaves odd exponents unclassified") {
    const std::vector<double> eps = default_epsilon_grid();
    BranchTable table;
    table.epsilons = eps;
    table.branches.push_back(
        synthetic_branch(0, eps, [](double e) { return 1.0 / std::pow(e, 1.5); }));
    const BranchTable fitted = fit_branches(std::move(table));
    CHECK(fitted.branches[0].cls == BranchClass::Unclassified);
}

TEST_CASE("verify: all four interval fixtures pass end to end") {
    struct Case {
        MatchingConditions conditions;
        const char* name;
    };
    const Case cases[] = {
        {fixtures::dirichlet_interval(), "dirichlet"},
        {fixtures::neumann_interval(), "neumann"},
        {fixtures::robin_neumann(1.0), "robin-neumann"},
        {fixtures::robin_robin(1.0), "robin-robin"},
    };
    for (const Case& c : cases) {
        CAPTURE(c.name);
        SweepOptions opts;
        opts.num_fast = 3;
        const Prediction p = predict(fixtures::unit_interval(), c.conditions, opts.num_fast);
        const BranchTable fitted =
            fit_branches(sweep(fixtures::unit_interval(), c.conditions, opts));
        const VerifyReport rep = verify(p, fitted);
        for (const VerifyItem& it : rep.items) {
            CAPTURE(it.check);
            CAPTURE(it.detail);
            CHECK(it.pass);
        }
        CHECK(rep.pass);
    }
}

TEST_CASE("verify: corrupted prediction fails") {
    SweepOptions opts;
    opts.num_fast = 2;
    Prediction p = predict(fixtures::unit_interval(), fixtures::robin_robin(1.0), opts.num_fast);
    const BranchTable fitted =
        fit_branches(sweep(fixtures::unit_interval(), fixtures::robin_robin(1.0), opts));
    REQUIRE(verify(p, fitted).pass);

    p.n_zero = 0;  // deliberately wrong
    p.n_plus = 1;
    const VerifyReport rep = verify(p, fitted);
    CHECK_FALSE(rep.pass);
    bool found_mismatch = false;
    for (const VerifyItem& it : rep.items)
        if (!it.pass && it.check == "exotic count") found_mismatch = true;
    CHECK(found_mismatch);
}

TEST_CASE("verify: prediction and sweep agree for random conditions on two edges") {
    const MetricGraph base = path2();
    std::mt19937_64 seeds(555);
    SweepOptions opts;
    opts.num_fast = 4;
    int done = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const MatchingConditions c = random_conditions(4, seeds());
        CAPTURE(trial);
        const Prediction p = predict(base, c, opts.num_fast);
        const BranchTable fitted = fit_branches(sweep(base, c, opts));
        const VerifyReport rep = verify(p, fitted);
        for (const VerifyItem& it : rep.items) {
            CAPTURE(it.check);
            CAPTURE(it.detail);
            CHECK(it.pass);
        }
        ++done;
    }
    CHECK(done == 20);
}
