#include <doctest.h>

#include <cmath>

#include "mgspec/matching_conditions.hpp"
#include "mgspec/metric_graph.hpp"
#include "mgspec/subspace.hpp"
#include "support/fixtures.hpp"

using namespace mgspec;

TEST_CASE("metric graph invariants") {
    CHECK_THROWS_AS(MetricGraph(std::vector<double>{}), DimensionMismatch);
    CHECK_THROWS_AS(MetricGraph(std::vector<double>{-1.0}), DimensionMismatch);
    CHECK_THROWS_AS(MetricGraph(std::vector<double>{0.0}), DimensionMismatch);

    // Endpoint indices must be a permutation of the boundary slots.
    CHECK_THROWS_AS(MetricGraph(std::vector<Edge>{{1.0, 0, 0}, {1.0, 2, 3}}), DimensionMismatch);
    CHECK_NOTHROW(MetricGraph(std::vector<Edge>{{1.0, 1, 0}, {2.0, 3, 2}}));

    MetricGraph g(std::vector<double>{1.0, 2.0});
    CHECK(g.num_edges() == 2);
    CHECK(g.boundary_dim() == 4);
    CHECK(g.total_length() == doctest::Approx(3.0));
    CHECK(g.edge(1).endpoint_minus_index == 2);
}

TEST_CASE("scale multiplies lengths") {
    MetricGraph base(std::vector<double>{1.0});
    CHECK(scale({base, fixtures::neumann_interval(), 0.5}).edge(0).length == doctest::Approx(0.5));

    MetricGraph two(std::vector<double>{1.0, 2.0});
    MetricGraph same = scale({two, fixtures::neumann_interval(), 1.0});
    // identity at eps = 1 -- wrong conditions dim is irrelevant to scale()
    CHECK(same.edge(0).length == 1.0);
    CHECK(same.edge(1).length == 2.0);

    CHECK(scale({MetricGraph(std::vector<double>{3.0}), fixtures::neumann_interval(), 1e-3})
              .edge(0)
              .length == doctest::Approx(0.003));

    // multiplicativity up to floating-point associativity
    MetricGraph ab = MetricGraph(std::vector<double>{1.7, 0.3}).scaled(0.7).scaled(1.3);
    MetricGraph prod = MetricGraph(std::vector<double>{1.7, 0.3}).scaled(0.7 * 1.3);
    for (int e = 0; e < 2; ++e)
        CHECK(ab.edge(e).length ==
              doctest::Approx(prod.edge(e).length).epsilon(4 * std::numeric_limits<double>::epsilon()));
}

TEST_CASE("validate_conditions accepts the appendix parametrizations") {
    // Dirichlet interval: P_D = I2.
    const MatchingConditions dir = fixtures::dirichlet_interval();
    CHECK(dir.rank_d() == 2);
    CHECK(dir.defects().idempotency < 1e-14);

    // P_R = I2, Lambda = diag(gamma, -gamma).
    const MatchingConditions rr = fixtures::robin_robin(1.5);
    CHECK(rr.rank_r() == 2);
    CHECK(rr.lambda_norm() == doctest::Approx(1.5));
}

TEST_CASE("validate_conditions rejects non-projectors") {
    Matrix half = 0.5 * Matrix::Identity(2, 2);
    Matrix z = Matrix::Zero(2, 2);
    CHECK_THROWS_AS(validate_conditions(half, half, z, z), ProjectorAxiomViolation);
    try {
        validate_conditions(half, half, z, z);
    } catch (const ProjectorAxiomViolation& e) {
        CHECK(e.axiom() == "idempotency");
        CHECK(e.defect() == doctest::Approx(0.25));
    }

    // Projectors fine but they do not sum to the identity.
    Matrix p0 = Matrix::Zero(2, 2);
    p0(0, 0) = 1.0;
    CHECK_THROWS_AS(validate_conditions(p0, z, z, z), ProjectorAxiomViolation);

    // Lambda must be invertible on Ran P_R.
    Matrix i2 = Matrix::Identity(2, 2);
    CHECK_THROWS_AS(validate_conditions(z, z, i2, z), LambdaNotInvertibleOnRange);

    CHECK_THROWS_AS(validate_conditions(Matrix::Identity(3, 3), Matrix::Zero(3, 3),
                                        Matrix::Zero(3, 3), Matrix::Zero(3, 3)),
                    DimensionMismatch);
}

TEST_CASE("lambda is compressed to Ran P_R") {
    Matrix p_d = Matrix::Zero(2, 2);
    Matrix p_n = Matrix::Zero(2, 2);
    Matrix p_r = Matrix::Zero(2, 2);
    p_n(1, 1) = 1.0;
    p_r(0, 0) = 1.0;
    Matrix lam = Matrix::Zero(2, 2);
    lam(0, 0) = 2.0;
    lam(1, 1) = 7.0;  // garbage outside Ran P_R
    const MatchingConditions c = validate_conditions(p_d, p_n, p_r, lam);
    CHECK(std::abs(c.lambda()(1, 1)) == 0.0);
    CHECK(std::abs(c.lambda()(0, 0) - Complex(2.0)) < 1e-15);
    CHECK(c.defects().lambda_discarded == doctest::Approx(7.0));
}

TEST_CASE("preset: interval with both ends Dirichlet gives P_D = I2") {
    std::vector<int> vos = {0, 1};
    std::vector<VertexCondition> vc(2, VertexCondition{VertexCondition::Type::Dirichlet, 0.0});
    const MatchingConditions c = preset_conditions(vos, vc);
    CHECK((c.p_d() - Matrix::Identity(2, 2)).norm() < 1e-14);
    CHECK(c.p_n().norm() == 0.0);
    CHECK(c.p_r().norm() == 0.0);
}

TEST_CASE("preset: Robin at 0, Neumann at the far end reproduces the projector form") {
    std::vector<int> vos = {0, 1};
    std::vector<VertexCondition> vc = {VertexCondition{VertexCondition::Type::Robin, -1.0},
                                       VertexCondition{VertexCondition::Type::Neumann, 0.0}};
    const MatchingConditions c = preset_conditions(vos, vc);
    const MatchingConditions expected = fixtures::robin_neumann(-1.0);
    CHECK((c.p_d() - expected.p_d()).norm() < 1e-14);
    CHECK((c.p_n() - expected.p_n()).norm() < 1e-14);
    CHECK((c.p_r() - expected.p_r()).norm() < 1e-14);
    CHECK((c.lambda() - expected.lambda()).norm() < 1e-14);
}

TEST_CASE("preset: 3-star with standard center and Neumann leaves") {
    const MatchingConditions c = fixtures::star3_standard_neumann();
    CHECK(c.defects().idempotency < 1e-12);
    CHECK(c.defects().completeness < 1e-12);

    // F0 = D0 intersect Ker P_D is one-dimensional (the constant function).
    const Subspace f0 = intersect(build_D0(3), kernel(c.p_d()));
    CHECK(f0.dim() == 1);

    // Independent oracle: dim(A cap B) = dim A + dim B - rank [A B].
    const Subspace d0 = build_D0(3);
    const Subspace ker = kernel(c.p_d());
    Matrix stacked(6, d0.dim() + ker.dim());
    stacked << d0.basis(), ker.basis();
    Eigen::JacobiSVD<Matrix> svd(stacked);
    int rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > 1e-10 * svd.singularValues()(0)) ++rank;
    CHECK(f0.dim() == d0.dim() + ker.dim() - rank);
}

TEST_CASE("preset errors") {
    std::vector<int> vos = {0, 5};  // vertex 5 undeclared
    std::vector<VertexCondition> vc(2, VertexCondition{VertexCondition::Type::Neumann, 0.0});
    CHECK_THROWS_AS(preset_conditions(vos, vc), UnassignedSlot);
}

TEST_CASE("every preset passes validation with tiny defects") {
    for (const MatchingConditions& c :
         {fixtures::star3_standard_mixed(), fixtures::path2_robin_standard(0.8, -1.3),
          fixtures::star3_standard_neumann()}) {
        CHECK(c.defects().idempotency < 1e-12);
        CHECK(c.defects().hermiticity < 1e-12);
        CHECK(c.defects().completeness < 1e-12);
        CHECK(c.defects().mutual_orth < 1e-12);
    }
}

TEST_CASE("standard conditions on c components give m0 = c") {
    // Connected: path of 2 edges, all standard -> one constant function.
    {
        std::vector<int> vos = {0, 1, 1, 2};
        std::vector<VertexCondition> vc(3, VertexCondition{VertexCondition::Type::Standard, 0.0});
        const MatchingConditions c = preset_conditions(vos, vc);
        CHECK(intersect(build_D0(2), kernel(c.p_d())).dim() == 1);
    }
    // Two disjoint edges, standard everywhere -> two components.
    {
        std::vector<int> vos = {0, 1, 2, 3};
        std::vector<VertexCondition> vc(4, VertexCondition{VertexCondition::Type::Standard, 0.0});
        const MatchingConditions c = preset_conditions(vos, vc);
        CHECK(intersect(build_D0(2), kernel(c.p_d())).dim() == 2);
    }
}
