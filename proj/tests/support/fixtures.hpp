#pragma once

// Shared condition fixtures: the four interval examples (Dirichlet, Neumann,
// Robin-Neumann, Robin-Robin plus the Robin-Dirichlet variant) and small star
// graphs used across the unit and acceptance suites.

#include <vector>

#include "mgspec/matching_conditions.hpp"
#include "mgspec/metric_graph.hpp"

namespace mgspec::fixtures {

inline MatchingConditions dirichlet_interval() {
    Matrix i2 = Matrix::Identity(2, 2);
    Matrix z = Matrix::Zero(2, 2);
    return validate_conditions(i2, z, z, z);
}

inline MatchingConditions neumann_interval() {
    Matrix i2 = Matrix::Identity(2, 2);
    Matrix z = Matrix::Zero(2, 2);
    return validate_conditions(z, i2, z, z);
}

/// f'(0) = gamma f(0), -f'(L) = 0.
inline MatchingConditions robin_neumann(double gamma) {
    Matrix p_d = Matrix::Zero(2, 2);
    Matrix p_n = Matrix::Zero(2, 2);
    Matrix p_r = Matrix::Zero(2, 2);
    Matrix lam = Matrix::Zero(2, 2);
    p_n(1, 1) = 1.0;
    p_r(0, 0) = 1.0;
    lam(0, 0) = gamma;
    return validate_conditions(p_d, p_n, p_r, lam);
}

/// f'(0) = gamma f(0), f(L) = 0.
inline MatchingConditions robin_dirichlet(double gamma) {
    Matrix p_d = Matrix::Zero(2, 2);
    Matrix p_n = Matrix::Zero(2, 2);
    Matrix p_r = Matrix::Zero(2, 2);
    Matrix lam = Matrix::Zero(2, 2);
    p_d(1, 1) = 1.0;
    p_r(0, 0) = 1.0;
    lam(0, 0) = gamma;
    return validate_conditions(p_d, p_n, p_r, lam);
}

/// f'(0) = gamma f(0), -f'(L) = -gamma f(L); exotic eigenvalue -gamma^2.
inline MatchingConditions robin_robin(double gamma) {
    Matrix z = Matrix::Zero(2, 2);
    Matrix p_r = Matrix::Identity(2, 2);
    Matrix lam = Matrix::Zero(2, 2);
    lam(0, 0) = gamma;
    lam(1, 1) = -gamma;
    return validate_conditions(z, z, p_r, lam);
}

inline MetricGraph unit_interval() { return MetricGraph(std::vector<double>{1.0}); }

/// 3-star: center owns the e- slots (0, 2, 4), leaves the e+ slots.
inline std::vector<int> star3_vertex_of_slot() { return {0, 1, 0, 2, 0, 3}; }

inline MatchingConditions star3_conditions(const std::vector<VertexCondition>& leaf_types) {
    std::vector<VertexCondition> all;
    all.push_back(VertexCondition{VertexCondition::Type::Standard, 0.0});
    for (const auto& l : leaf_types) all.push_back(l);
    return preset_conditions(star3_vertex_of_slot(), all);
}

inline MatchingConditions star3_standard_neumann() {
    VertexCondition neu{VertexCondition::Type::Neumann, 0.0};
    return star3_conditions({neu, neu, neu});
}

/// Standard center with Robin(-1), Neumann, Robin(+1) leaves.
inline MatchingConditions star3_standard_mixed() {
    return star3_conditions({VertexCondition{VertexCondition::Type::Robin, -1.0},
                             VertexCondition{VertexCondition::Type::Neumann, 0.0},
                             VertexCondition{VertexCondition::Type::Robin, 1.0}});
}

/// Path a -- b -- c with a Standard middle vertex and Robin ends.
inline MatchingConditions path2_robin_standard(double gamma_a, double gamma_c) {
    // slots: e1 = (a, b) -> (0, 1); e2 = (b, c) -> (2, 3)
    std::vector<int> vertex_of_slot = {0, 1, 1, 2};
    std::vector<VertexCondition> vc = {
        VertexCondition{VertexCondition::Type::Robin, gamma_a},
        VertexCondition{VertexCondition::Type::Standard, 0.0},
        VertexCondition{VertexCondition::Type::Robin, gamma_c},
    };
    return preset_conditions(vertex_of_slot, vc);
}

}  // namespace mgspec::fixtures
