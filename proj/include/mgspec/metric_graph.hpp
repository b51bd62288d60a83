#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "mgspec/errors.hpp"

namespace mgspec {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Numerical tolerances shared across the library.
struct Tolerances {
    double proj = 1e-10;   ///< projector axiom defects, absolute operator norm
    double rank = 1e-8;    ///< rank decisions, relative to the largest singular value
    double angle = 1e-8;   ///< principal-angle threshold for subspace intersection
};

struct Edge {
    double length = 0.0;
    int endpoint_minus_index = -1;  ///< boundary slot of the x = 0 endpoint
    int endpoint_plus_index = -1;   ///< boundary slot of the x = length endpoint
};

/// A finite metric graph: edges with positive lengths and a fixed assignment
/// of the two endpoints of each edge to slots of the boundary space.
/// The slot ordering is frozen at construction and shared by every trace
/// vector built for this graph.
class MetricGraph {
public:
    /// Edges with the default slot convention (e1-, e1+, e2-, e2+, ...).
    explicit MetricGraph(std::vector<double> lengths);

    /// Fully explicit construction; the 2|E| endpoint indices must form a
    /// permutation of 0..2|E|-1.
    explicit MetricGraph(std::vector<Edge> edges);

    int num_edges() const { return static_cast<int>(edges_.size()); }
    int boundary_dim() const { return 2 * num_edges(); }
    const Edge& edge(int e) const { return edges_.at(e); }
    const std::vector<Edge>& edges() const { return edges_; }

    double total_length() const;
    double max_length() const;

    /// Graph with every length multiplied by factor > 0.
    MetricGraph scaled(double factor) const;

private:
    void check_invariants() const;

    std::vector<Edge> edges_;
};

}  // namespace mgspec
