#include "mgspec/metric_graph.hpp"

#include <algorithm>
#include <cmath>

namespace mgspec {

MetricGraph::MetricGraph(std::vector<double> lengths) {
    edges_.reserve(lengths.size());
    int slot = 0;
    for (double l : lengths) {
        edges_.push_back(Edge{l, slot, slot + 1});
        slot += 2;
    }
    check_invariants();
}

MetricGraph::MetricGraph(std::vector<Edge> edges) : edges_(std::move(edges)) {
    check_invariants();
}

void MetricGraph::check_invariants() const {
    if (edges_.empty()) throw DimensionMismatch("metric graph needs at least one edge");
    const int n = boundary_dim();
    std::vector<int> used(n, 0);
    for (const Edge& e : edges_) {
        if (!(e.length > 0.0) || !std::isfinite(e.length))
            throw DimensionMismatch("edge length must be strictly positive and finite");
        for (int idx : {e.endpoint_minus_index, e.endpoint_plus_index}) {
            if (idx < 0 || idx >= n)
                throw DimensionMismatch("endpoint index out of range");
            ++used[idx];
        }
    }
    for (int c : used)
        if (c != 1) throw DimensionMismatch("endpoint indices must form a permutation of the boundary slots");
}

double MetricGraph::total_length() const {
    double t = 0.0;
    for (const Edge& e : edges_) t += e.length;
    return t;
}

double MetricGraph::max_length() const {
    double m = 0.0;
    for (const Edge& e : edges_) m = std::max(m, e.length);
    return m;
}

MetricGraph MetricGraph::scaled(double factor) const {
    if (!(factor > 0.0)) throw DimensionMismatch("scale factor must be positive");
    std::vector<Edge> scaled_edges = edges_;
    for (Edge& e : scaled_edges) e.length *= factor;
    return MetricGraph(std::move(scaled_edges));
}

}  // namespace mgspec
