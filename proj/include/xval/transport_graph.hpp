#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "xval/common.hpp"
#include "xval/measure.hpp"

namespace xval {

/// Weighted directed graph moving one atomic measure to another.  Sources
/// and sinks are designated vertices carrying the boundary masses; every
/// vertex is expected to satisfy the mass balance equation.
struct TransportPath {
    struct Vertex {
        std::string id;
        Eigen::VectorXd location;
    };
    struct Edge {
        int tail = -1;
        int head = -1;
        double weight = 0;
    };

    std::vector<Vertex> vertices;
    std::vector<Edge> edges;
    std::vector<int> sources;        // vertex indices of x_1..x_k
    std::vector<double> source_mass; // m_i
    std::vector<int> sinks;          // vertex indices of y_1..y_l
    std::vector<double> sink_mass;   // n_j

    int k() const { return static_cast<int>(sources.size()); }
    int l() const { return static_cast<int>(sinks.size()); }
    int vertex_index(const std::string& id) const; // -1 when absent
    double edge_length(int e) const;

    /// Structural checks: distinct endpoints, positive weights, at most one
    /// edge per ordered pair, boundary designations in range.
    void validate() const;
};

/// Per-pair directed path from x_i to y_j, or absent.
struct Route {
    bool present = false;
    std::vector<int> edge_ids;
    std::vector<int> vertex_ids;
};

struct RouteMatrix {
    int k = 0, l = 0;
    std::vector<Route> routes; // row-major, k*l

    const Route& at(int i, int j) const { return routes[i * l + j]; }
    Route& at(int i, int j) { return routes[i * l + j]; }
    int present_count() const;
};

struct BalanceReport {
    std::vector<double> residuals; // per vertex, outflow - inflow - boundary term
    double max_abs_residual = 0;
    bool valid = false;
};

/// Residual of the balance equation at every vertex of G against the given
/// boundary measures.  Throws UnknownVertex when a measure point is not a
/// vertex of G.
BalanceReport validate_balance(const TransportPath& g, const AtomicMeasure& a,
                               const AtomicMeasure& b,
                               double eps = default_tolerances().balance);

/// Balance check against G's own designated boundary masses.
BalanceReport validate_balance(const TransportPath& g,
                               double eps = default_tolerances().balance);

/// Directed path from each source to each sink, found by exhaustive search.
/// Throws AmbiguousRoute when some pair admits two distinct directed paths.
RouteMatrix route_matrix(const TransportPath& g);

/// |V(G)| - |E(G)|.
int euler_characteristic(const TransportPath& g);

/// Star path through a hub: edges [x_i, hub] weighted m_i and [hub, y_j]
/// weighted n_j.  Throws HubCollision when the hub coincides with a boundary
/// point.
TransportPath hub_path(const AtomicMeasure& a, const AtomicMeasure& b,
                       const Eigen::VectorXd& hub);

/// Sum over edges of w(e)^alpha * length(e).
double m_alpha_cost(const TransportPath& g, double alpha);

/// Canonical code for the weighted combinatorial structure: route presence
/// pattern plus, per edge, the set of routes through it and the edge weight.
/// Invariant under vertex relabeling and relocation of interior vertices.
std::string combinatorial_signature(const TransportPath& g);

/// Weight-free variant used for topology templates.
std::string combinatorial_signature(const RouteMatrix& routes, int edge_count,
                                    const std::vector<double>* weights);

}  // namespace xval
