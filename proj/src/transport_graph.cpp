#include "xval/transport_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace xval {

int TransportPath::vertex_index(const std::string& id) const {
    for (size_t i = 0; i < vertices.size(); ++i)
        if (vertices[i].id == id) return static_cast<int>(i);
    return -1;
}

double TransportPath::edge_length(int e) const {
    return (vertices[edges[e].head].location - vertices[edges[e].tail].location).norm();
}

void TransportPath::validate() const {
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges) {
        if (e.tail < 0 || e.head < 0 || e.tail >= static_cast<int>(vertices.size()) ||
            e.head >= static_cast<int>(vertices.size()))
            throw Error("UnknownVertex", "edge endpoint out of range");
        if (e.tail == e.head) throw Error("InvalidGraph", "self-loop");
        if (!(e.weight > 0)) throw Error("InvalidGraph", "edge weight must be positive");
        if (!seen.insert({e.tail, e.head}).second)
            throw Error("InvalidGraph", "duplicate edge");
    }
    for (size_t i = 0; i < edges.size(); ++i)
        if (edge_length(static_cast<int>(i)) <= 0)
            throw Error("InvalidGraph", "zero-length edge");
    if (sources.size() != source_mass.size() || sinks.size() != sink_mass.size())
        throw Error("InvalidGraph", "boundary designation mismatch");
    for (int v : sources)
        if (v < 0 || v >= static_cast<int>(vertices.size()))
            throw Error("UnknownVertex", "source vertex out of range");
    for (int v : sinks)
        if (v < 0 || v >= static_cast<int>(vertices.size()))
            throw Error("UnknownVertex", "sink vertex out of range");
}

int RouteMatrix::present_count() const {
    int n = 0;
    for (const auto& r : routes) n += r.present ? 1 : 0;
    return n;
}

namespace {

int locate_vertex(const TransportPath& g, const Eigen::VectorXd& x) {
    for (size_t v = 0; v < g.vertices.size(); ++v)
        if ((g.vertices[v].location - x).norm() < 1e-12) return static_cast<int>(v);
    return -1;
}

BalanceReport balance_against(const TransportPath& g, const std::vector<double>& boundary,
                              double eps) {
    BalanceReport rep;
    rep.residuals.assign(g.vertices.size(), 0.0);
    for (const auto& e : g.edges) {
        rep.residuals[e.tail] += e.weight;  // outflow
        rep.residuals[e.head] -= e.weight;  // inflow
    }
    for (size_t v = 0; v < g.vertices.size(); ++v) rep.residuals[v] -= boundary[v];
    rep.max_abs_residual = 0;
    for (double r : rep.residuals) rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(r));
    rep.valid = rep.max_abs_residual <= eps;
    return rep;
}

}  // namespace

BalanceReport validate_balance(const TransportPath& g, const AtomicMeasure& a,
                               const AtomicMeasure& b, double eps) {
    std::vector<double> boundary(g.vertices.size(), 0.0);
    for (const auto& atom : a.atoms) {
        int v = locate_vertex(g, atom.location);
        if (v < 0) throw Error("UnknownVertex", "source atom is not a graph vertex");
        boundary[v] += atom.mass;
    }
    for (const auto& atom : b.atoms) {
        int v = locate_vertex(g, atom.location);
        if (v < 0) throw Error("UnknownVertex", "sink atom is not a graph vertex");
        boundary[v] -= atom.mass;
    }
    return balance_against(g, boundary, eps);
}

BalanceReport validate_balance(const TransportPath& g, double eps) {
    std::vector<double> boundary(g.vertices.size(), 0.0);
    for (size_t i = 0; i < g.sources.size(); ++i) boundary[g.sources[i]] += g.source_mass[i];
    for (size_t j = 0; j < g.sinks.size(); ++j) boundary[g.sinks[j]] -= g.sink_mass[j];
    return balance_against(g, boundary, eps);
}

namespace {

// DFS over outgoing edges; keeps searching after the first complete path so
// a second completion can be detected.
void search_paths(const TransportPath& g, const std::vector<std::vector<int>>& out_edges,
                  int v, int target, std::vector<int>& edge_stack, std::vector<int>& vert_stack,
                  std::vector<char>& on_stack, int& found, Route& route) {
    if (v == target) {
        ++found;
        if (found == 1) {
            route.present = true;
            route.edge_ids = edge_stack;
            route.vertex_ids = vert_stack;
        }
        return;
    }
    for (int e : out_edges[v]) {
        int w = g.edges[e].head;
        if (on_stack[w]) continue;
        on_stack[w] = 1;
        edge_stack.push_back(e);
        vert_stack.push_back(w);
        search_paths(g, out_edges, w, target, edge_stack, vert_stack, on_stack, found, route);
        vert_stack.pop_back();
        edge_stack.pop_back();
        on_stack[w] = 0;
        if (found > 1) return;
    }
}

}  // namespace

RouteMatrix route_matrix(const TransportPath& g) {
    g.validate();
    RouteMatrix rm;
    rm.k = g.k();
    rm.l = g.l();
    rm.routes.assign(static_cast<size_t>(rm.k) * rm.l, Route{});

    std::vector<std::vector<int>> out_edges(g.vertices.size());
    for (size_t e = 0; e < g.edges.size(); ++e) out_edges[g.edges[e].tail].push_back(static_cast<int>(e));

    for (int i = 0; i < rm.k; ++i) {
        for (int j = 0; j < rm.l; ++j) {
            std::vector<int> edge_stack, vert_stack{g.sources[i]};
            std::vector<char> on_stack(g.vertices.size(), 0);
            on_stack[g.sources[i]] = 1;
            int found = 0;
            search_paths(g, out_edges, g.sources[i], g.sinks[j], edge_stack, vert_stack,
                         on_stack, found, rm.at(i, j));
            if (found > 1)
                throw Error("AmbiguousRoute", "two distinct directed paths from x" +
                                                  std::to_string(i + 1) + " to y" +
                                                  std::to_string(j + 1));
        }
    }
    return rm;
}

int euler_characteristic(const TransportPath& g) {
    return static_cast<int>(g.vertices.size()) - static_cast<int>(g.edges.size());
}

TransportPath hub_path(const AtomicMeasure& a, const AtomicMeasure& b,
                       const Eigen::VectorXd& hub) {
    TransportPath g;
    for (const auto& atom : a.atoms)
        if ((atom.location - hub).norm() < 1e-12)
            throw Error("HubCollision", "hub coincides with a source");
    for (const auto& atom : b.atoms)
        if ((atom.location - hub).norm() < 1e-12)
            throw Error("HubCollision", "hub coincides with a sink");

    for (size_t i = 0; i < a.atoms.size(); ++i)
        g.vertices.push_back({"x" + std::to_string(i + 1), a.atoms[i].location});
    for (size_t j = 0; j < b.atoms.size(); ++j)
        g.vertices.push_back({"y" + std::to_string(j + 1), b.atoms[j].location});
    int hub_idx = static_cast<int>(g.vertices.size());
    g.vertices.push_back({"hub", hub});

    for (size_t i = 0; i < a.atoms.size(); ++i) {
        g.edges.push_back({static_cast<int>(i), hub_idx, a.atoms[i].mass});
        g.sources.push_back(static_cast<int>(i));
        g.source_mass.push_back(a.atoms[i].mass);
    }
    for (size_t j = 0; j < b.atoms.size(); ++j) {
        int v = static_cast<int>(a.atoms.size() + j);
        g.edges.push_back({hub_idx, v, b.atoms[j].mass});
        g.sinks.push_back(v);
        g.sink_mass.push_back(b.atoms[j].mass);
    }
    g.validate();
    return g;
}

double m_alpha_cost(const TransportPath& g, double alpha) {
    double cost = 0;
    for (size_t e = 0; e < g.edges.size(); ++e)
        cost += std::pow(g.edges[e].weight, alpha) * g.edge_length(static_cast<int>(e));
    return cost;
}

std::string combinatorial_signature(const RouteMatrix& routes, int edge_count,
                                    const std::vector<double>* weights) {
    std::ostringstream os;
    os << routes.k << "x" << routes.l << ";";
    for (const auto& r : routes.routes) os << (r.present ? '1' : '0');
    os << ";";

    // per edge: the sorted set of routes through it (plus the weight when given)
    std::vector<std::string> descriptors;
    for (int e = 0; e < edge_count; ++e) {
        std::ostringstream d;
        for (int i = 0; i < routes.k; ++i)
            for (int j = 0; j < routes.l; ++j) {
                const Route& r = routes.at(i, j);
                if (!r.present) continue;
                if (std::find(r.edge_ids.begin(), r.edge_ids.end(), e) != r.edge_ids.end())
                    d << "(" << i << "," << j << ")";
            }
        if (weights) {
            d.precision(12);
            d << "|w=" << (*weights)[e];
        }
        descriptors.push_back(d.str());
    }
    std::sort(descriptors.begin(), descriptors.end());
    for (const auto& d : descriptors) os << d << ";";
    return os.str();
}

std::string combinatorial_signature(const TransportPath& g) {
    RouteMatrix rm = route_matrix(g);
    std::vector<double> weights;
    weights.reserve(g.edges.size());
    for (const auto& e : g.edges) weights.push_back(e.weight);
    return combinatorial_signature(rm, static_cast<int>(g.edges.size()), &weights);
}

}  // namespace xval
