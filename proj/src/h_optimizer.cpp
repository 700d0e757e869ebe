#include "xval/h_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace xval {

double h_cost(const Economy& economy, const TransportPath& g, const TransportPlan& qbar,
              double alpha, double sigma) {
    return m_alpha_cost(g, alpha) - sigma * exchange_value(economy, g, qbar).value;
}

namespace {

// union-find acyclicity check on the undirected support
bool is_forest(int nv, const std::vector<std::pair<int, int>>& edges) {
    std::vector<int> parent(nv);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const auto& [a, b] : edges) {
        int ra = find(a), rb = find(b);
        if (ra == rb) return false;
        parent[ra] = rb;
    }
    return true;
}

// Realize a template as a path with placeholder geometry and unit weights so
// the route machinery can be reused for its weight-free signature.
TransportPath placeholder_path(const TopologyCandidate& cand) {
    TransportPath g;
    int nv = cand.k + cand.l + cand.interior;
    for (int v = 0; v < nv; ++v) {
        Eigen::VectorXd loc(2);
        loc << static_cast<double>(v + 1), static_cast<double>((v + 1) * (v + 1));
        std::string id = v < cand.k                ? "x" + std::to_string(v + 1)
                         : v < cand.k + cand.l     ? "y" + std::to_string(v - cand.k + 1)
                                                   : "h" + std::to_string(v - cand.k - cand.l + 1);
        g.vertices.push_back({id, loc});
    }
    for (const auto& [t, h] : cand.edges) g.edges.push_back({t, h, 1.0});
    for (int i = 0; i < cand.k; ++i) {
        g.sources.push_back(i);
        g.source_mass.push_back(1.0);
    }
    for (int j = 0; j < cand.l; ++j) {
        g.sinks.push_back(cand.k + j);
        g.sink_mass.push_back(1.0);
    }
    return g;
}

}  // namespace

std::vector<TopologyCandidate> enumerate_topologies(int k, int l, int max_interior) {
    if (k < 1 || l < 1 || k > 3 || l > 3 || max_interior > 2)
        throw Error("SizeLimit", "topology enumeration supports k, l <= 3 and at most 2 interior vertices");
    if (max_interior < 0) max_interior = 0;

    std::vector<TopologyCandidate> out;
    std::set<std::string> seen;

    for (int m = 0; m <= max_interior; ++m) {
        const int nv = k + l + m;
        // candidate edges: source->sink, source->interior, interior->sink,
        // interior->interior in one fixed order
        std::vector<std::pair<int, int>> pool;
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < l; ++j) pool.push_back({i, k + j});
        for (int i = 0; i < k; ++i)
            for (int h = 0; h < m; ++h) pool.push_back({i, k + l + h});
        for (int h = 0; h < m; ++h)
            for (int j = 0; j < l; ++j) pool.push_back({k + l + h, k + j});
        if (m == 2) pool.push_back({k + l, k + l + 1});

        const int np = static_cast<int>(pool.size());
        for (std::uint64_t mask = 1; mask < (std::uint64_t(1) << np); ++mask) {
            if (static_cast<int>(__builtin_popcountll(mask)) > nv - 1) continue;
            std::vector<std::pair<int, int>> edges;
            std::vector<int> indeg(nv, 0), outdeg(nv, 0);
            for (int e = 0; e < np; ++e)
                if (mask >> e & 1) {
                    edges.push_back(pool[e]);
                    ++outdeg[pool[e].first];
                    ++indeg[pool[e].second];
                }
            bool ok = true;
            for (int i = 0; i < k && ok; ++i) ok = outdeg[i] >= 1;
            for (int j = 0; j < l && ok; ++j) ok = indeg[k + j] >= 1;
            for (int h = 0; h < m && ok; ++h)
                ok = indeg[k + l + h] >= 1 && outdeg[k + l + h] >= 1 &&
                     indeg[k + l + h] + outdeg[k + l + h] >= 3;
            if (!ok || !is_forest(nv, edges)) continue;

            TopologyCandidate cand;
            cand.k = k;
            cand.l = l;
            cand.interior = m;
            cand.edges = edges;
            TransportPath ph = placeholder_path(cand);
            RouteMatrix rm = route_matrix(ph);
            cand.signature = combinatorial_signature(rm, static_cast<int>(edges.size()), nullptr);
            if (seen.insert(cand.signature).second) out.push_back(std::move(cand));
        }
    }
    std::sort(out.begin(), out.end(), [](const TopologyCandidate& a, const TopologyCandidate& b) {
        return a.signature < b.signature;
    });
    return out;
}

bool instantiate_candidate(const TopologyCandidate& cand, const AtomicMeasure& a,
                           const AtomicMeasure& b, const TransportPlan& qbar,
                           TransportPath& out) {
    if (static_cast<int>(a.size()) != cand.k || static_cast<int>(b.size()) != cand.l)
        throw Error("DimensionMismatch", "boundary measures do not match the template");
    if (qbar.rows() != cand.k || qbar.cols() != cand.l)
        throw Error("DimensionMismatch", "plan shape does not match the template");

    TransportPath ph = placeholder_path(cand);
    RouteMatrix rm = route_matrix(ph);

    const double eps = default_tolerances().balance;
    for (int i = 0; i < cand.k; ++i)
        for (int j = 0; j < cand.l; ++j)
            if (qbar(i, j) > eps && !rm.at(i, j).present) return false;

    std::vector<double> weights(cand.edges.size(), 0.0);
    for (int i = 0; i < cand.k; ++i)
        for (int j = 0; j < cand.l; ++j) {
            const Route& r = rm.at(i, j);
            if (!r.present) continue;
            for (int e : r.edge_ids) weights[e] += qbar(i, j);
        }
    for (double w : weights)
        if (w <= eps) return false;

    TransportPath g;
    const int dim = static_cast<int>(a.atoms.front().location.size());
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    double total = 0;
    for (const auto& atom : a.atoms) {
        centroid += atom.mass * atom.location;
        total += atom.mass;
    }
    for (const auto& atom : b.atoms) {
        centroid += atom.mass * atom.location;
        total += atom.mass;
    }
    centroid /= 2.0 * total;

    for (int i = 0; i < cand.k; ++i)
        g.vertices.push_back({"x" + std::to_string(i + 1), a.atoms[i].location});
    for (int j = 0; j < cand.l; ++j)
        g.vertices.push_back({"y" + std::to_string(j + 1), b.atoms[j].location});
    for (int h = 0; h < cand.interior; ++h) {
        Eigen::VectorXd loc = centroid;
        loc[0] += 1e-3 * h;  // keep multiple interior vertices apart initially
        g.vertices.push_back({"h" + std::to_string(h + 1), loc});
    }
    for (size_t e = 0; e < cand.edges.size(); ++e)
        g.edges.push_back({cand.edges[e].first, cand.edges[e].second, weights[e]});
    for (int i = 0; i < cand.k; ++i) {
        g.sources.push_back(i);
        g.source_mass.push_back(a.atoms[i].mass);
    }
    for (int j = 0; j < cand.l; ++j) {
        g.sinks.push_back(cand.k + j);
        g.sink_mass.push_back(b.atoms[j].mass);
    }
    g.validate();
    if (!validate_balance(g, default_tolerances().balance).valid) return false;
    out = std::move(g);
    return true;
}

namespace {

TransportPath merge_close_vertices(const TransportPath& g, double eps) {
    const int nv = static_cast<int>(g.vertices.size());
    std::vector<int> rep(nv);
    std::iota(rep.begin(), rep.end(), 0);
    for (int v = 0; v < nv; ++v)
        for (int w = 0; w < v; ++w)
            if ((g.vertices[v].location - g.vertices[w].location).norm() < eps) {
                rep[v] = rep[w];
                break;
            }

    bool any = false;
    for (int v = 0; v < nv; ++v) any |= rep[v] != v;
    if (!any) return g;

    TransportPath out;
    std::vector<int> remap(nv, -1);
    for (int v = 0; v < nv; ++v)
        if (rep[v] == v) {
            remap[v] = static_cast<int>(out.vertices.size());
            out.vertices.push_back(g.vertices[v]);
        }
    for (int v = 0; v < nv; ++v) remap[v] = remap[rep[v]];

    std::map<std::pair<int, int>, double> merged;
    for (const auto& e : g.edges) {
        int t = remap[e.tail], h = remap[e.head];
        if (t == h) continue;
        merged[{t, h}] += e.weight;
    }
    for (const auto& [th, w] : merged) out.edges.push_back({th.first, th.second, w});
    for (size_t i = 0; i < g.sources.size(); ++i) {
        out.sources.push_back(remap[g.sources[i]]);
        out.source_mass.push_back(g.source_mass[i]);
    }
    for (size_t j = 0; j < g.sinks.size(); ++j) {
        out.sinks.push_back(remap[g.sinks[j]]);
        out.sink_mass.push_back(g.sink_mass[j]);
    }
    return out;
}

}  // namespace

GeometryResult optimize_geometry(const TransportPath& g, const std::vector<int>& free_vertices,
                                 double alpha, double eps_grad, int max_iter) {
    GeometryResult res;
    res.path = g;
    if (free_vertices.empty()) {
        res.m_alpha = m_alpha_cost(g, alpha);
        res.converged = true;
        return res;
    }

    auto cost = [&](const TransportPath& p) { return m_alpha_cost(p, alpha); };
    auto gradient = [&](const TransportPath& p) {
        std::vector<Eigen::VectorXd> grad(free_vertices.size());
        for (size_t f = 0; f < free_vertices.size(); ++f)
            grad[f] = Eigen::VectorXd::Zero(p.vertices[free_vertices[f]].location.size());
        for (size_t e = 0; e < p.edges.size(); ++e) {
            Eigen::VectorXd d = p.vertices[p.edges[e].head].location -
                                p.vertices[p.edges[e].tail].location;
            double len = d.norm();
            if (len < 1e-14) continue;
            Eigen::VectorXd unit = std::pow(p.edges[e].weight, alpha) * d / len;
            for (size_t f = 0; f < free_vertices.size(); ++f) {
                if (free_vertices[f] == p.edges[e].head) grad[f] += unit;
                if (free_vertices[f] == p.edges[e].tail) grad[f] -= unit;
            }
        }
        return grad;
    };

    double value = cost(res.path);
    double step = 0.5;
    for (int it = 0; it < max_iter; ++it) {
        ++res.iterations;
        auto grad = gradient(res.path);
        double gnorm = 0;
        for (const auto& gv : grad) gnorm = std::max(gnorm, gv.lpNorm<Eigen::Infinity>());
        if (gnorm < eps_grad) {
            res.converged = true;
            break;
        }
        bool moved = false;
        for (int ls = 0; ls < 50; ++ls) {
            TransportPath trial = res.path;
            for (size_t f = 0; f < free_vertices.size(); ++f)
                trial.vertices[free_vertices[f]].location -= step * grad[f];
            double v = cost(trial);
            if (v < value - 1e-14) {
                res.path = std::move(trial);
                value = v;
                moved = true;
                step *= 1.3;
                break;
            }
            step *= 0.5;
        }
        if (!moved) {
            res.converged = true;
            break;
        }
    }
    res.path = merge_close_vertices(res.path, 1e-7);
    res.m_alpha = m_alpha_cost(res.path, alpha);
    return res;
}

HResult optimize_h(const Economy& economy, double alpha, double sigma, int max_interior) {
    HResult result;
    result.alpha = alpha;
    result.sigma = sigma;

    DemandProfile profile = demand_profile(economy);
    auto templates = enumerate_topologies(economy.k(), economy.l(), max_interior);

    for (const auto& cand : templates) {
        TransportPath g;
        if (!instantiate_candidate(cand, profile.source, profile.consumer, profile.qbar, g))
            continue;
        std::vector<int> free_vertices;
        for (int h = 0; h < cand.interior; ++h) free_vertices.push_back(cand.k + cand.l + h);
        GeometryResult geo = optimize_geometry(g, free_vertices, alpha);

        CandidateOutcome out;
        out.candidate = cand;
        out.path = geo.path;
        out.m_alpha = geo.m_alpha;
        out.geometry_converged = geo.converged;
        try {
            out.exchange = exchange_value(economy, geo.path, profile.qbar).value;
        } catch (const Error&) {
            continue;  // merged geometry incompatible with the plan
        }
        out.h = out.m_alpha - sigma * out.exchange;
        result.candidates.push_back(std::move(out));
    }

    if (result.candidates.empty())
        throw Error("EmptyCandidateSet", "no template is compatible with the demand plan");

    std::sort(result.candidates.begin(), result.candidates.end(),
              [](const CandidateOutcome& a, const CandidateOutcome& b) {
                  if (a.h != b.h) return a.h < b.h;
                  return a.candidate.signature < b.candidate.signature;
              });
    result.best = 0;
    return result;
}

}  // namespace xval
