#pragma once

#include <string>
#include <vector>

#include "xval/economy.hpp"
#include "xval/exchange_value.hpp"
#include "xval/transport_graph.hpp"

namespace xval {

/// Combinatorial tree template connecting k sources to l sinks through up to
/// a few interior vertices.  Vertex numbering: 0..k-1 sources, k..k+l-1
/// sinks, then interior vertices.
struct TopologyCandidate {
    int k = 0, l = 0, interior = 0;
    std::vector<std::pair<int, int>> edges; // (tail, head)
    std::string signature;                  // weight-free combinatorial code
};

struct GeometryResult {
    TransportPath path;
    double m_alpha = 0;
    bool converged = false;
    int iterations = 0;
};

struct CandidateOutcome {
    TopologyCandidate candidate;
    TransportPath path;          // optimized geometry
    double m_alpha = 0;
    double exchange = 0;         // V, constant within the topological class
    double h = 0;                // m_alpha - sigma * exchange
    bool geometry_converged = true;
};

struct HResult {
    double alpha = 0, sigma = 0;
    std::vector<CandidateOutcome> candidates; // sorted by h, signature tie-break
    int best = -1;
    std::string candidate_family = "tree templates, <=2 interior vertices";
};

/// M_alpha(G) - sigma * V(G).
double h_cost(const Economy& economy, const TransportPath& g, const TransportPlan& qbar,
              double alpha, double sigma);

/// All route-unique tree templates with interior degree >= 3, plus the
/// direct-edge templates, deduplicated by signature.  Caps: k, l <= 3,
/// max_interior <= 2 (throws SizeLimit beyond).
std::vector<TopologyCandidate> enumerate_topologies(int k, int l, int max_interior);

/// Realizes a template against boundary data: boundary coordinates from the
/// measures, interior vertices at the weighted centroid, edge weights induced
/// from qbar through the route incidence.  Returns false when the template is
/// not compatible with qbar or induces a zero-weight edge.
bool instantiate_candidate(const TopologyCandidate& cand, const AtomicMeasure& a,
                           const AtomicMeasure& b, const TransportPlan& qbar,
                           TransportPath& out);

/// Minimizes M_alpha over the listed free (interior) vertex coordinates by
/// gradient descent with backtracking.  Vertices that collapse onto a
/// neighbor are merged.
GeometryResult optimize_geometry(const TransportPath& g, const std::vector<int>& free_vertices,
                                 double alpha, double eps_grad = 1e-8, int max_iter = 5000);

/// Per-topology geometric optimization and valuation over the enumerated
/// family; candidates incompatible with qbar are skipped.  Throws
/// EmptyCandidateSet when nothing remains.
HResult optimize_h(const Economy& economy, double alpha, double sigma, int max_interior);

}  // namespace xval
