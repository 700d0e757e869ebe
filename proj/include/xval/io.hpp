#pragma once

#include <string>

#include "xval/economy.hpp"
#include "xval/exchange_value.hpp"
#include "xval/h_optimizer.hpp"
#include "xval/transport_graph.hpp"

// vendored single-header nlohmann/json
#include "json.hpp"

namespace xval {

/// Economy JSON: { "dimension", "goods": [{"id","location"}],
///   "consumers": [{"id","location","wealth","prices","utility"}] }.
/// Schema violations throw SchemaError naming the offending JSON pointer.
Economy parse_economy(const std::string& text);
std::string emit_economy(const Economy& economy, bool pretty = false);

/// Graph JSON: { "vertices": [{"id","location"}], "edges":
///   [{"tail","head","weight"}], "sources": [{"vertex","mass"}],
///   "sinks": [{"vertex","mass"}] }.
TransportPath parse_graph(const std::string& text);
std::string emit_graph(const TransportPath& g, bool pretty = false);

/// Plan JSON: { "plan": [[...], ...] } row-major, goods x consumers.
TransportPlan parse_plan(const std::string& text);
std::string emit_plan(const TransportPlan& q, bool pretty = false);

/// DOT digraph with edge labels "w=<weight>".
std::string export_dot(const TransportPath& g);

nlohmann::json valuation_to_json(const ValuationResult& r);
nlohmann::json criterion_to_json(const CriterionReport& r);
nlohmann::json h_result_to_json(const HResult& r);

std::string read_file(const std::string& path);

}  // namespace xval
