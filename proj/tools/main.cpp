#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "xval/economy.hpp"
#include "xval/exchange_value.hpp"
#include "xval/h_optimizer.hpp"
#include "xval/io.hpp"
#include "xval/plan_polytope.hpp"
#include "xval/transport_graph.hpp"

namespace {

using nlohmann::json;

struct Options {
    std::string economy_path, graph_path, plan_path;
    double alpha = 1.0;
    double sigma = 0.0;
    std::optional<double> tol;
    int max_interior = 2;
    bool pretty = false;
};

void emit(const json& j, bool pretty) {
    std::cout << (pretty ? j.dump(2) : j.dump()) << "\n";
}

int error_code(const xval::Error& e) {
    const std::string& k = e.kind();
    if (k == "SchemaError" || k == "FileNotFound" || k == "DimensionMismatch" ||
        k == "InvalidGraph" || k == "UnknownVertex" || k == "InvalidEconomy")
        return 2;
    return 3;
}

xval::Tolerances tolerances(const Options& opt) {
    xval::Tolerances t = xval::default_tolerances();
    if (opt.tol) {
        t.balance = t.rank = t.interior = t.opt = *opt.tol;
    }
    return t;
}

json meta(const Options& opt) {
    xval::Tolerances t = tolerances(opt);
    return json{{"tolerances",
                 {{"balance", t.balance},
                  {"rank", t.rank},
                  {"interior", t.interior},
                  {"opt", t.opt},
                  {"positive", t.positive}}}};
}

xval::Economy load_economy(const Options& opt) {
    if (opt.economy_path.empty())
        throw xval::Error("SchemaError", "--economy is required for this subcommand");
    return xval::parse_economy(xval::read_file(opt.economy_path));
}

xval::TransportPath load_graph(const Options& opt) {
    if (opt.graph_path.empty())
        throw xval::Error("SchemaError", "--graph is required for this subcommand");
    return xval::parse_graph(xval::read_file(opt.graph_path));
}

xval::TransportPlan load_plan(const Options& opt, const xval::Economy* economy) {
    if (!opt.plan_path.empty()) return xval::parse_plan(xval::read_file(opt.plan_path));
    if (!economy)
        throw xval::Error("SchemaError", "--plan is required when no economy is given");
    return xval::demand_profile(*economy).qbar;
}

json matrix_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

int run_demand(const Options& opt) {
    xval::Economy economy = load_economy(opt);
    xval::DemandProfile profile = xval::demand_profile(economy);
    json j;
    j["qbar"] = matrix_json(profile.qbar);
    j["floors"] = profile.floors;
    j["scale"] = profile.scale;
    j["source_masses"] = json::array();
    for (const auto& atom : profile.source.atoms) j["source_masses"].push_back(atom.mass);
    j["consumer_masses"] = json::array();
    for (const auto& atom : profile.consumer.atoms) j["consumer_masses"].push_back(atom.mass);
    j["meta"] = meta(opt);
    emit(j, opt.pretty);
    return 0;
}

int run_routes(const Options& opt) {
    xval::TransportPath g = load_graph(opt);
    xval::RouteMatrix rm = xval::route_matrix(g);
    json j;
    j["k"] = rm.k;
    j["l"] = rm.l;
    json rows = json::array();
    for (int i = 0; i < rm.k; ++i) {
        json row = json::array();
        for (int c = 0; c < rm.l; ++c) {
            const xval::Route& r = rm.at(i, c);
            if (!r.present)
                row.push_back(nullptr);
            else {
                json vertices = json::array();
                for (int v : r.vertex_ids) vertices.push_back(g.vertices[v].id);
                row.push_back(json{{"edges", r.edge_ids}, {"vertices", vertices}});
            }
        }
        rows.push_back(row);
    }
    j["routes"] = rows;
    j["meta"] = meta(opt);
    emit(j, opt.pretty);
    return 0;
}

int run_dims(const Options& opt) {
    xval::TransportPath g = load_graph(opt);
    xval::TransportPlan qbar;
    if (!opt.plan_path.empty()) {
        qbar = xval::parse_plan(xval::read_file(opt.plan_path));
    } else {
        // unique compatible plan surrogate: solve the edge equations from a
        // feasible point found by the route structure, falling back to the
        // boundary-product plan when routes are disjoint
        xval::RouteMatrix rm = xval::route_matrix(g);
        qbar = xval::TransportPlan::Zero(rm.k, rm.l);
        // distribute each source mass across its present routes proportionally
        // to the sink masses; exact when the polytope is a product
        for (int i = 0; i < rm.k; ++i) {
            double denom = 0;
            for (int j = 0; j < rm.l; ++j)
                if (rm.at(i, j).present) denom += g.sink_mass[j];
            for (int j = 0; j < rm.l; ++j)
                if (rm.at(i, j).present)
                    qbar(i, j) = g.source_mass[i] * g.sink_mass[j] / denom;
        }
    }
    xval::ConstraintSystem cs = xval::build_constraints(g, qbar);
    int rank_dim = xval::polytope_dimension_rank(cs);
    int formula_dim = xval::polytope_dimension_formula(g);
    json j;
    j["rank_dim"] = rank_dim;
    j["formula_dim"] = formula_dim;
    j["agree"] = rank_dim == formula_dim;
    j["meta"] = meta(opt);
    emit(j, opt.pretty);
    return 0;
}

int run_value(const Options& opt) {
    xval::Economy economy = load_economy(opt);
    xval::TransportPath g = load_graph(opt);
    xval::TransportPlan qbar = load_plan(opt, &economy);
    xval::Tolerances tol = tolerances(opt);
    xval::ValuationResult res = xval::exchange_value(economy, g, qbar, tol);
    res.uniqueness = xval::uniqueness_probe(economy, g, qbar, res, tol);
    json j = xval::valuation_to_json(res);
    j["meta"] = meta(opt);
    emit(j, opt.pretty);
    return 0;
}

int run_criteria(const Options& opt) {
    xval::Economy economy = load_economy(opt);
    xval::TransportPath g = load_graph(opt);
    xval::TransportPlan qbar = load_plan(opt, &economy);
    json j;
    j["criteria"] = json::array();
    j["criteria"].push_back(xval::criterion_to_json(xval::criterion_quantity_only(economy)));
    j["criteria"].push_back(xval::criterion_to_json(xval::criterion_collinear_prices(economy)));
    j["criteria"].push_back(xval::criterion_to_json(xval::criterion_disjoint_routes(g)));
    j["criteria"].push_back(
        xval::criterion_to_json(xval::criterion_positive(economy, g, qbar)));
    j["meta"] = meta(opt);
    emit(j, opt.pretty);
    return 0;
}

int run_cost(const Options& opt) {
    xval::TransportPath g = load_graph(opt);
    json j;
    j["alpha"] = opt.alpha;
    j["m_alpha"] = xval::m_alpha_cost(g, opt.alpha);
    j["meta"] = meta(opt);
    emit(j, opt.pretty);
    return 0;
}

int run_optimize(const Options& opt) {
    xval::Economy economy = load_economy(opt);
    xval::HResult res = xval::optimize_h(economy, opt.alpha, opt.sigma, opt.max_interior);
    json j = xval::h_result_to_json(res);
    j["meta"] = meta(opt);
    emit(j, opt.pretty);
    return 0;
}

int run_export_dot(const Options& opt) {
    xval::TransportPath g = load_graph(opt);
    std::cout << xval::export_dot(g);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exchange value of ramified transport networks"};
    app.require_subcommand(1);

    Options opt;
    int (*handler)(const Options&) = nullptr;

    auto add = [&](const char* name, const char* desc, int (*fn)(const Options&),
                   bool economy, bool graph) {
        CLI::App* sub = app.add_subcommand(name, desc);
        if (economy) sub->add_option("--economy", opt.economy_path, "economy JSON file");
        if (graph) sub->add_option("--graph", opt.graph_path, "graph JSON file");
        sub->add_option("--plan", opt.plan_path, "plan JSON file");
        sub->add_option("--alpha", opt.alpha, "cost concavity exponent");
        sub->add_option("--sigma", opt.sigma, "exchange-value weight");
        sub->add_option("--tol", opt.tol, "override solver tolerances");
        sub->add_option("--max-interior", opt.max_interior, "interior vertex cap");
        sub->add_flag("--json", "JSON output (default)");
        sub->add_flag("--pretty", opt.pretty, "pretty-print JSON");
        sub->callback([&handler, fn] { handler = fn; });
        return sub;
    };

    add("demand", "solve every consumer's demand problem", run_demand, true, false);
    add("routes", "print the route matrix", run_routes, false, true);
    add("dims", "polytope dimension by rank and by formula", run_dims, false, true);
    add("value", "exchange value of a transport path", run_value, true, true);
    add("criteria", "zero / positivity criteria reports", run_criteria, true, true);
    add("cost", "M_alpha transport cost", run_cost, false, true);
    add("optimize", "minimize M_alpha - sigma * V over tree templates", run_optimize,
        true, false);
    add("export-dot", "DOT digraph with edge weight labels", run_export_dot, false, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        emit(json{{"error", {{"kind", "UsageError"}, {"detail", e.what()}}}}, false);
        return 2;
    }

    try {
        return handler(opt);
    } catch (const xval::Error& e) {
        emit(json{{"error", {{"kind", e.kind()}, {"detail", e.what()}}}}, opt.pretty);
        return error_code(e);
    } catch (const std::exception& e) {
        emit(json{{"error", {{"kind", "InternalError"}, {"detail", e.what()}}}}, opt.pretty);
        return 3;
    }
}
