#include "xval/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace xval {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& pointer, const std::string& detail) {
    throw schema_error(pointer, detail);
}

json parse_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) fail("", "document is not valid JSON");
    return j;
}

double require_number(const json& j, const std::string& ptr) {
    if (!j.is_number()) fail(ptr, "expected a number");
    return j.get<double>();
}

std::string require_string(const json& j, const std::string& ptr) {
    if (!j.is_string()) fail(ptr, "expected a string");
    return j.get<std::string>();
}

Eigen::VectorXd require_vector(const json& j, const std::string& ptr) {
    if (!j.is_array() || j.empty()) fail(ptr, "expected a non-empty array of numbers");
    Eigen::VectorXd v(j.size());
    for (size_t i = 0; i < j.size(); ++i)
        v[i] = require_number(j[i], ptr + "/" + std::to_string(i));
    return v;
}

const json& require_field(const json& j, const char* key, const std::string& ptr) {
    if (!j.is_object() || !j.contains(key)) fail(ptr + "/" + key, "missing field");
    return j.at(key);
}

// shortest decimal string that round-trips the double
std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    double back;
    for (int prec = 1; prec < 17; ++prec) {
        char trial[64];
        std::snprintf(trial, sizeof trial, "%.*g", prec, v);
        std::sscanf(trial, "%lf", &back);
        if (back == v) return trial;
    }
    return buf;
}

json number_json(double v) { return json::parse(format_double(v)); }

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(number_json(v[i]));
    return a;
}

UtilityFn parse_utility(const json& j, const std::string& ptr) {
    UtilityFn u;
    std::string family = require_string(require_field(j, "family", ptr), ptr + "/family");
    if (family == "linear") {
        u.family = UtilityFamily::Linear;
        u.coef = require_vector(require_field(j, "coefficients", ptr), ptr + "/coefficients");
    } else if (family == "cobb_douglas") {
        u.family = UtilityFamily::CobbDouglas;
        u.coef = require_vector(require_field(j, "exponents", ptr), ptr + "/exponents");
    } else if (family == "ces") {
        u.family = UtilityFamily::CES;
        u.coef = require_vector(require_field(j, "weights", ptr), ptr + "/weights");
        u.ces_tau = require_number(require_field(j, "tau", ptr), ptr + "/tau");
        u.ces_beta = require_number(require_field(j, "beta", ptr), ptr + "/beta");
    } else if (family == "quantity_only") {
        u.family = UtilityFamily::QuantityOnly;
        std::string map = j.contains("map")
                              ? require_string(j.at("map"), ptr + "/map")
                              : "identity";
        if (map == "identity") {
            u.qmap = QuantityMap::Identity;
            u.qmap_exponent = 1.0;
        } else if (map == "power") {
            u.qmap = QuantityMap::Power;
            u.qmap_exponent =
                require_number(require_field(j, "exponent", ptr), ptr + "/exponent");
        } else {
            fail(ptr + "/map", "unknown quantity map '" + map + "'");
        }
    } else {
        fail(ptr + "/family", "unknown utility family '" + family + "'");
    }
    return u;
}

json emit_utility(const UtilityFn& u) {
    json j;
    switch (u.family) {
        case UtilityFamily::Linear:
            j["family"] = "linear";
            j["coefficients"] = vector_json(u.coef);
            break;
        case UtilityFamily::CobbDouglas:
            j["family"] = "cobb_douglas";
            j["exponents"] = vector_json(u.coef);
            break;
        case UtilityFamily::CES:
            j["family"] = "ces";
            j["weights"] = vector_json(u.coef);
            j["tau"] = number_json(u.ces_tau);
            j["beta"] = number_json(u.ces_beta);
            break;
        case UtilityFamily::QuantityOnly:
            j["family"] = "quantity_only";
            if (u.qmap == QuantityMap::Identity) {
                j["map"] = "identity";
            } else {
                j["map"] = "power";
                j["exponent"] = number_json(u.qmap_exponent);
            }
            break;
    }
    return j;
}

std::string plan_matrix_json(const Eigen::MatrixXd& q, bool pretty) {
    json rows = json::array();
    for (int i = 0; i < q.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < q.cols(); ++j) row.push_back(number_json(q(i, j)));
        rows.push_back(row);
    }
    json doc;
    doc["plan"] = rows;
    return pretty ? doc.dump(2) : doc.dump();
}

}  // namespace

Economy parse_economy(const std::string& text) {
    json j = parse_text(text);
    Economy e;
    e.dimension =
        static_cast<int>(require_number(require_field(j, "dimension", ""), "/dimension"));

    const json& goods = require_field(j, "goods", "");
    if (!goods.is_array() || goods.empty()) fail("/goods", "expected a non-empty array");
    for (size_t i = 0; i < goods.size(); ++i) {
        std::string ptr = "/goods/" + std::to_string(i);
        Good g;
        g.id = require_string(require_field(goods[i], "id", ptr), ptr + "/id");
        g.location = require_vector(require_field(goods[i], "location", ptr), ptr + "/location");
        if (g.location.size() != e.dimension) fail(ptr + "/location", "wrong dimension");
        e.goods.push_back(std::move(g));
    }

    const json& consumers = require_field(j, "consumers", "");
    if (!consumers.is_array() || consumers.empty())
        fail("/consumers", "expected a non-empty array");
    for (size_t i = 0; i < consumers.size(); ++i) {
        std::string ptr = "/consumers/" + std::to_string(i);
        Consumer c;
        c.id = require_string(require_field(consumers[i], "id", ptr), ptr + "/id");
        c.location =
            require_vector(require_field(consumers[i], "location", ptr), ptr + "/location");
        if (c.location.size() != e.dimension) fail(ptr + "/location", "wrong dimension");
        c.wealth = require_number(require_field(consumers[i], "wealth", ptr), ptr + "/wealth");
        if (!(c.wealth > 0)) fail(ptr + "/wealth", "wealth must be positive");
        c.prices =
            require_vector(require_field(consumers[i], "prices", ptr), ptr + "/prices");
        if (c.prices.size() != static_cast<int>(goods.size()))
            fail(ptr + "/prices", "expected one price per good");
        if (c.prices.minCoeff() <= 0) fail(ptr + "/prices", "prices must be positive");
        c.utility =
            parse_utility(require_field(consumers[i], "utility", ptr), ptr + "/utility");
        e.consumers.push_back(std::move(c));
    }

    try {
        e.validate();
    } catch (const Error& err) {
        fail("", err.what());
    }
    return e;
}

std::string emit_economy(const Economy& economy, bool pretty) {
    json j;
    j["dimension"] = economy.dimension;
    j["goods"] = json::array();
    for (const auto& g : economy.goods)
        j["goods"].push_back({{"id", g.id}, {"location", vector_json(g.location)}});
    j["consumers"] = json::array();
    for (const auto& c : economy.consumers)
        j["consumers"].push_back({{"id", c.id},
                                  {"location", vector_json(c.location)},
                                  {"wealth", number_json(c.wealth)},
                                  {"prices", vector_json(c.prices)},
                                  {"utility", emit_utility(c.utility)}});
    return pretty ? j.dump(2) : j.dump();
}

TransportPath parse_graph(const std::string& text) {
    json j = parse_text(text);
    TransportPath g;

    const json& vertices = require_field(j, "vertices", "");
    if (!vertices.is_array() || vertices.empty()) fail("/vertices", "expected a non-empty array");
    for (size_t i = 0; i < vertices.size(); ++i) {
        std::string ptr = "/vertices/" + std::to_string(i);
        TransportPath::Vertex v;
        v.id = require_string(require_field(vertices[i], "id", ptr), ptr + "/id");
        v.location =
            require_vector(require_field(vertices[i], "location", ptr), ptr + "/location");
        g.vertices.push_back(std::move(v));
    }

    auto resolve = [&](const json& node, const std::string& ptr) -> int {
        if (node.is_string()) {
            int v = g.vertex_index(node.get<std::string>());
            if (v < 0) fail(ptr, "unknown vertex id '" + node.get<std::string>() + "'");
            return v;
        }
        if (node.is_number_integer()) {
            int v = node.get<int>();
            if (v < 0 || v >= static_cast<int>(g.vertices.size()))
                fail(ptr, "vertex index out of range");
            return v;
        }
        fail(ptr, "expected a vertex id or index");
    };

    const json& edges = require_field(j, "edges", "");
    if (!edges.is_array()) fail("/edges", "expected an array");
    for (size_t i = 0; i < edges.size(); ++i) {
        std::string ptr = "/edges/" + std::to_string(i);
        TransportPath::Edge e;
        e.tail = resolve(require_field(edges[i], "tail", ptr), ptr + "/tail");
        e.head = resolve(require_field(edges[i], "head", ptr), ptr + "/head");
        e.weight = require_number(require_field(edges[i], "weight", ptr), ptr + "/weight");
        if (!(e.weight > 0)) fail(ptr + "/weight", "edge weight must be positive");
        g.edges.push_back(e);
    }

    auto boundary = [&](const char* key, std::vector<int>& ids, std::vector<double>& mass) {
        const json& arr = require_field(j, key, "");
        std::string base = std::string("/") + key;
        if (!arr.is_array() || arr.empty()) fail(base, "expected a non-empty array");
        for (size_t i = 0; i < arr.size(); ++i) {
            std::string ptr = base + "/" + std::to_string(i);
            ids.push_back(resolve(require_field(arr[i], "vertex", ptr), ptr + "/vertex"));
            double m = require_number(require_field(arr[i], "mass", ptr), ptr + "/mass");
            if (!(m > 0)) fail(ptr + "/mass", "boundary mass must be positive");
            mass.push_back(m);
        }
    };
    boundary("sources", g.sources, g.source_mass);
    boundary("sinks", g.sinks, g.sink_mass);

    try {
        g.validate();
    } catch (const Error& err) {
        fail("", err.what());
    }
    return g;
}

std::string emit_graph(const TransportPath& g, bool pretty) {
    json j;
    j["vertices"] = json::array();
    for (const auto& v : g.vertices)
        j["vertices"].push_back({{"id", v.id}, {"location", vector_json(v.location)}});
    j["edges"] = json::array();
    for (const auto& e : g.edges)
        j["edges"].push_back({{"tail", g.vertices[e.tail].id},
                              {"head", g.vertices[e.head].id},
                              {"weight", number_json(e.weight)}});
    j["sources"] = json::array();
    for (size_t i = 0; i < g.sources.size(); ++i)
        j["sources"].push_back({{"vertex", g.vertices[g.sources[i]].id},
                                {"mass", number_json(g.source_mass[i])}});
    j["sinks"] = json::array();
    for (size_t i = 0; i < g.sinks.size(); ++i)
        j["sinks"].push_back({{"vertex", g.vertices[g.sinks[i]].id},
                              {"mass", number_json(g.sink_mass[i])}});
    return pretty ? j.dump(2) : j.dump();
}

TransportPlan parse_plan(const std::string& text) {
    json j = parse_text(text);
    const json& rows = require_field(j, "plan", "");
    if (!rows.is_array() || rows.empty()) fail("/plan", "expected a non-empty array of rows");
    size_t cols = 0;
    for (size_t i = 0; i < rows.size(); ++i) {
        std::string ptr = "/plan/" + std::to_string(i);
        if (!rows[i].is_array() || rows[i].empty()) fail(ptr, "expected a non-empty row");
        if (i == 0)
            cols = rows[i].size();
        else if (rows[i].size() != cols)
            fail(ptr, "ragged rows");
    }
    TransportPlan q(rows.size(), cols);
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t c = 0; c < cols; ++c) {
            std::string ptr = "/plan/" + std::to_string(i) + "/" + std::to_string(c);
            double v = require_number(rows[i][c], ptr);
            if (v < 0) fail(ptr, "plan entries must be nonnegative");
            q(i, c) = v;
        }
    return q;
}

std::string emit_plan(const TransportPlan& q, bool pretty) {
    return plan_matrix_json(q, pretty);
}

std::string export_dot(const TransportPath& g) {
    std::ostringstream os;
    os << "digraph transport {\n";
    for (const auto& v : g.vertices) os << "  \"" << v.id << "\";\n";
    for (const auto& e : g.edges)
        os << "  \"" << g.vertices[e.tail].id << "\" -> \"" << g.vertices[e.head].id
           << "\" [label=\"w=" << format_double(e.weight) << "\"];\n";
    os << "}\n";
    return os.str();
}

nlohmann::json valuation_to_json(const ValuationResult& r) {
    json j;
    j["V"] = number_json(r.value);
    json rows = json::array();
    for (int i = 0; i < r.maximizer.rows(); ++i) {
        json row = json::array();
        for (int c = 0; c < r.maximizer.cols(); ++c) row.push_back(number_json(r.maximizer(i, c)));
        rows.push_back(row);
    }
    j["maximizer"] = rows;
    j["iterations"] = r.iterations;
    j["residual"] = number_json(r.residual);
    j["uniqueness"] = r.uniqueness == Uniqueness::Unique      ? "unique"
                      : r.uniqueness == Uniqueness::NonUnique ? "non-unique"
                                                              : "unknown";
    j["backend"] = r.backend;
    j["clamped"] = r.clamped;
    return j;
}

nlohmann::json criterion_to_json(const CriterionReport& r) {
    json j;
    j["name"] = r.name;
    j["applies"] = r.applies;
    j["conclusion"] =
        r.conclusion == CriterionReport::Conclusion::ZeroForced ? "zero"
        : r.conclusion == CriterionReport::Conclusion::PositiveGuaranteed ? "positive"
                                                                          : "inconclusive";
    j["detail"] = r.detail;
    return j;
}

nlohmann::json h_result_to_json(const HResult& r) {
    json j;
    j["alpha"] = number_json(r.alpha);
    j["sigma"] = number_json(r.sigma);
    j["candidate_family"] = r.candidate_family;
    j["candidates"] = json::array();
    for (const auto& c : r.candidates) {
        json cj;
        cj["signature"] = c.candidate.signature;
        cj["interior_vertices"] = c.candidate.interior;
        cj["m_alpha"] = number_json(c.m_alpha);
        cj["exchange_value"] = number_json(c.exchange);
        cj["h"] = number_json(c.h);
        cj["geometry_converged"] = c.geometry_converged;
        cj["graph"] = json::parse(emit_graph(c.path));
        j["candidates"].push_back(std::move(cj));
    }
    j["best"] = r.best;
    return j;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("FileNotFound", "cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace xval
