#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cstdio>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "xval/io.hpp"

using namespace xval;
using nlohmann::json;

namespace {

std::string fixture(const std::string& name) {
    return std::string(XVAL_FIXTURE_DIR) + "/" + name;
}

struct CliRun {
    int exit_code = -1;
    std::string out;
};

CliRun run_cli(const std::string& args) {
    CliRun r;
    std::string cmd = std::string(XVAL_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

}  // namespace

TEST_CASE("economy JSON round trips through emit and parse") {
    Economy e = parse_economy(read_file(fixture("ex31.json")));
    CHECK(e.k() == 2);
    CHECK(e.l() == 2);
    CHECK(e.consumers[0].prices[1] == 6.0);
    CHECK(e.consumers[1].utility.family == UtilityFamily::Linear);

    std::string emitted = emit_economy(e);
    Economy again = parse_economy(emitted);
    CHECK(emit_economy(again) == emitted);  // emit is a fixed point
    CHECK(again.consumers[1].utility.coef[0] == 3.0);
}

TEST_CASE("graph JSON round trips and resolves ids") {
    TransportPath g = parse_graph(read_file(fixture("g2.json")));
    CHECK(g.vertices.size() == 5);
    CHECK(g.edges.size() == 4);
    CHECK(validate_balance(g).valid);

    std::string emitted = emit_graph(g);
    TransportPath again = parse_graph(emitted);
    CHECK(emit_graph(again) == emitted);
    CHECK(combinatorial_signature(again) == combinatorial_signature(g));
}

TEST_CASE("plan JSON round trips exactly") {
    TransportPlan q(2, 3);
    q << 0.125, 0.3, 1.0 / 3.0, 0.0, 2e-9, 7.25;
    TransportPlan again = parse_plan(emit_plan(q));
    CHECK((again - q).norm() == 0.0);
}

TEST_CASE("schema errors carry the offending JSON pointer") {
    std::string text = read_file(fixture("ex31.json"));
    json doc = json::parse(text);
    doc["consumers"][0]["wealth"] = -1.0;
    CHECK_THROWS_WITH_AS(parse_economy(doc.dump()),
                         doctest::Contains("/consumers/0/wealth"), Error);

    doc = json::parse(text);
    doc["consumers"][1]["utility"]["family"] = "sublime";
    CHECK_THROWS_WITH_AS(parse_economy(doc.dump()),
                         doctest::Contains("/consumers/1/utility/family"), Error);

    doc = json::parse(read_file(fixture("g1.json")));
    doc["edges"][0]["tail"] = "nobody";
    try {
        parse_graph(doc.dump());
        FAIL("expected an error");
    } catch (const Error& err) {
        CHECK(err.kind() == "SchemaError");
        CHECK(std::string(err.what()).find("/edges/0/tail") != std::string::npos);
    }
}

TEST_CASE("DOT export lists vertices and weighted edges") {
    TransportPath g = parse_graph(read_file(fixture("g1.json")));
    std::string dot = export_dot(g);
    CHECK(dot.find("digraph") != std::string::npos);
    CHECK(dot.find("\"x1\" -> \"y1\" [label=\"w=0.5\"]") != std::string::npos);
    CHECK(dot.find("\"x2\" -> \"y2\" [label=\"w=0.5\"]") != std::string::npos);
}

TEST_CASE("cli: value reports the trunk exchange value") {
    CliRun r = run_cli("value --economy " + fixture("ex31.json") + " --graph " +
                       fixture("g2.json") + " --json");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    CHECK(doc["V"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(doc["backend"] == "lp");
    CHECK(doc["maximizer"][0][0].get<double>() == doctest::Approx(0.0));
    CHECK(doc["maximizer"][1][0].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("cli: dims agree on both fixtures") {
    CliRun r1 = run_cli("dims --graph " + fixture("g1.json") + " --json");
    REQUIRE(r1.exit_code == 0);
    json d1 = json::parse(r1.out);
    CHECK(d1["rank_dim"] == 0);
    CHECK(d1["formula_dim"] == 0);
    CHECK(d1["agree"] == true);

    CliRun r2 = run_cli("dims --graph " + fixture("g2.json") + " --json");
    json d2 = json::parse(r2.out);
    CHECK(d2["rank_dim"] == 1);
    CHECK(d2["agree"] == true);
}

TEST_CASE("cli: cost evaluates the alpha-weighted length") {
    CliRun r = run_cli("cost --graph " + fixture("single_edge.json") + " --alpha 0.5 --json");
    REQUIRE(r.exit_code == 0);
    CHECK(json::parse(r.out)["m_alpha"].get<double>() == doctest::Approx(3.0));
}

TEST_CASE("cli: pretty output is whitespace-only different") {
    CliRun compact = run_cli("demand --economy " + fixture("ex31.json") + " --json");
    CliRun pretty = run_cli("demand --economy " + fixture("ex31.json") + " --json --pretty");
    REQUIRE(compact.exit_code == 0);
    REQUIRE(pretty.exit_code == 0);
    CHECK(pretty.out.find('\n') != pretty.out.npos);
    CHECK(json::parse(compact.out) == json::parse(pretty.out));
}

TEST_CASE("cli: input errors exit 2 with a structured report") {
    CliRun missing = run_cli("value --economy /no/such/file.json --graph " +
                             fixture("g1.json") + " --json");
    CHECK(missing.exit_code == 2);
    CHECK(json::parse(missing.out)["error"]["kind"] == "FileNotFound");

    // a graph where an economy is expected is a schema violation
    CliRun wrong = run_cli("value --economy " + fixture("g1.json") + " --graph " +
                           fixture("g1.json") + " --json");
    CHECK(wrong.exit_code == 2);
    CHECK(json::parse(wrong.out)["error"]["kind"] == "SchemaError");
}

TEST_CASE("cli: criteria lists all four reports") {
    CliRun r = run_cli("criteria --economy " + fixture("ex31.json") + " --graph " +
                       fixture("g1.json") + " --json");
    REQUIRE(r.exit_code == 0);
    json doc = json::parse(r.out);
    REQUIRE(doc["criteria"].size() == 4);
    bool disjoint_zero = false;
    for (const auto& c : doc["criteria"])
        if (c["name"] == "disjoint_routes")
            disjoint_zero = c["applies"] == true && c["conclusion"] == "zero";
    CHECK(disjoint_zero);
}
