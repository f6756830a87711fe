// semviz: build an index artifact, query it headlessly, or serve it over HTTP.

#include "semviz/pipeline.hpp"
#include "semviz/server.hpp"
#include "semviz/service.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitFormat = 2;

semviz::HttpServer* g_server = nullptr;

void handle_signal(int) {
    if (g_server) g_server->stop();
}

struct QueryOptions {
    std::string index;
    std::vector<std::string> filters;
    std::optional<std::string> text;
    bool pretty = false;
};

// Options of one query operation, written into the request document.
struct OpOptions {
    std::optional<std::string> field, x, y, granularity, count_by, name, target, regulator, relations, id;
    std::optional<uint64_t> k, kx, ky, page, page_size, limit, max_depth, budget;
    bool no_members = false;
};

semviz::json make_request(const std::string& op, const QueryOptions& q, const OpOptions& o) {
    semviz::json req = semviz::json::object();
    if (!q.filters.empty()) {
        auto arr = semviz::json::array();
        for (const auto& f : q.filters) {
            const auto eq = f.find('=');
            if (eq == std::string::npos) {
                throw semviz::QueryError("filter '" + f + "' must be written field=term", "filter");
            }
            arr.push_back({{"field", f.substr(0, eq)}, {"term", f.substr(eq + 1)}});
        }
        req["filters"] = std::move(arr);
    }
    if (q.text) req["text"] = *q.text;
    auto put = [&](const char* key, const auto& value) {
        if (value) req[key] = *value;
    };
    put("field", o.field);
    put("x", o.x);
    put("y", o.y);
    put("granularity", o.granularity);
    put("count_by", o.count_by);
    put("name", o.name);
    put("target", o.target);
    put("regulator", o.regulator);
    put("relations", o.relations);
    put("id", o.id);
    put("k", o.k);
    put("kx", o.kx);
    put("ky", o.ky);
    put("page", o.page);
    put("page_size", o.page_size);
    put("limit", o.limit);
    put("max_depth", o.max_depth);
    put("budget", o.budget);
    if (op == "functional-types" && o.no_members) req["members"] = false;
    return req;
}

int run_build(const semviz::BuildInputs& inputs, const std::string& out_dir) {
    try {
        auto built = semviz::build_from_files(inputs);
        for (const auto& w : built.warnings) std::cerr << "warning: " << w << "\n";
        built.index.save(out_dir);
        std::ofstream report(std::filesystem::path(out_dir) / "rejects.json", std::ios::trunc);
        report << semviz::dump(built.report, 2) << "\n";
        std::cerr << "indexed " << built.index.records().size() << " relations, " << built.index.docs().size()
                  << " evidence docs, " << built.index.functional_types().size() << " functional types -> "
                  << out_dir << "\n";
        return kExitOk;
    } catch (const semviz::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFormat;
    } catch (const semviz::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}

int run_query(const std::string& op, const QueryOptions& q, const OpOptions& o) {
    std::optional<semviz::Engine> engine;
    try {
        engine.emplace(semviz::Index::load(q.index));
    } catch (const semviz::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    int status = 200;
    semviz::json response;
    try {
        response = engine->respond(op, make_request(op, q, o), &status);
    } catch (const semviz::Error& e) {
        response = semviz::error_body(e);
        status = 400;
    }
    std::cout << semviz::dump(response, q.pretty ? 2 : -1) << "\n";
    return status == 200 ? kExitOk : kExitError;
}

int run_serve(const std::string& index_path, const std::string& host, int port) {
    std::optional<semviz::Engine> engine;
    try {
        engine.emplace(semviz::Index::load(index_path));
    } catch (const semviz::Error& e) {
        std::cerr << "error: cannot load index: " << e.what() << "\n";
        return kExitError;
    }
    semviz::HttpServer server(*engine);
    g_server = &server;
    std::signal(SIGINT, handle_signal);
    std::signal(SIGTERM, handle_signal);
    std::cerr << "serving " << index_path << " on http://" << host << ":" << port << "\n";
    const bool ok = server.listen(host, port);
    g_server = nullptr;
    if (!ok) {
        std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
        return kExitError;
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"semviz - semantic relation exploration engine"};
    app.require_subcommand(1);

    // build
    semviz::BuildInputs inputs;
    std::string out_dir;
    std::optional<std::string> meta, aliases, taxonomy;
    auto* build = app.add_subcommand("build", "Build an index artifact from relation and metadata files");
    build->add_option("--ca", inputs.causal_assertion_files, "Causal-assertion JSONL file (repeatable)");
    build->add_option("--kg", inputs.kg_files, "Knowledge-graph relation JSONL file (repeatable)");
    build->add_option("--meta", meta, "Article metadata CSV");
    build->add_option("--aliases", aliases, "Alias file: alias<TAB>canonical per line");
    build->add_option("--taxonomy", taxonomy, "Relation taxonomy JSON");
    build->add_option("--stopword", inputs.stopwords, "Token to exclude from text indexing (repeatable)");
    build->add_option("--out", out_dir, "Output directory")->required();

    // query
    QueryOptions q;
    auto* query = app.add_subcommand("query", "Run one query against an index and print JSON");
    query->require_subcommand(1);
    query->add_option("--index", q.index, "Index directory or file")->envname("SEMVIZ_INDEX")->required();
    query->add_option("--filter", q.filters, "Constraint field=term (repeatable)");
    query->add_option("--text", q.text, "Free-text query (all tokens must match)");
    query->add_flag("--pretty", q.pretty, "Indent the output");

    OpOptions o;
    std::string op_name;
    auto op = [&](const char* name, const char* help) {
        auto* sub = query->add_subcommand(name, help);
        sub->fallthrough();
        sub->callback([&op_name, name] { op_name = name; });
        return sub;
    };
    op("stats", "Corpus totals");
    auto* tc = op("tagcloud", "Top terms of a field");
    tc->add_option("--field", o.field, "Facet field")->required();
    tc->add_option("-k,--k", o.k, "Number of terms");
    tc->add_option("--count-by", o.count_by, "docs | articles");
    auto* hm = op("heatmap", "Co-occurrence matrix of two fields");
    hm->add_option("--x", o.x, "Column field")->required();
    hm->add_option("--y", o.y, "Row field")->required();
    hm->add_option("--kx", o.kx, "Number of columns");
    hm->add_option("--ky", o.ky, "Number of rows");
    auto* tb = op("table", "Evidence table page");
    tb->add_option("--page", o.page, "Zero-based page");
    tb->add_option("--page-size", o.page_size, "Rows per page");
    op("metrics", "Evidence and article counts");
    auto* hs = op("histogram", "Publication date histogram");
    hs->add_option("--granularity", o.granularity, "year | month");
    auto* ft = op("functional-types", "List grounded functional types");
    ft->add_option("--limit", o.limit, "Maximum number listed");
    ft->add_flag("--no-members", o.no_members, "Omit member lists");
    auto* up = op("upstream", "Upstream regulators of a functional type");
    up->add_option("--name", o.name, "Functional type name")->required();
    auto* oup = op("opposite-upstream", "Opposite upstream regulators of a functional type");
    oup->add_option("--name", o.name, "Functional type name")->required();
    auto* pw = op("pathways", "Bounded upstream pathways ending at a target");
    pw->add_option("--target", o.target, "Target entity")->required();
    pw->add_option("--max-depth", o.max_depth, "Maximum pathway length in nodes (capped at 5)");
    pw->add_option("--budget", o.budget, "Walk-count budget");
    pw->add_option("-k,--k", o.k, "Ranked list size");
    pw->add_option("--relations", o.relations, "Comma-separated relation types (default Activation)");
    pw->add_option("--regulator", o.regulator, "Only pathways starting at this entity");
    pw->add_option("--limit", o.limit, "Maximum pathways listed");
    pw->add_option("--count-by", o.count_by, "docs | articles");
    auto* dc = op("doc", "One evidence document");
    dc->add_option("--id", o.id, "Document id")->required();

    // serve
    std::string serve_index;
    std::string host = "0.0.0.0";
    int port = 8080;
    auto* serve = app.add_subcommand("serve", "Serve an index over HTTP");
    serve->add_option("--index", serve_index, "Index directory or file")->envname("SEMVIZ_INDEX")->required();
    serve->add_option("--port", port, "TCP port")->capture_default_str();
    serve->add_option("--host", host, "Bind address")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (build->parsed()) {
        inputs.metadata_file = meta;
        inputs.alias_file = aliases;
        inputs.taxonomy_file = taxonomy;
        return run_build(inputs, out_dir);
    }
    if (query->parsed()) return run_query(op_name, q, o);
    if (serve->parsed()) return run_serve(serve_index, host, port);
    return kExitError;
}
