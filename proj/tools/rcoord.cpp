// rcoord: batch verification front-end.
//
//   rcoord verify --suite classical --m 3 --surface punctured-torus
//   rcoord enumerate --surface punctured-torus --max-objects 100
//   rcoord dump-quiver --m 3 --surface square
//   rcoord dump-operators --m 3

#include "suites.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace rcoord;
using namespace rcoord::cli;

namespace {

constexpr const char* kSchema = "rcoord-report/1";

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
    return h;
}

std::string hex(uint64_t x) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", (unsigned long long)x);
    return buf;
}

// Body first, then a header carrying everything that varies between runs.
std::string render(const json& body, json header) {
    std::string b = body.dump(2);
    header["schema"] = kSchema;
    header["body_hash"] = hex(fnv1a(b));
    json doc;
    doc["header"] = std::move(header);
    doc["body"] = body;
    return doc.dump(2) + "\n";
}

std::string now_utc() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) fail("ConfigError", "field 'out': cannot write '" + path + "'");
    f << text;
}

json config_json(const RunConfig& c) {
    return {{"surface", c.surface},       {"m", c.m},
            {"suites", c.suites},         {"seed", c.seed},
            {"matrix_dim", c.matrix_dim}, {"prime", c.prime},
            {"max_objects", c.max_objects}, {"max_dottings", c.max_dottings},
            {"strict", c.strict}};
}

int cmd_verify(const RunConfig& cfg) {
    auto checks = run(cfg);
    json body;
    body["config"] = config_json(cfg);
    body["checks"] = json::array();
    json timing = json::object();
    int failed = 0;
    for (auto& c : checks) {
        body["checks"].push_back({{"id", c.id}, {"ref", c.ref}, {"params", c.params}, {"verdict", c.verdict}, {"ok", c.ok}});
        timing[c.id] = c.seconds;
        failed += !c.ok;
    }
    body["summary"] = {{"checks", checks.size()}, {"failed", failed}};
    emit(render(body, {{"timestamp", now_utc()}, {"wall_seconds", timing}}), cfg.out);
    for (auto& c : checks)
        if (!c.ok) std::cerr << "FAIL " << c.id << " (" << c.verdict << ")\n";
    std::cerr << checks.size() - failed << "/" << checks.size() << " checks passed\n";
    return failed ? 1 : 0;
}

int cmd_enumerate(const RunConfig& cfg) {
    if (cfg.max_objects < 1) fail("ConfigError", "field 'max-objects': must be positive");
    auto d = load_surface(cfg.surface);
    if (cfg.seed > 1) d = dottings(d, 2, cfg.seed).back();
    auto g = explore(d, cfg.max_objects);
    json body;
    body["config"] = config_json(cfg);
    body["objects"] = json::array();
    for (auto& n : g.nodes) body["objects"].push_back(to_text(n));
    std::map<std::string, long> tally;
    body["edges"] = json::array();
    for (auto& e : g.edges) {
        body["edges"].push_back({e.from, e.to, e.type});
        ++tally[e.type.substr(0, e.type.find('_'))];
    }
    body["edge_types"] = tally;
    body["components"] = g.components;
    body["budget_exceeded"] = g.budget_exceeded;
    body["relation_instances"] = g.relation_instances;
    body["relation_failures"] = g.relation_failures;
    body["failures"] = g.failures;
    emit(render(body, {{"timestamp", now_utc()}}), cfg.out);
    return g.relation_failures ? 1 : 0;
}

int cmd_dump_quiver(const RunConfig& cfg) {
    if (cfg.m < 2) fail("ConfigError", "field 'm': must be at least 2");
    auto d = load_surface(cfg.surface);
    auto Q = build_Qm(d, cfg.m);
    json body;
    body["config"] = config_json(cfg);
    body["triangulation"] = to_text(d);
    body["quiver"] = dump_quiver(Q);
    LabelIndex idx(Q);
    auto L = relation_lattice(Q, idx);
    body["loop_relations"] = L.rows();
    emit(render(body, {{"timestamp", now_utc()}}), cfg.out);
    return 0;
}

int cmd_dump_operators(const RunConfig& cfg) {
    json body;
    body["config"] = config_json(cfg);
    json words = json::array();
    if (cfg.m == 2) {
        std::vector<std::string> names{"r", "s"};
        for (auto& w : {op_A(2, 0, "r"), op_T(2, 0, 1, "r", "s"), op_F(2, 0, 1, "r", "s"), op_P(perm_transposition(2, 0, 1), "(r s)")})
            words.push_back(word_str(w, names));
    } else if (cfg.m == 3) {
        auto ops = build_m3_operators(2);
        for (auto& w : {ops.A(0), ops.T(0, 1), ops.P({1, 0}), ops.K(0, 1)}) words.push_back(word_str(w, ops.names));
    } else {
        fail("ConfigError", "field 'm': operator words are available for m = 2 and m = 3");
    }
    body["words"] = words;
    emit(render(body, {{"timestamp", now_utc()}}), cfg.out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ratio coordinates: quiver, classical and quantum verification"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI/TOML file with option values");
    RunConfig cfg;
    std::string suites;

    auto common = [&](CLI::App* sc) {
        sc->add_option("--surface", cfg.surface, "built-in name, gG-pN, or triangulation file")->capture_default_str();
        sc->add_option("--m", cfg.m, "subdivision level")->capture_default_str();
        sc->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
        sc->add_option("--out", cfg.out, "output path (default stdout)");
    };
    auto* verify = app.add_subcommand("verify", "run verification suites");
    common(verify);
    verify->add_option("--suite", suites, "comma separated: groupoid,quiverdt,classical,quantum-m2,quantum-m3")
        ->required();
    verify->add_option("--matrix-dim", cfg.matrix_dim, "clock/shift dimension N")->capture_default_str();
    verify->add_option("--prime", cfg.prime, "prime p = 1 mod N (0: automatic)")->capture_default_str();
    verify->add_option("--max-objects", cfg.max_objects, "exploration budget")->capture_default_str();
    verify->add_option("--max-dottings", cfg.max_dottings, "dottings per surface")->capture_default_str();
    verify->add_flag("--strict", cfg.strict, "randomized verdicts need classical corroboration");

    auto* enumerate = app.add_subcommand("enumerate", "dump the move graph");
    common(enumerate);
    enumerate->add_option("--max-objects", cfg.max_objects, "exploration budget")->capture_default_str();

    auto* dq = app.add_subcommand("dump-quiver", "dump Q_m of a dotted triangulation");
    common(dq);
    auto* dops = app.add_subcommand("dump-operators", "dump the operator words");
    common(dops);

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) {
            std::stringstream ss(suites);
            std::string s;
            while (std::getline(ss, s, ','))
                if (!s.empty()) cfg.suites.push_back(s);
            return cmd_verify(cfg);
        }
        if (enumerate->parsed()) return cmd_enumerate(cfg);
        if (dq->parsed()) return cmd_dump_quiver(cfg);
        if (dops->parsed()) return cmd_dump_operators(cfg);
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return e.kind() == "ConfigError" ? 2 : 3;
    }
    return 0;
}
