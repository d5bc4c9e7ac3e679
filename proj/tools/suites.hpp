#pragma once
// Suite runners for the command line front-end.  Each suite appends check
// records; ordering of the final report is by id.

#include "rcoord/classical.hpp"
#include "rcoord/dilog.hpp"
#include "rcoord/qtorus.hpp"
#include "rcoord/quiverdt.hpp"
#include "rcoord/surface.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

namespace rcoord::cli {

using json = nlohmann::ordered_json;

struct RunConfig {
    std::string surface = "punctured-torus";
    int m = 2;
    std::vector<std::string> suites;
    uint64_t seed = 1;
    int matrix_dim = 7;
    uint64_t prime = 0;
    int max_objects = 1000;
    int max_dottings = 729;
    std::string out;
    bool strict = false;
};

struct Check {
    std::string id;
    std::string ref;
    json params = json::object();
    std::string verdict;
    bool ok = false;
    double seconds = 0;
};

inline const std::vector<std::string>& known_suites() {
    static const std::vector<std::string> s{"groupoid", "quiverdt", "classical", "quantum-m2", "quantum-m3"};
    return s;
}

inline void validate(const RunConfig& c) {
    if (c.suites.empty()) fail("ConfigError", "field 'suite': empty suite set");
    for (auto& s : c.suites)
        if (std::find(known_suites().begin(), known_suites().end(), s) == known_suites().end())
            fail("ConfigError", "field 'suite': unknown suite '" + s + "'");
    if (c.m < 2) fail("ConfigError", "field 'm': must be at least 2");
    if (c.max_objects < 1) fail("ConfigError", "field 'max-objects': must be positive");
    if (c.max_dottings < 1) fail("ConfigError", "field 'max-dottings': must be positive");
    try {
        clock_shift_model({c.matrix_dim, c.prime}, c.seed);
    } catch (const Error& e) {
        fail("ConfigError", "fields 'matrix-dim'/'prime': " + std::string(e.what()));
    }
}

// A built-in name, gG-pN, or a file in the triangulation text format.
inline DottedTriangulation load_surface(const std::string& arg) {
    if (std::filesystem::exists(arg)) {
        std::ifstream in(arg);
        std::stringstream ss;
        ss << in.rdbuf();
        return from_text(ss.str());
    }
    return make_dotted(builtin_surface(arg));
}

// Every dotting of d when there are at most `cap`, otherwise cap of them drawn from seed.
inline std::vector<DottedTriangulation> dottings(const DottedTriangulation& d, int cap, uint64_t seed) {
    std::vector<DottedTriangulation> out;
    double total = std::pow(3.0, d.size());
    if (total <= cap) {
        for (long mask = 0; mask < (long)total; ++mask) {
            auto e = d;
            long x = mask;
            for (int t = 0; t < d.size(); ++t, x /= 3) e.dot[t] = (int)(x % 3);
            out.push_back(e);
        }
        return out;
    }
    std::mt19937_64 rng(seed);
    out.push_back(d);
    while ((int)out.size() < cap) {
        auto e = d;
        for (auto& x : e.dot) x = (int)(rng() % 3);
        out.push_back(e);
    }
    return out;
}

inline EqualOptions equal_options(const RunConfig& c) {
    EqualOptions o;
    o.matrix = {c.matrix_dim, c.prime};
    o.seeds = {c.seed, c.seed + 1, c.seed + 2};
    return o;
}

inline json report_json(const EqualReport& r) {
    json j;
    j["verdict"] = verdict_name(r.verdict);
    j["exact"] = r.exact;
    j["classical"] = r.classical;
    j["randomized"] = r.randomized;
    if (r.randomized >= 0) {
        j["method"] = r.method;
        j["seeds"] = r.seeds_used;
        j["prime"] = r.prime;
        if (r.method == "matrix") j["dim"] = r.dim;
        else j["precision"] = r.series_precision;
    }
    if (!r.witness.empty()) j["witness"] = r.witness;
    return j;
}

// Pass rule for a torus equality verdict.  Strict mode refuses a randomized
// verdict that classical specialization did not confirm.
inline bool verdict_ok(const EqualReport& r, bool strict) {
    if (r.verdict == Verdict::EqualExact) return true;
    if (r.verdict != Verdict::EqualRandomized) return false;
    return !strict || r.classical == 1;
}

template <class F>
Check timed(std::string id, std::string ref, F&& body) {
    Check c;
    c.id = std::move(id);
    c.ref = std::move(ref);
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(c);
    } catch (const Error& e) {
        c.ok = false;
        c.verdict = "Error";
        c.params["error"] = e.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return c;
}

// ---------------------------------------------------------------------------

inline void suite_groupoid(const RunConfig& cfg, std::vector<Check>& out) {
    auto d0 = load_surface(cfg.surface);
    auto ds = dottings(d0, cfg.max_dottings, cfg.seed);
    std::map<std::string, std::array<long, 2>> tally;
    for (auto& d : ds)
        for (auto& r : verify_relation_instances(d)) {
            auto& t = tally[r.rel.name];
            ++t[0];
            if (!r.ok()) ++t[1];
        }
    for (auto& [name, t] : tally)
        out.push_back(timed("groupoid/relation/" + name, "groupoid relation: " + name, [&](Check& c) {
            c.params = {{"surface", cfg.surface}, {"dottings", ds.size()}, {"instances", t[0]}, {"failures", t[1]}};
            c.ok = t[1] == 0;
            c.verdict = c.ok ? "Holds" : "Fails";
        }));
    out.push_back(timed("groupoid/explore", "move graph exploration", [&](Check& c) {
        auto g = explore(d0, cfg.max_objects);
        c.params = {{"surface", cfg.surface},
                    {"budget", cfg.max_objects},
                    {"objects", g.nodes.size()},
                    {"edges", g.edges.size()},
                    {"components", g.components},
                    {"budget_exceeded", g.budget_exceeded},
                    {"relation_instances", g.relation_instances},
                    {"relation_failures", g.relation_failures}};
        c.ok = g.components == 1 && g.relation_failures == 0;
        c.verdict = c.ok ? "Holds" : "Fails";
    }));
}

inline void suite_quiverdt(const RunConfig& cfg, std::vector<Check>& out) {
    auto d0 = load_surface(cfg.surface);
    auto ds = dottings(d0, cfg.max_dottings, cfg.seed);
    int m = cfg.m;
    out.push_back(timed("quiverdt/build", "Q_m construction", [&](Check& c) {
        long bad = 0;
        std::string first;
        for (auto& d : ds) {
            auto msg = build_Qm(d, m).check();
            if (!msg.empty() && !bad++) first = msg;
        }
        c.params = {{"m", m}, {"surface", cfg.surface}, {"dottings", ds.size()}, {"invalid", bad}};
        if (bad) c.params["first"] = first;
        c.ok = bad == 0;
        c.verdict = c.ok ? "Holds" : "Fails";
    }));
    out.push_back(timed("quiverdt/flip-sequence", "flip decomposition", [&](Check& c) {
        long ok = 0, bad = 0, unsupported = 0;
        for (auto& d : ds)
            for (int t = 0; t < d.size(); ++t)
                for (int s = 0; s < d.size(); ++s) {
                    if (s == t) continue;
                    auto r = try_apply(d, KashaevMove::T(t, s));
                    if (!r) continue;
                    try {
                        auto Q = apply_word(build_Qm(d, m), flip_sequence(t, s, m));
                        (same_quiver(Q, build_Qm(*r, m)) ? ok : bad)++;
                    } catch (const Error&) {
                        ++unsupported;
                    }
                }
        int T = 0, F = 0;
        for (auto& tr : flip_sequence(0, 1, m)) (tr.kind == QdtKind::T ? T : F)++;
        c.params = {{"m", m}, {"surface", cfg.surface}, {"flips", ok + bad + unsupported}, {"mismatches", bad},
                    {"unsupported", unsupported}, {"T_count", T}, {"F_count", F}};
        c.ok = bad == 0 && unsupported == 0;
        c.verdict = c.ok ? "Holds" : "Fails";
    }));
    out.push_back(timed("quiverdt/dot-change", "dot change decomposition", [&](Check& c) {
        long ok = 0, bad = 0;
        for (auto& d : ds)
            for (int t = 0; t < d.size(); ++t) {
                auto Q = apply_word(build_Qm(d, m), dotchange_sequence(t, m));
                (same_quiver(Q, build_Qm(apply_move(d, KashaevMove::A(t)), m)) ? ok : bad)++;
            }
        c.params = {{"m", m}, {"surface", cfg.surface}, {"moves", ok + bad}, {"mismatches", bad}};
        c.ok = bad == 0;
        c.verdict = c.ok ? "Holds" : "Fails";
    }));
    out.push_back(timed("quiverdt/two-form", "2-form diagonalization", [&](Check& c) {
        long bad = 0, literal = 0;
        for (auto& d : ds) {
            auto r = check_two_form(build_Qm(d, m));
            bad += !r.holds;
            literal += r.literal_holds;
        }
        c.params = {{"m", m}, {"surface", cfg.surface}, {"dottings", ds.size()}, {"failures", bad},
                    {"literal_sign_holds", literal}};
        c.ok = bad == 0;
        c.verdict = c.ok ? "Holds" : "Fails";
    }));
}

inline void suite_classical(const RunConfig& cfg, std::vector<Check>& out) {
    auto d0 = load_surface(cfg.surface);
    auto ds = dottings(d0, cfg.max_dottings, cfg.seed);
    int m = cfg.m;
    out.push_back(timed("classical/elementary-change", "elementary coordinate changes", [&](Check& c) {
        long n = 0, bad = 0;
        for (auto& d : ds)
            for (int t = 0; t < d.size(); ++t)
                for (int s = 0; s < d.size(); ++s) {
                    if (s == t || !try_apply(d, KashaevMove::T(t, s))) continue;
                    QuiverDT Q = build_Qm(d, m);
                    LabelIndex idx(Q);
                    QdtWord w = flip_sequence(t, s, m);
                    for (auto& tr : dotchange_sequence(t, m)) w.push_back(tr);
                    for (auto& tr : w) {
                        ++n;
                        if (!states_equal(apply_change(tr, idx, ratio_state(Q, idx, delta_variables(Q.nv))),
                                          change_from_delta(tr, Q, idx)))
                            ++bad;
                        Q = apply_transform(Q, tr);
                    }
                }
        c.params = {{"m", m}, {"surface", cfg.surface}, {"transforms", n}, {"mismatches", bad}};
        c.ok = bad == 0;
        c.verdict = c.ok ? "EqualExact" : "NotEqual";
    }));

    std::map<std::string, std::array<long, 4>> tally;  // supported, exact, mod lattice, positive
    for (auto& d : ds) {
        QuiverDT Q = build_Qm(d, m);
        LabelIndex idx(Q);
        auto L = relation_lattice(Q, idx);
        for (auto& rel : relation_instances(d.size(), d.size() <= 3)) {
            auto r = classical_relation_check(d, rel, m, &L);
            if (!r.supported) continue;
            auto& t = tally[rel.name];
            ++t[0];
            t[1] += r.exact;
            t[2] += r.mod_lattice;
            t[3] += r.positive;
        }
    }
    for (auto& [name, t] : tally) {
        out.push_back(timed("classical/relation/" + name, "groupoid relation on coordinates: " + name, [&](Check& c) {
            c.params = {{"m", m}, {"surface", cfg.surface}, {"instances", t[0]}, {"exact", t[1]},
                        {"mod_lattice", t[2]}, {"positive", t[3]}};
            c.ok = (m == 2 ? t[1] : t[2]) == t[0];
            c.verdict = !c.ok ? "NotEqual" : t[1] == t[0] ? "EqualExact" : "EqualModLattice";
        }));
        if (m == 3 && name == "inversion")
            out.push_back(timed("classical/relation/inversion-control", "inversion without the loop relations",
                                [&](Check& c) {
                                    c.params = {{"m", m}, {"instances", t[0]}, {"exact_without_lattice", t[1]}};
                                    c.ok = t[1] == 0;
                                    c.verdict = c.ok ? "NotEqual (expected)" : "Equal (unexpected)";
                                }));
    }

    out.push_back(timed("classical/p-map", "p-map equivariance", [&](Check& c) {
        long n = 0, bad = 0;
        for (auto& d : ds) {
            auto Q = build_Qm(d, m);
            auto D = delta_variables(Q.nv);
            auto X = p_pullback(Q);
            for (int k = 0; k < Q.nv; ++k) {
                if (Q.frozen[k]) continue;
                auto Xm = x_mutation(X, Q, k);
                auto Dm = a_mutation(D, Q, k);
                auto Q2 = Q;
                mutate_eps(Q2.eps, k);
                for (int i = 0; i < Q.nv; ++i) {
                    RatFn v = RatFn::constant(Q.nv, 1);
                    for (int j = 0; j < Q.nv; ++j)
                        if (Q2.eps[i][j]) v = v * Dm[j].pow(Q2.eps[i][j]);
                    ++n;
                    bad += !(v == Xm[i]);
                }
            }
        }
        c.params = {{"m", m}, {"surface", cfg.surface}, {"coordinates", n}, {"mismatches", bad}};
        c.ok = bad == 0;
        c.verdict = c.ok ? "EqualExact" : "NotEqual";
    }));
}

inline void suite_quantum_m2(const RunConfig& cfg, std::vector<Check>& out) {
    auto opt = equal_options(cfg);
    auto t0 = std::chrono::steady_clock::now();
    auto res = verify_quantum_m2(opt);
    double each = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / std::max<size_t>(1, res.size());
    for (auto& r : res) {
        Check c;
        c.id = "quantum-m2/" + r.relation + "/" + r.generator;
        c.ref = "quantum m=2 relation: " + r.relation;
        c.params = report_json(r.report);
        c.ok = verdict_ok(r.report, cfg.strict) && r.report.classical != 0;
        c.verdict = verdict_name(r.report.verdict);
        c.seconds = each;
        out.push_back(std::move(c));
    }
}

inline json weak_json(const WeakReport& w) {
    json j;
    j["lhs"] = w.lhs;
    j["rhs"] = w.rhs;
    j["lattice_rank"] = w.lattice_rank;
    j["generators"] = json::array();
    for (auto& t : w.trace) {
        json g = report_json(t.report);
        g["generator"] = t.generator;
        if (w.used_lattice) {
            g["residual"] = t.residual;
            g["residual_trivial"] = t.residual_trivial;
        }
        j["generators"].push_back(g);
    }
    return j;
}

inline void suite_quantum_m3(const RunConfig& cfg, std::vector<Check>& out) {
    out.push_back(timed("quantum-m3/conjugation-tables", "conjugation identities, both sectors", [&](Check& c) {
        auto ids = verify_conjugation_tables();
        int good = 0;
        json lines = json::array();
        for (auto& x : ids) {
            good += x.exact;
            lines.push_back({{"name", x.name}, {"sector", x.sector ? "b^-1" : "b"}, {"exact", x.exact}, {"image", x.image}});
        }
        c.params = {{"identities", ids.size()}, {"exact", good}, {"lines", lines}};
        c.ok = good == (int)ids.size();
        c.verdict = c.ok ? "EqualExact" : "NotEqual";
    }));

    M3Options mo;
    mo.eq = equal_options(cfg);
    auto t0 = std::chrono::steady_clock::now();
    M3ConsistencyReport rep = verify_m3_consistency(mo);
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    auto weak_ok = [&](const WeakReport& w) {
        if (!w.equal) return false;
        for (auto& t : w.trace)
            if (t.report.verdict == Verdict::EqualRandomized && !verdict_ok(t.report, cfg.strict)) return false;
        return true;
    };
    static const char* rel_names[] = {"order-three", "consistency", "pentagon"};
    for (size_t i = 0; i < rep.relations.size(); ++i) {
        Check c;
        c.id = "quantum-m3/relation/" + std::string(i < 3 ? rel_names[i] : std::to_string(i).c_str());
        c.ref = "m=3 relation, empty lattice";
        c.params = weak_json(rep.relations[i]);
        c.ok = weak_ok(rep.relations[i]);
        c.verdict = c.ok ? "WeaklyEqual" : "NotEqual";
        c.seconds = dt;
        out.push_back(std::move(c));
    }
    {
        Check c;
        c.id = "quantum-m3/relation/inversion-control";
        c.ref = "m=3 inversion, empty lattice (negative control)";
        c.params = weak_json(rep.inversion_plain);
        c.ok = !rep.inversion_plain.equal;
        c.verdict = c.ok ? "NotEqual (expected)" : "Equal (unexpected)";
        out.push_back(std::move(c));
    }
    {
        Check c;
        c.id = "quantum-m3/relation/inversion";
        c.ref = "m=3 inversion modulo the diamond relation";
        c.params = weak_json(rep.inversion_lattice);
        c.params["lattice"] = rep.lattice_rows;
        c.ok = rep.inversion_lattice.equal;
        c.verdict = c.ok ? "WeaklyEqualModLattice" : "NotEqual";
        out.push_back(std::move(c));
    }
    {
        Check c;
        c.id = "quantum-m3/relation/inversion-residual";
        c.ref = "m=3 inversion: LHS = RHS K_ts";
        c.params = weak_json(rep.inversion_residual);
        c.ok = weak_ok(rep.inversion_residual);
        c.verdict = c.ok ? "WeaklyEqual" : "NotEqual";
        out.push_back(std::move(c));
    }
    for (size_t i = 0; i < rep.k_images.size(); ++i) {
        auto& k = rep.k_images[i];
        Check c;
        char num[8];
        std::snprintf(num, sizeof num, "%02zu", i);
        c.id = "quantum-m3/K_ts/" + std::string(num) + "-" + k.symbol;
        c.ref = "K_ts acts trivially modulo the diamond relation";
        c.params = {{"symbol", k.symbol}, {"image", k.image}, {"trivial_without_lattice", k.trivial_exact},
                    {"trivial_mod_lattice", k.trivial_mod_lattice}};
        c.ok = k.trivial_mod_lattice;
        c.verdict = k.trivial_exact ? "Identity" : k.trivial_mod_lattice ? "IdentityModLattice" : "NotIdentity";
        out.push_back(std::move(c));
    }
    {
        Check c;
        c.id = "quantum-m3/K_ts/control";
        c.ref = "K_ts is nontrivial without the diamond relation";
        c.params = {{"moved", rep.k_nontrivial},
                    {"constant", {{"r0", rep.k_constant.r0.get_str()},
                                  {"r_b2", rep.k_constant.rp.get_str()},
                                  {"r_b-2", rep.k_constant.rm.get_str()}}}};
        c.ok = !rep.k_nontrivial.empty();
        c.verdict = c.ok ? "NotIdentity (expected)" : "Identity (unexpected)";
        out.push_back(std::move(c));
    }
}

inline std::vector<Check> run(const RunConfig& cfg) {
    validate(cfg);
    std::vector<Check> out;
    for (auto& s : cfg.suites) {
        if (s == "groupoid") suite_groupoid(cfg, out);
        else if (s == "quiverdt") suite_quiverdt(cfg, out);
        else if (s == "classical") suite_classical(cfg, out);
        else if (s == "quantum-m2") suite_quantum_m2(cfg, out);
        else if (s == "quantum-m3") suite_quantum_m3(cfg, out);
    }
    std::stable_sort(out.begin(), out.end(), [](const Check& a, const Check& b) { return a.id < b.id; });
    return out;
}

} // namespace rcoord::cli
