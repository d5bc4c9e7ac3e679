// Acceptance run: one line per criterion, nonzero exit if any fails.
#include "rcoord/classical.hpp"
#include "rcoord/dilog.hpp"
#include "rcoord/qtorus.hpp"
#include "rcoord/quiverdt.hpp"
#include "rcoord/surface.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

using namespace rcoord;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

std::vector<DottedTriangulation> all_dottings(const std::string& surface) {
    auto base = make_dotted(builtin_surface(surface));
    std::vector<DottedTriangulation> out;
    int n = base.size(), total = (int)std::pow(3, n);
    for (int mask = 0; mask < total; ++mask) {
        auto d = base;
        for (int t = 0, x = mask; t < n; ++t, x /= 3) d.dot[t] = x % 3;
        out.push_back(d);
    }
    return out;
}

// 1. classical_change agrees with the change computed from the delta variables
Outcome criterion1() {
    Outcome o;
    long checked = 0, bad = 0;
    for (int m : {2, 3})
        for (auto nm : {"square", "punctured-torus"})
            for (auto& d : all_dottings(nm))
                for (int t = 0; t < d.size(); ++t)
                    for (int s = 0; s < d.size(); ++s) {
                        if (s == t || !try_apply(d, KashaevMove::T(t, s))) continue;
                        QuiverDT Q = build_Qm(d, m);
                        LabelIndex idx(Q);
                        QdtWord w = flip_sequence(t, s, m);
                        for (auto& tr : dotchange_sequence(t, m)) w.push_back(tr);
                        for (auto& tr : w) {
                            // classical_change evaluated on the ratio coordinates of Q
                            auto a = apply_change(tr, idx, ratio_state(Q, idx, delta_variables(Q.nv)));
                            auto b = change_from_delta(tr, Q, idx);
                            ++checked;
                            if (!states_equal(a, b)) ++bad;
                            Q = apply_transform(Q, tr);
                        }
                    }
    o.ok = bad == 0 && checked > 0;
    o.detail = std::to_string(checked) + " transforms, " + std::to_string(bad) + " mismatches";
    return o;
}

// 2. groupoid relations through realize_move and classical_change
Outcome criterion2() {
    Outcome o;
    long m2 = 0, m2bad = 0, m3 = 0, m3bad = 0, inv = 0, inv_exact = 0, inv_badlat = 0;
    for (int m : {2, 3})
        for (auto nm : {"square", "punctured-torus", "pentagon"})
            for (auto& d : all_dottings(nm)) {
                QuiverDT Q = build_Qm(d, m);
                LabelIndex idx(Q);
                auto L = relation_lattice(Q, idx);
                for (auto& rel : relation_instances(d.size(), true)) {
                    auto r = classical_relation_check(d, rel, m, &L);
                    if (!r.supported) continue;
                    if (m == 2) {
                        ++m2;
                        if (!r.exact) ++m2bad;
                    } else if (rel.name == "inversion") {
                        ++inv;
                        if (r.exact) ++inv_exact;
                        if (!r.mod_lattice) ++inv_badlat;
                    } else {
                        ++m3;
                        if (!r.exact) ++m3bad;
                    }
                }
            }
    o.ok = m2 > 0 && inv > 0 && m2bad == 0 && m3bad == 0 && inv_exact == 0 && inv_badlat == 0;
    std::ostringstream os;
    os << "m=2 " << m2 - m2bad << "/" << m2 << " exact; m=3 " << m3 - m3bad << "/" << m3
       << " exact; m=3 inversion " << inv - inv_badlat << "/" << inv << " mod lattice, " << inv_exact
       << " exact without it";
    o.detail = os.str();
    return o;
}

// 3. 2-form diagonalization
Outcome criterion3() {
    Outcome o;
    int n = 0, bad = 0;
    for (int m : {2, 3})
        for (auto nm : {"triangle", "square"})
            for (auto& d : all_dottings(nm)) {
                ++n;
                if (!check_two_form(build_Qm(d, m)).holds) ++bad;
            }
    o.ok = bad == 0;
    o.detail = std::to_string(n - bad) + "/" + std::to_string(n) + " configurations";
    return o;
}

// Two words are equal up to swapping adjacent factors on disjoint labels.
bool equal_up_to_commuting(const std::vector<std::string>& a, const std::vector<std::string>& b,
                           const std::function<bool(const std::string&, const std::string&)>& disjoint) {
    std::set<std::vector<std::string>> seen{a};
    std::deque<std::vector<std::string>> q{a};
    while (!q.empty()) {
        auto w = q.front();
        q.pop_front();
        if (w == b) return true;
        for (size_t i = 0; i + 1 < w.size(); ++i) {
            if (!disjoint(w[i], w[i + 1])) continue;
            auto v = w;
            std::swap(v[i], v[i + 1]);
            if (seen.insert(v).second) q.push_back(v);
        }
    }
    return false;
}

// 4. flip decomposition fidelity
Outcome criterion4() {
    Outcome o;
    std::ostringstream os;
    long ok = 0, bad = 0;
    for (int m : {2, 3, 4})
        for (auto nm : {"square", "punctured-torus"})
            for (auto& d : all_dottings(nm))
                for (int t = 0; t < d.size(); ++t)
                    for (int s = 0; s < d.size(); ++s) {
                        if (s == t) continue;
                        auto r = try_apply(d, KashaevMove::T(t, s));
                        if (!r) continue;
                        auto Q = apply_word(build_Qm(d, m), flip_sequence(t, s, m));
                        (same_quiver(Q, build_Qm(*r, m)) ? ok : bad)++;
                    }
    // m = 3 against the operator factor list; t1, t2, t3 = t_11, t_21, t_22.
    // The operator product is read right to left as a mutation sequence.
    auto name = [](const ShadedLabel& l) {
        static const std::map<std::pair<int, int>, int> k{{{1, 1}, 1}, {{2, 1}, 2}, {{2, 2}, 3}};
        return std::string(l.tri == 0 ? "t" : "s") + std::to_string(k.at({l.r, l.c}));
    };
    std::vector<std::string> seq;
    for (auto& tr : flip_sequence(0, 1, 3)) seq.push_back((tr.kind == QdtKind::T ? "T " : "F ") + name(tr.r) + " " + name(tr.s));
    std::vector<std::string> ops{"T t3 s1", "T t2 s2", "F s2 t3", "T t3 s3", "T t1 s2"};
    std::reverse(ops.begin(), ops.end());
    auto disjoint = [](const std::string& x, const std::string& y) {
        std::istringstream a(x), b(y);
        std::string k, a1, a2, b1, b2;
        a >> k >> a1 >> a2;
        b >> k >> b1 >> b2;
        return a1 != b1 && a1 != b2 && a2 != b1 && a2 != b2;
    };
    bool matches = equal_up_to_commuting(seq, ops, disjoint);
    o.ok = bad == 0 && ok > 0 && matches;
    os << ok << "/" << ok + bad << " flips reproduce the target quiver; m=3 word ";
    for (auto& x : seq) os << "[" << x << "]";
    os << (matches ? " matches" : " does not match") << " the operator factor list";
    o.detail = os.str();
    return o;
}

// 5. quantum m = 2
Outcome criterion5() {
    Outcome o;
    EqualOptions opt;
    auto res = verify_quantum_m2(opt);
    int bad = 0, maxdim = 0;
    for (auto& c : res) {
        bool good = c.report.classical == 1 && c.report.randomized == 1 && c.report.method == "matrix" &&
                    c.report.seeds_used.size() == 3;
        if (!good) {
            if (bad < 3) o.detail += c.relation + "/" + c.generator + " failed; ";
            ++bad;
        }
        maxdim = std::max(maxdim, c.report.dim);
    }
    o.ok = bad == 0 && !res.empty() && opt.matrix.N == 7;
    o.detail += std::to_string(res.size() - bad) + "/" + std::to_string(res.size()) +
                " generator images, N=7, 3 seeds, max dim " + std::to_string(maxdim);
    return o;
}

// 6. conjugation tables in both sectors
Outcome criterion6() {
    Outcome o;
    auto ids = verify_conjugation_tables();
    int good = 0;
    for (auto& c : ids) {
        good += c.exact;
        if (!c.exact) o.detail += c.name + " sector " + std::to_string(c.sector) + " differs; ";
    }
    o.ok = good == (int)ids.size() && ids.size() == 24;
    o.detail += std::to_string(good) + "/" + std::to_string(ids.size()) + " identities exact";
    return o;
}

// 7. m = 3 consistency
Outcome criterion7() {
    Outcome o;
    auto rep = verify_m3_consistency();
    std::vector<std::string> names{"t1", "t2", "t3", "s1", "s2", "s3"};
    enum { t1, t2, t3, s1, s2, s3 };
    auto Q = [](int l) { return LinForm::Q(6, l); };
    auto P = [](int l) { return LinForm::P(6, l); };
    std::map<std::string, LinForm> want;
    for (int l = 0; l < 6; ++l) want["Q_" + names[l]] = Q(l), want["P_" + names[l]] = P(l);
    want["Q_s1"] = Q(s1) + Q(s3) + P(t2) - Q(t3) + P(s1) - P(s3);
    want["P_s3"] = P(s3) - P(t2) - Q(s3) + P(s3) + Q(t3) - P(s1);
    want["Q_s3"] = Q(t3) - P(t2) - P(s1) + P(s3);
    want["Q_t2"] = Q(s3) + P(t2) - Q(t3) + P(s1) + Q(t2) - P(s3);
    want["P_t3"] = P(t3) + P(t2) + Q(s3) - Q(t3) + P(s1) - P(s3);
    int displayed = 0;
    for (auto& k : rep.k_images)
        if (want.count(k.symbol) && want[k.symbol].str(names) == k.image && k.trivial_mod_lattice) ++displayed;
    std::set<std::string> moved(rep.k_nontrivial.begin(), rep.k_nontrivial.end());
    bool control = true;
    for (auto s : {"Q_s1", "P_s3", "Q_s3", "Q_t2", "P_t3"}) control = control && moved.count(s);
    bool rel = true;
    for (auto& r : rep.relations) rel = rel && r.equal;
    o.ok = rep.all_ok() && displayed == 12 && rep.k_images.size() == 12 && control && rel;
    std::ostringstream os;
    os << "relations " << (rel ? "equal" : "NOT equal") << "; inversion plain "
       << (rep.inversion_plain.equal ? "equal" : "not equal") << ", mod lattice "
       << (rep.inversion_lattice.equal ? "equal" : "not equal") << "; K_ts images " << displayed
       << "/12 as displayed; moved without lattice:";
    for (auto& s : rep.k_nontrivial) os << " " << s;
    o.detail = os.str();
    return o;
}

// 8. groupoid exploration on the punctured torus
Outcome criterion8() {
    Outcome o;
    auto g = explore(make_dotted(punctured_torus()), 2000);
    o.ok = g.nodes.size() >= 1000 && g.components == 1 && g.relation_instances > 0 && g.relation_failures == 0;
    std::ostringstream os;
    os << g.nodes.size() << " objects, " << g.edges.size() << " edges, " << g.components << " component(s), "
       << g.relation_instances << " relation instances, " << g.relation_failures << " failures";
    o.detail = os.str();
    return o;
}

// 9. p-map equivariance
Outcome criterion9() {
    Outcome o;
    long ok = 0, bad = 0;
    for (int m : {2, 3})
        for (auto nm : {"triangle", "square", "punctured-torus", "pentagon", "sphere4"}) {
            auto Q = build_Qm(make_dotted(builtin_surface(nm)), m);
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
                    (v == Xm[i] ? ok : bad)++;
                }
            }
        }
    o.ok = bad == 0 && ok > 0;
    o.detail = std::to_string(ok) + "/" + std::to_string(ok + bad) + " coordinates commute with mutation";
    return o;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* what;
        double bound;
        Outcome (*run)();
    };
    const Criterion all[] = {
        {1, "classical elementary changes", 1, criterion1},
        {2, "classical groupoid relations", 30, criterion2},
        {3, "2-form diagonalization", 1, criterion3},
        {4, "flip decomposition fidelity", 10, criterion4},
        {5, "quantum m=2 relations", 60, criterion5},
        {6, "dilog conjugation identities", 5, criterion6},
        {7, "m=3 consistency", 60, criterion7},
        {8, "groupoid exploration", 120, criterion8},
        {9, "p-map equivariance", 5, criterion9},
    };
    int failed = 0;
    for (auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail = std::string("exception: ") + e.what();
        }
        double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool pass = o.ok && dt < c.bound;
        if (!pass) ++failed;
        std::printf("criterion %d %-30s %s  %.3fs (bound %.0fs)  %s\n", c.id, c.what, pass ? "PASS" : "FAIL", dt,
                    c.bound, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
