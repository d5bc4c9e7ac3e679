#pragma once

#include <map>
#include <numeric>
#include <queue>
#include <string>
#include <vector>

#include "rcoord/laurent.hpp"
#include "rcoord/quiverdt.hpp"

namespace rcoord {

// ---------------------------------------------------------------------------
// Label indexing: label i owns variables 2i (Y, log q) and 2i+1 (Z, log p).

struct LabelIndex {
    std::vector<ShadedLabel> labels;
    std::map<ShadedLabel, int> pos;

    explicit LabelIndex(const QuiverDT& Q) {
        for (const auto& s : Q.shaded) labels.push_back(s.label);
        std::sort(labels.begin(), labels.end());
        for (int i = 0; i < (int)labels.size(); ++i) pos[labels[i]] = i;
    }
    int size() const { return (int)labels.size(); }
    int nvars() const { return 2 * size(); }
    int of(const ShadedLabel& l) const {
        auto it = pos.find(l);
        if (it == pos.end()) fail("Unsupported", "label outside the index");
        return it->second;
    }
    int Y(const ShadedLabel& l) const { return 2 * of(l); }
    int Z(const ShadedLabel& l) const { return 2 * of(l) + 1; }
    VarNamer namer(const LabelNamer& nm = default_namer()) const {
        return [this, nm](int v) { return std::string(v % 2 ? "Z_" : "Y_") + shaded_name(labels[v / 2], nm); };
    }
};

// State of ratio coordinates: entry 2i is Y, 2i+1 is Z of label i.
using CoordState = std::vector<RatFn>;

inline CoordState identity_state(const LabelIndex& idx) {
    CoordState s;
    for (int v = 0; v < idx.nvars(); ++v) s.push_back(RatFn::var(idx.nvars(), v));
    return s;
}

// ---------------------------------------------------------------------------
// Mutations and the p-map

using Assignment = std::vector<RatFn>;  // indexed by quiver vertex

inline void require_mutable(const QuiverDT& Q, int k) {
    if (k < 0 || k >= Q.nv) fail("Unsupported", "vertex out of range");
    if (Q.frozen[k]) fail("FrozenDirection", "vertex " + Q.addr[k] + " is frozen");
}

inline Assignment a_mutation(const Assignment& D, const QuiverDT& Q, int k) {
    require_mutable(Q, k);
    int n = D[k].nvars();
    RatFn pos = RatFn::constant(n, 1), neg = RatFn::constant(n, 1);
    for (int j = 0; j < Q.nv; ++j) {
        int e = Q.eps[k][j];
        if (e > 0) pos = pos * D[j].pow(e);
        if (e < 0) neg = neg * D[j].pow(-e);
    }
    Assignment out = D;
    out[k] = (pos + neg) / D[k];
    return out;
}

inline Assignment x_mutation(const Assignment& X, const QuiverDT& Q, int k) {
    require_mutable(Q, k);
    Assignment out = X;
    bool isolated = std::all_of(Q.eps[k].begin(), Q.eps[k].end(), [](int e) { return e == 0; });
    if (isolated) {
        out[k] = X[k].pow(-2);
        return out;
    }
    int n = X[k].nvars();
    RatFn one = RatFn::constant(n, 1);
    for (int i = 0; i < Q.nv; ++i) {
        if (i == k) {
            out[i] = X[k].inv();
            continue;
        }
        int e = Q.eps[i][k];
        if (!e) continue;
        out[i] = X[i] * (one + X[k].pow(e > 0 ? -1 : 1)).pow(-e);
    }
    return out;
}

// p*X_i = prod_j Delta_j^{eps_ij}, as monomials in the Delta variables.
inline Assignment p_pullback(const QuiverDT& Q) {
    Assignment out;
    for (int i = 0; i < Q.nv; ++i) out.push_back(RatFn::monomial(Q.nv, Q.eps[i]));
    return out;
}

inline Assignment delta_variables(int nv) {
    Assignment D;
    for (int v = 0; v < nv; ++v) D.push_back(RatFn::var(nv, v));
    return D;
}

// Ratio coordinates of Q read off an assignment of the Delta's.
inline CoordState ratio_state(const QuiverDT& Q, const LabelIndex& idx, const Assignment& D) {
    CoordState s(idx.nvars());
    for (const auto& t : Q.shaded) {
        s[idx.Y(t.label)] = D[t.pred()] / D[t.dotted()];
        s[idx.Z(t.label)] = D[t.succ()] / D[t.dotted()];
    }
    return s;
}

// ---------------------------------------------------------------------------
// Coordinate changes for elementary transformations

// New coordinates after tr, written in terms of the current state.
inline CoordState apply_change(const QdtTransform& tr, const LabelIndex& idx, const CoordState& s) {
    CoordState o = s;
    switch (tr.kind) {
    case QdtKind::T: {
        const RatFn &Yr = s[idx.Y(tr.r)], &Zr = s[idx.Z(tr.r)], &Ys = s[idx.Y(tr.s)], &Zs = s[idx.Z(tr.s)];
        o[idx.Y(tr.r)] = (Zs + Ys / Yr).inv();
        o[idx.Z(tr.r)] = (Yr * Zs / (Zr * Ys) + Zr.inv()).inv();
        o[idx.Y(tr.s)] = Yr * Zs + Ys;
        o[idx.Z(tr.s)] = Zr * Zs;
        break;
    }
    case QdtKind::F: {
        const RatFn &Yr = s[idx.Y(tr.r)], &Zr = s[idx.Z(tr.r)], &Ys = s[idx.Y(tr.s)];
        o[idx.Z(tr.r)] = Zr / s[idx.Z(tr.s)];
        o[idx.Y(tr.s)] = Ys * Yr;
        break;
    }
    case QdtKind::A: {
        const RatFn &Y = s[idx.Y(tr.s)], &Z = s[idx.Z(tr.s)];
        o[idx.Y(tr.s)] = Z.inv();
        o[idx.Z(tr.s)] = Y / Z;
        break;
    }
    case QdtKind::P:
        for (const auto& l : idx.labels) {
            ShadedLabel to = tr.image(l);
            o[idx.Y(to)] = s[idx.Y(l)];
            o[idx.Z(to)] = s[idx.Z(l)];
        }
        break;
    }
    return o;
}

// The substitution map of tr on the (Y, Z) variables.
inline CoordState classical_change(const QdtTransform& tr, const LabelIndex& idx) {
    return apply_change(tr, idx, identity_state(idx));
}

// Recomputes the new coordinates from the Delta's of the transformed quiver.
inline CoordState change_from_delta(const QdtTransform& tr, const QuiverDT& Q, const LabelIndex& idx) {
    Assignment D = delta_variables(Q.nv);
    QuiverDT R = apply_transform(Q, tr);
    if (tr.kind == QdtKind::T) D = a_mutation(D, Q, Q.at(tr.s).dotted());
    return ratio_state(R, idx, D);
}

inline bool states_equal(const CoordState& a, const CoordState& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

inline bool state_positive(const CoordState& s) {
    return std::all_of(s.begin(), s.end(), [](const RatFn& f) { return f.positive(); });
}

// Runs a word of transformations; the quiver is carried along so every step
// is checked for applicability.
inline CoordState run_word(QuiverDT Q, const QdtWord& w, const LabelIndex& idx, CoordState s) {
    for (const auto& tr : w) {
        Q = apply_transform(Q, tr);
        s = apply_change(tr, idx, s);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Loop relations and the relation lattice

using IntRow = std::vector<long>;

// Integer lattice of log-relations among the (q, p) variables.
class RelationLattice {
public:
    RelationLattice() = default;
    explicit RelationLattice(int nvars) : n_(nvars) {}

    int nvars() const { return n_; }
    int rank() const { return (int)rows_.size(); }
    const std::vector<IntRow>& rows() const { return rows_; }
    const std::vector<int>& pivots() const { return piv_; }

    void add(IntRow r) {
        raw_.push_back(std::move(r));
        rebuild();
    }
    void add_all(const std::vector<IntRow>& rs) {
        raw_.insert(raw_.end(), rs.begin(), rs.end());
        rebuild();
    }

    // Reduced form of v: pivot coordinates eliminated.
    IntRow reduce(IntRow v) const {
        for (size_t i = 0; i < rows_.size(); ++i) {
            long c = v[piv_[i]];
            if (!c) continue;
            for (int k = 0; k < n_; ++k) v[k] -= c * rows_[i][k];
        }
        return v;
    }
    bool contains(const IntRow& v) const {
        auto r = reduce(v);
        return std::all_of(r.begin(), r.end(), [](long x) { return x == 0; });
    }

    // Monomial images eliminating the pivot variables.
    std::vector<std::vector<int>> substitution() const {
        std::vector<std::vector<int>> img(n_, std::vector<int>(n_, 0));
        for (int v = 0; v < n_; ++v) img[v][v] = 1;
        for (size_t i = 0; i < rows_.size(); ++i) {
            int p = piv_[i];
            img[p][p] = 0;
            for (int k = 0; k < n_; ++k)
                if (k != p) img[p][k] = (int)-rows_[i][k];
        }
        return img;
    }
    RatFn reduce(const RatFn& f) const {
        if (rows_.empty()) return f;
        return f.substitute_monomials(substitution(), n_);
    }

    std::string dump(const VarNamer& nm = default_var_namer()) const {
        std::ostringstream os;
        os << "lattice rank " << rank() << " in " << n_ << " variables\n";
        for (size_t i = 0; i < rows_.size(); ++i) {
            os << "pivot " << nm(piv_[i]) << ":";
            for (long x : rows_[i]) os << " " << x;
            os << "\n";
        }
        return os.str();
    }

private:
    // Gauss-Jordan over the integers with unit pivots only.
    void rebuild() {
        std::vector<IntRow> m = raw_;
        rows_.clear();
        piv_.clear();
        std::vector<bool> used(m.size(), false);
        for (int col = n_ - 1; col >= 0; --col) {
            int pick = -1;
            for (size_t i = 0; i < m.size(); ++i)
                if (!used[i] && std::abs(m[i][col]) == 1) {
                    pick = (int)i;
                    break;
                }
            if (pick < 0) {
                // combine two rows into a unit entry when their gcd allows it
                for (size_t i = 0; i < m.size() && pick < 0; ++i) {
                    if (used[i] || !m[i][col]) continue;
                    for (size_t j = i + 1; j < m.size() && pick < 0; ++j) {
                        if (used[j] || !m[j][col]) continue;
                        long a = m[i][col], b = m[j][col];
                        long x0 = 1, x1 = 0, y0 = 0, y1 = 1, r0 = a, r1 = b;
                        while (r1) {
                            long q = r0 / r1;
                            std::tie(r0, r1) = std::make_pair(r1, r0 - q * r1);
                            std::tie(x0, x1) = std::make_pair(x1, x0 - q * x1);
                            std::tie(y0, y1) = std::make_pair(y1, y0 - q * y1);
                        }
                        if (std::abs(r0) != 1) continue;
                        IntRow c(n_);
                        for (int k = 0; k < n_; ++k) c[k] = x0 * m[i][k] + y0 * m[j][k];
                        IntRow d(n_);
                        for (int k = 0; k < n_; ++k) d[k] = (b / r0) * m[i][k] - (a / r0) * m[j][k];
                        m[i] = c;
                        m[j] = d;
                        pick = (int)i;
                    }
                }
            }
            if (pick < 0) continue;
            used[pick] = true;
            IntRow r = m[pick];
            if (r[col] < 0)
                for (auto& x : r) x = -x;
            for (size_t i = 0; i < m.size(); ++i) {
                if ((int)i == pick || !m[i][col]) continue;
                long c = m[i][col];
                for (int k = 0; k < n_; ++k) m[i][k] -= c * r[k];
            }
            for (auto& row : rows_) {
                long c = row[col];
                if (!c) continue;
                for (int k = 0; k < n_; ++k) row[k] -= c * r[k];
            }
            rows_.push_back(r);
            piv_.push_back(col);
        }
        for (size_t i = 0; i < m.size(); ++i)
            if (!used[i] && std::any_of(m[i].begin(), m[i].end(), [](long x) { return x != 0; }))
                fail("Unsupported", "relation lattice has no unit pivot for a remaining row");
    }

    int n_ = 0;
    std::vector<IntRow> raw_;
    std::vector<IntRow> rows_;
    std::vector<int> piv_;
};

// Log-reading of the side from vertex a to vertex b of shaded triangle t:
// log(Delta_a / Delta_b) as a vector over (q, p).
inline IntRow side_reading(const ShadedTriangle& t, int a, int b, const LabelIndex& idx) {
    IntRow r(idx.nvars(), 0);
    // log Delta_v - log Delta_dot for each corner
    auto rel = [&](int v) {
        IntRow x(idx.nvars(), 0);
        if (v == t.pred()) x[idx.Y(t.label)] = 1;
        else if (v == t.succ()) x[idx.Z(t.label)] = 1;
        return x;
    };
    IntRow ra = rel(a), rb = rel(b);
    for (size_t k = 0; k < r.size(); ++k) r[k] = ra[k] - rb[k];
    return r;
}

// One relation per fundamental cycle of the multigraph whose edges are the
// sides of the shaded triangles.
inline std::vector<IntRow> loop_relations(const QuiverDT& Q, const LabelIndex& idx) {
    struct Edge {
        int a, b;
        IntRow reading;  // log(Delta_a / Delta_b)
    };
    std::vector<Edge> edges;
    for (const auto& t : Q.shaded) {
        if (t.v[0] == t.v[1] || t.v[1] == t.v[2] || t.v[0] == t.v[2])
            fail("AmbiguousEdge", "shaded triangle " + shaded_name(t.label, default_namer()) +
                                      " has a repeated corner, its side readings are ambiguous");
        for (int k = 0; k < 3; ++k) {
            int a = t.v[k], b = t.v[(k + 1) % 3];
            edges.push_back({a, b, side_reading(t, a, b, idx)});
        }
    }
    std::vector<std::vector<std::pair<int, int>>> adj(Q.nv);  // (edge, +1 if leaving from a)
    for (int e = 0; e < (int)edges.size(); ++e) {
        adj[edges[e].a].push_back({e, 1});
        adj[edges[e].b].push_back({e, -1});
    }
    int n = idx.nvars();
    std::vector<IntRow> pot(Q.nv);  // log Delta_v - log Delta_root
    std::vector<bool> tree(edges.size(), false);
    for (int root = 0; root < Q.nv; ++root) {
        if (!pot[root].empty()) continue;
        pot[root].assign(n, 0);
        std::queue<int> bfs;
        bfs.push(root);
        while (!bfs.empty()) {
            int u = bfs.front();
            bfs.pop();
            for (auto [e, dir] : adj[u]) {
                int w = dir > 0 ? edges[e].b : edges[e].a;
                if (!pot[w].empty()) continue;
                tree[e] = true;
                pot[w].resize(n);
                // dir > 0: u = a, w = b, log D_a - log D_b = reading
                for (int k = 0; k < n; ++k) pot[w][k] = pot[u][k] - dir * edges[e].reading[k];
                bfs.push(w);
            }
        }
    }
    std::vector<IntRow> out;
    for (int e = 0; e < (int)edges.size(); ++e) {
        if (tree[e]) continue;
        IntRow r(n);
        bool nonzero = false;
        for (int k = 0; k < n; ++k) {
            r[k] = pot[edges[e].a][k] - pot[edges[e].b][k] - edges[e].reading[k];
            nonzero |= r[k] != 0;
        }
        if (nonzero) out.push_back(r);
    }
    return out;
}

inline RelationLattice relation_lattice(const QuiverDT& Q, const LabelIndex& idx) {
    RelationLattice L(idx.nvars());
    L.add_all(loop_relations(Q, idx));
    return L;
}

// ---------------------------------------------------------------------------
// 2-form check

struct TwoFormReport {
    bool holds = false;          // sum eps_ij dlog_i ^ dlog_j = -2 sum dq ^ dp
    bool literal_holds = false;  // same with -2 sum dp ^ dq
    int dim = 0;
};

inline TwoFormReport check_two_form(const QuiverDT& Q) {
    int n = Q.nv;
    std::vector<std::vector<long>> lhs(n, std::vector<long>(n, 0)), dqdp(n, std::vector<long>(n, 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) lhs[i][j] = Q.eps[i][j] - Q.eps[j][i];
    for (const auto& t : Q.shaded) {
        std::vector<long> L(n, 0), M(n, 0);
        L[t.pred()] += 1, L[t.dotted()] -= 1;
        M[t.succ()] += 1, M[t.dotted()] -= 1;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) dqdp[i][j] += L[i] * M[j] - L[j] * M[i];
    }
    TwoFormReport r;
    r.dim = n;
    r.holds = r.literal_holds = true;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (lhs[i][j] != -2 * dqdp[i][j]) r.holds = false;
            if (lhs[i][j] != 2 * dqdp[i][j]) r.literal_holds = false;
        }
    return r;
}

// ---------------------------------------------------------------------------
// Relations of the Kashaev groupoid pushed through the quiver realization

struct ClassicalRelationResult {
    RelationInstance rel;
    bool supported = false;
    bool exact = false;        // identical substitutions
    bool mod_lattice = false;  // identical after lattice reduction
    bool positive = false;
    std::string note;
};

inline ClassicalRelationResult classical_relation_check(const DottedTriangulation& d, const RelationInstance& rel,
                                                        int m, const RelationLattice* lattice = nullptr) {
    ClassicalRelationResult res;
    res.rel = rel;
    std::string why;
    if (!try_apply_word(d, rel.lhs, &why)) {
        res.note = why;
        return res;
    }
    res.supported = true;
    QuiverDT Q = build_Qm(d, m);
    LabelIndex idx(Q);
    CoordState id = identity_state(idx);
    CoordState L = run_word(Q, realize_word(d, rel.lhs, m), idx, id);
    CoordState R = run_word(Q, realize_word(d, rel.rhs, m), idx, id);
    res.positive = state_positive(L) && state_positive(R);
    res.exact = states_equal(L, R);
    if (res.exact) res.mod_lattice = true;
    else if (lattice) {
        res.mod_lattice = true;
        for (size_t i = 0; i < L.size() && res.mod_lattice; ++i)
            res.mod_lattice = lattice->reduce(L[i]) == lattice->reduce(R[i]);
    }
    return res;
}

} // namespace rcoord
