#pragma once

#include <array>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "rcoord/error.hpp"
#include "rcoord/surface.hpp"

namespace rcoord {

// Shaded triangle label t_{r,c}: tri is the label index of the ideal
// triangle, (r,c) ranges over 1 <= c <= r <= m-1.
struct ShadedLabel {
    int tri = 0;
    int r = 1;
    int c = 1;
    auto operator<=>(const ShadedLabel&) const = default;
    bool operator==(const ShadedLabel&) const = default;
};

using LabelNamer = std::function<std::string(int)>;

inline std::string shaded_name(const ShadedLabel& l, const LabelNamer& nm) {
    return nm(l.tri) + "_" + std::to_string(l.r) + std::to_string(l.c);
}

inline LabelNamer default_namer() {
    return [](int i) { return default_label_name(i); };
}

// Three vertices in arrow order v[0] -> v[1] -> v[2] -> v[0]; dot indexes v.
struct ShadedTriangle {
    std::array<int, 3> v{};
    int dot = 0;
    ShadedLabel label;

    int dotted() const { return v[dot]; }
    int succ() const { return v[(dot + 1) % 3]; }
    int pred() const { return v[(dot + 2) % 3]; }
};

struct QuiverDT {
    int nv = 0;
    std::vector<std::string> addr;
    std::vector<bool> frozen;
    std::vector<std::vector<int>> eps;
    std::vector<ShadedTriangle> shaded;
    int two_cycles_cancelled = 0;  // opposite arrow pairs met while building

    int index(const ShadedLabel& l) const {
        for (int i = 0; i < (int)shaded.size(); ++i)
            if (shaded[i].label == l) return i;
        return -1;
    }
    const ShadedTriangle& at(const ShadedLabel& l) const {
        int i = index(l);
        if (i < 0) fail("Unsupported", "no shaded triangle with that label");
        return shaded[i];
    }

    // Side k runs v[k] -> v[k+1]; invisible when no arrow is left there.
    bool side_visible(const ShadedTriangle& s, int k) const { return eps[s.v[k]][s.v[(k + 1) % 3]] != 0; }
    int invisible_side(const ShadedTriangle& s) const {
        for (int k = 0; k < 3; ++k)
            if (!side_visible(s, k)) return k;
        return -1;
    }
    bool defective(const ShadedTriangle& s) const { return invisible_side(s) >= 0; }

    // Structural invariants; returns an empty string when all hold.
    std::string check() const {
        for (int i = 0; i < nv; ++i) {
            if (eps[i][i] != 0) return "nonzero diagonal";
            for (int j = 0; j < nv; ++j)
                if (eps[i][j] != -eps[j][i]) return "eps not skew";
        }
        std::vector<int> cover(nv, 0);
        std::map<ShadedLabel, int> seen;
        for (const auto& s : shaded) {
            if (seen[s.label]++) return "duplicate shaded label";
            int invis = 0;
            for (int k = 0; k < 3; ++k) {
                cover[s.v[k]]++;
                int e = eps[s.v[k]][s.v[(k + 1) % 3]];
                if (e < 0) return "shaded triangle side against the arrows";
                invis += e == 0;
            }
            if (invis > 1) return "shaded triangle with two invisible sides";
            if (invis == 1) {
                int k = invisible_side(s);
                int a = s.v[k], b = s.v[(k + 1) % 3];
                int partners = 0;
                for (const auto& o : shaded) {
                    if (&o == &s) continue;
                    for (int j = 0; j < 3; ++j)
                        if (o.v[j] == b && o.v[(j + 1) % 3] == a) ++partners;
                }
                if (partners != 1) return "defective triangle without a partner";
            }
        }
        for (int i = 0; i < nv; ++i)
            if (!cover[i]) return "vertex outside every shaded triangle";
        return "";
    }
};

// ---------------------------------------------------------------------------
// Q_m of a dotted triangulation

inline std::string point_name(int tri, int x0, int x1, int x2) {
    return std::to_string(tri) + ":(" + std::to_string(x0) + "," + std::to_string(x1) + "," + std::to_string(x2) + ")";
}

inline QuiverDT build_Qm(const DottedTriangulation& d, int m) {
    if (m < 2) fail("ConfigError", "m must be at least 2");
    const auto& G = d.base.glue;
    int n = d.size();
    // lattice points keyed by (tri, x0, x1)
    auto key = [&](int t, int x0, int x1) { return (t * (m + 1) + x0) * (m + 1) + x1; };
    int total = n * (m + 1) * (m + 1);
    std::vector<int> parent(total);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    auto unite = [&](int a, int b) {
        a = find(a), b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    };
    std::vector<char> is_point(total, 0), on_free_side(total, 0);
    for (int t = 0; t < n; ++t)
        for (int x0 = 0; x0 <= m; ++x0)
            for (int x1 = 0; x0 + x1 <= m; ++x1) {
                int x2 = m - x0 - x1;
                std::array<int, 3> x{x0, x1, x2};
                if (x0 == m || x1 == m || x2 == m) continue;
                is_point[key(t, x0, x1)] = 1;
                for (int k = 0; k < 3; ++k) {
                    if (x[(k + 2) % 3] != 0) continue;  // on side k
                    SideRef p = G[t][k];
                    if (!p.glued()) {
                        on_free_side[key(t, x0, x1)] = 1;
                        continue;
                    }
                    std::array<int, 3> y{};
                    y[(p.side + 1) % 3] = x[k];
                    y[p.side] = x[(k + 1) % 3];
                    unite(key(t, x0, x1), key(p.tri, y[0], y[1]));
                }
            }
    QuiverDT Q;
    std::map<int, int> vid;
    std::vector<int> id_of(total, -1);
    for (int t = 0; t < n; ++t)
        for (int x0 = 0; x0 <= m; ++x0)
            for (int x1 = 0; x0 + x1 <= m; ++x1) {
                int k = key(t, x0, x1);
                if (!is_point[k]) continue;
                int r = find(k);
                auto it = vid.find(r);
                if (it == vid.end()) {
                    it = vid.emplace(r, Q.nv++).first;
                    int rt = r / ((m + 1) * (m + 1)), rx0 = (r / (m + 1)) % (m + 1), rx1 = r % (m + 1);
                    Q.addr.push_back(point_name(rt, rx0, rx1, m - rx0 - rx1));
                    Q.frozen.push_back(false);
                }
                id_of[k] = it->second;
                if (on_free_side[k]) Q.frozen[it->second] = true;
            }
    Q.eps.assign(Q.nv, std::vector<int>(Q.nv, 0));
    std::vector<std::vector<int>> pos(Q.nv, std::vector<int>(Q.nv, 0));
    for (int t = 0; t < n; ++t) {
        int dt = d.dot[t];
        for (int a0 = 0; a0 <= m - 2; ++a0)
            for (int a1 = 0; a0 + a1 <= m - 2; ++a1) {
                std::array<int, 3> a{a0, a1, m - 2 - a0 - a1};
                ShadedTriangle s;
                for (int i = 0; i < 3; ++i) {
                    std::array<int, 3> x{a[0] + 1, a[1] + 1, a[2] + 1};
                    x[i] -= 1;
                    s.v[i] = id_of[key(t, x[0], x[1])];
                }
                for (int i = 0; i < 3; ++i) {
                    int u = s.v[i], w = s.v[(i + 1) % 3];
                    Q.eps[u][w] += 1;
                    Q.eps[w][u] -= 1;
                    pos[u][w] += 1;
                }
                s.dot = dt;
                s.label = {d.label[t], m - 1 - a[dt], a[(dt + 2) % 3] + 1};
                Q.shaded.push_back(s);
            }
    }
    for (int u = 0; u < Q.nv; ++u)
        for (int w = u + 1; w < Q.nv; ++w) Q.two_cycles_cancelled += std::min(pos[u][w], pos[w][u]);
    std::sort(Q.shaded.begin(), Q.shaded.end(),
              [](const ShadedTriangle& x, const ShadedTriangle& y) { return x.label < y.label; });
    return Q;
}

// ---------------------------------------------------------------------------
// Elementary transformations

enum class QdtKind { T, F, A, P };

struct QdtTransform {
    QdtKind kind = QdtKind::A;
    ShadedLabel r, s;
    std::map<ShadedLabel, ShadedLabel> sigma;  // P: label -> new label (others fixed)

    static QdtTransform T(ShadedLabel r, ShadedLabel s) { return {QdtKind::T, r, s, {}}; }
    static QdtTransform F(ShadedLabel r, ShadedLabel s) { return {QdtKind::F, r, s, {}}; }
    static QdtTransform A(ShadedLabel s) { return {QdtKind::A, {}, s, {}}; }
    static QdtTransform P(std::map<ShadedLabel, ShadedLabel> sg) { return {QdtKind::P, {}, {}, std::move(sg)}; }

    ShadedLabel image(const ShadedLabel& l) const {
        auto it = sigma.find(l);
        return it == sigma.end() ? l : it->second;
    }
    ShadedLabel preimage(const ShadedLabel& l) const {
        for (auto& [a, b] : sigma)
            if (b == l) return a;
        return l;
    }
    bool trivial() const {
        if (kind != QdtKind::P) return false;
        for (auto& [a, b] : sigma)
            if (!(a == b)) return false;
        return true;
    }

    std::string str(const LabelNamer& nm) const {
        switch (kind) {
        case QdtKind::T: return "T " + shaded_name(r, nm) + " " + shaded_name(s, nm);
        case QdtKind::F: return "F " + shaded_name(r, nm) + " " + shaded_name(s, nm);
        case QdtKind::A: return "A " + shaded_name(s, nm);
        case QdtKind::P: {
            std::string out = "P ";
            std::map<ShadedLabel, bool> seen;
            bool any = false;
            for (auto& [a, b] : sigma) {
                if (seen[a] || a == b) continue;
                out += "(";
                ShadedLabel x = a;
                bool first = true;
                while (!seen[x]) {
                    seen[x] = true;
                    out += (first ? "" : " ") + shaded_name(x, nm);
                    first = false;
                    x = image(x);
                }
                out += ")";
                any = true;
            }
            return any ? out : "P id";
        }
        }
        return "?";
    }
};

using QdtWord = std::vector<QdtTransform>;  // application order

// Quiver mutation at k.
inline void mutate_eps(std::vector<std::vector<int>>& eps, int k) {
    int n = (int)eps.size();
    auto old = eps;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == k || j == k) {
                eps[i][j] = -old[i][j];
                continue;
            }
            int a = old[i][k], b = old[k][j];
            eps[i][j] = old[i][j] + (std::abs(a) * b + a * std::abs(b)) / 2;
        }
}

inline std::optional<QuiverDT> try_transform(const QuiverDT& Q, const QdtTransform& tr, std::string* why = nullptr) {
    auto no = [&](const std::string& r) -> std::optional<QuiverDT> {
        if (why) *why = r;
        return std::nullopt;
    };
    QuiverDT R = Q;
    switch (tr.kind) {
    case QdtKind::A: {
        int i = Q.index(tr.s);
        if (i < 0) return no("unknown label");
        R.shaded[i].dot = (R.shaded[i].dot + 1) % 3;
        return R;
    }
    case QdtKind::P: {
        std::map<ShadedLabel, int> seen;
        for (auto& s : R.shaded) {
            s.label = tr.image(s.label);
            if (seen[s.label]++) return no("relabeling is not a bijection");
        }
        std::sort(R.shaded.begin(), R.shaded.end(),
                  [](const ShadedTriangle& x, const ShadedTriangle& y) { return x.label < y.label; });
        return R;
    }
    case QdtKind::T: {
        if (tr.r == tr.s) return no("r = s");
        int ir = Q.index(tr.r), is = Q.index(tr.s);
        if (ir < 0 || is < 0) return no("unknown label");
        const auto& r = Q.shaded[ir];
        const auto& s = Q.shaded[is];
        int c = s.dotted(), d = s.succ(), e = s.pred();
        int b = r.dotted();
        if (r.succ() != c) return no("dot of r is not the arrow-predecessor of the dot of s");
        int a = r.pred();
        if (Q.frozen[c]) return no("shared vertex is frozen");
        std::vector<int> want(Q.nv, 0);
        want[a] += 1, want[d] += 1, want[b] -= 1, want[e] -= 1;
        if (want[c] != 0) return no("degenerate configuration");
        if (Q.eps[c] != want) return no("shared vertex lacks the two-in/two-out arrow pattern");
        mutate_eps(R.eps, c);
        auto& nr = R.shaded[ir];
        auto& ns = R.shaded[is];
        nr.v = {a, c, e};
        nr.dot = 1;
        ns.v = {b, d, c};
        ns.dot = 0;
        return R;
    }
    case QdtKind::F: {
        if (tr.r == tr.s) return no("r = s");
        int ir = Q.index(tr.r), is = Q.index(tr.s);
        if (ir < 0 || is < 0) return no("unknown label");
        const auto& r = Q.shaded[ir];
        const auto& s = Q.shaded[is];
        int b = r.dotted(), d = r.succ(), a = r.pred();
        int c = s.dotted();
        if (s.pred() != b || s.succ() != d) return no("r and s do not share the edge b-d with the required dots");
        if (Q.eps[b][d] != 0) return no("shared edge is visible");
        if (Q.eps[a][b] <= 0 || Q.eps[b][c] <= 0 || Q.eps[c][d] <= 0 || Q.eps[d][a] <= 0)
            return no("quadrilateral is not cyclically oriented");
        auto& nr = R.shaded[ir];
        auto& ns = R.shaded[is];
        nr.v = {a, b, c};
        nr.dot = 1;
        ns.v = {c, d, a};
        ns.dot = 0;
        return R;
    }
    }
    return no("unknown transform");
}

inline QuiverDT apply_transform(const QuiverDT& Q, const QdtTransform& tr) {
    std::string why;
    auto r = try_transform(Q, tr, &why);
    if (!r) fail("Unsupported", tr.str(default_namer()) + ": " + why);
    return *r;
}

inline QuiverDT apply_word(QuiverDT Q, const QdtWord& w) {
    for (const auto& t : w) Q = apply_transform(Q, t);
    return Q;
}

// ---------------------------------------------------------------------------
// Sequences realizing Kashaev moves

inline std::vector<ShadedLabel> shaded_labels(int tri, int m) {
    std::vector<ShadedLabel> out;
    for (int r = 1; r <= m - 1; ++r)
        for (int c = 1; c <= r; ++c) out.push_back({tri, r, c});
    return out;
}

// Written-order word M_{m-1} C_{m-2} ... M_1 C_0, returned in application order.
// M_l = prod_{i=1..l} prod_{j=1..m-l} T_{t_{l-1+j, j+i-1} s_{m-i, j}}
// C_l = prod_{i=1..l} prod_{j=1..m-l-1} F_{s_{m-i, j} t_{l+j, j+i}}
// The families i = 1 and i = l are the two products usually displayed; for
// m >= 4 the middle families are needed as well.
inline QdtWord flip_sequence(int t, int s, int m) {
    std::vector<QdtTransform> written;
    for (int k = 1; k <= m - 1; ++k) {
        int l = m - k;
        for (int i = 1; i <= l; ++i)
            for (int j = 1; j <= m - l; ++j) written.push_back(QdtTransform::T({t, l - 1 + j, j + i - 1}, {s, m - i, j}));
        int lc = m - k - 1;
        for (int i = 1; i <= lc; ++i)
            for (int j = 1; j <= m - lc - 1; ++j)
                written.push_back(QdtTransform::F({s, m - i, j}, {t, lc + j, j + i}));
    }
    return QdtWord(written.rbegin(), written.rend());
}

// sigma^A_t: relabeling induced by moving the dot of t one corner along.
inline std::map<ShadedLabel, ShadedLabel> dot_rotation(int t, int m) {
    std::map<ShadedLabel, ShadedLabel> sg;
    for (auto l : shaded_labels(t, m)) sg[l] = {t, m - 1 - l.r + l.c, m - l.r};
    return sg;
}

inline QdtWord dotchange_sequence(int t, int m) {
    QdtWord w;
    for (auto l : shaded_labels(t, m)) w.push_back(QdtTransform::A(l));
    w.push_back(QdtTransform::P(dot_rotation(t, m)));
    return w;
}

inline QdtWord relabel_sequence(const Perm& sigma, int m) {
    QdtWord w;
    for (int r = 1; r <= m - 1; ++r)
        for (int c = 1; c <= r; ++c) {
            std::map<ShadedLabel, ShadedLabel> sg;
            for (int i = 0; i < (int)sigma.size(); ++i)
                if (sigma[i] != i) sg[{i, r, c}] = {sigma[i], r, c};
            if (!sg.empty()) w.push_back(QdtTransform::P(std::move(sg)));
        }
    return w;
}

inline QdtWord realize_move(const DottedTriangulation& d, const KashaevMove& mv, int m) {
    QdtWord out;
    DottedTriangulation cur = d;
    for (const auto& b : expand_basic(mv)) {
        std::string why;
        auto nx = try_apply(cur, b, &why);
        if (!nx) fail("Unsupported", why);
        switch (b.kind) {
        case MoveKind::TildeA:
        case MoveKind::Rho:
            for (int k = 0; k < (b.exponent > 0 ? 1 : 2); ++k) {
                auto w = dotchange_sequence(b.t, m);
                out.insert(out.end(), w.begin(), w.end());
            }
            break;
        case MoveKind::TildeT: {
            if (b.exponent < 0) fail("Unsupported", "inverse enhanced flips have no transformation sequence");
            auto w = flip_sequence(b.t, b.s, m);
            out.insert(out.end(), w.begin(), w.end());
            break;
        }
        case MoveKind::Perm: {
            auto w = relabel_sequence(b.exponent > 0 ? b.sigma : perm_inverse(b.sigma), m);
            out.insert(out.end(), w.begin(), w.end());
            break;
        }
        default: fail("Unsupported", "unexpected move");
        }
        cur = std::move(*nx);
    }
    return out;
}

inline QdtWord realize_word(const DottedTriangulation& d, const MoveWord& word, int m) {
    QdtWord out;
    DottedTriangulation cur = d;
    for (const auto& mv : word) {
        auto w = realize_move(cur, mv, m);
        out.insert(out.end(), w.begin(), w.end());
        cur = apply_move(cur, mv);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Canonical comparison through the label-induced vertex bijection

inline std::vector<long> canonical_key(const QuiverDT& Q) {
    std::vector<int> order(Q.shaded.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return Q.shaded[a].label < Q.shaded[b].label; });
    std::vector<int> ren(Q.nv, -1);
    int next = 0;
    std::vector<long> tri;
    for (int i : order) {
        const auto& s = Q.shaded[i];
        tri.push_back(s.label.tri);
        tri.push_back(s.label.r);
        tri.push_back(s.label.c);
        for (int v : {s.dotted(), s.succ(), s.pred()}) {
            if (ren[v] < 0) ren[v] = next++;
            tri.push_back(ren[v]);
        }
    }
    for (int v = 0; v < Q.nv; ++v)
        if (ren[v] < 0) ren[v] = next++;
    std::vector<int> inv(Q.nv);
    for (int v = 0; v < Q.nv; ++v) inv[ren[v]] = v;
    std::vector<long> key{Q.nv, (long)Q.shaded.size()};
    key.insert(key.end(), tri.begin(), tri.end());
    for (int i = 0; i < Q.nv; ++i) key.push_back(Q.frozen[inv[i]]);
    for (int i = 0; i < Q.nv; ++i)
        for (int j = 0; j < Q.nv; ++j) key.push_back(Q.eps[inv[i]][inv[j]]);
    return key;
}

inline bool same_quiver(const QuiverDT& a, const QuiverDT& b) { return canonical_key(a) == canonical_key(b); }

// ---------------------------------------------------------------------------
// Dumps

inline std::string dump_quiver(const QuiverDT& Q, const LabelNamer& nm = default_namer()) {
    std::ostringstream os;
    os << "vertices " << Q.nv << "\n";
    for (int i = 0; i < Q.nv; ++i) os << "v " << i << " " << Q.addr[i] << (Q.frozen[i] ? " frozen" : "") << "\n";
    for (int i = 0; i < Q.nv; ++i)
        for (int j = 0; j < Q.nv; ++j)
            if (Q.eps[i][j] > 0) os << "arrow " << i << " " << j << " " << Q.eps[i][j] << "\n";
    for (const auto& s : Q.shaded) {
        os << "shaded " << shaded_name(s.label, nm) << " " << s.v[0] << " " << s.v[1] << " " << s.v[2] << " dot "
           << s.dotted();
        int k = Q.invisible_side(s);
        if (k >= 0) os << " defective " << s.v[k] << "-" << s.v[(k + 1) % 3];
        os << "\n";
    }
    return os.str();
}

inline std::string dot_export(const QuiverDT& Q, const LabelNamer& nm = default_namer()) {
    std::ostringstream os;
    os << "digraph Q {\n";
    for (int i = 0; i < Q.nv; ++i)
        os << "  v" << i << " [label=\"" << Q.addr[i] << "\"" << (Q.frozen[i] ? ",shape=box" : "") << "];\n";
    for (int i = 0; i < Q.nv; ++i)
        for (int j = 0; j < Q.nv; ++j)
            if (Q.eps[i][j] > 0)
                os << "  v" << i << " -> v" << j << (Q.eps[i][j] > 1 ? " [label=\"" + std::to_string(Q.eps[i][j]) + "\"]" : "")
                   << ";\n";
    for (const auto& s : Q.shaded)
        os << "  // shaded " << shaded_name(s.label, nm) << " dot v" << s.dotted() << "\n";
    os << "}\n";
    return os.str();
}

} // namespace rcoord
