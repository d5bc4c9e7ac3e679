#pragma once

#include <array>
#include <cstdio>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "rcoord/error.hpp"
#include "rcoord/perm.hpp"

namespace rcoord {

// ---------------------------------------------------------------------------
// Marked surfaces

struct MarkedSurface {
    int genus = 0;
    int punctures = 0;
    std::vector<int> boundary_arcs;  // marked points (= arcs) per boundary circle

    int arc_total() const {
        int k = 0;
        for (int a : boundary_arcs) k += a;
        return k;
    }
    int boundary_components() const { return (int)boundary_arcs.size(); }
    int triangle_count() const {
        return 4 * genus - 4 + 2 * punctures + 2 * boundary_components() + arc_total();
    }
    int vertex_count() const { return punctures + arc_total(); }
    // Euler characteristic once punctures are filled in as vertices.
    int euler() const { return 2 - 2 * genus - boundary_components(); }

    bool hyperbolic() const {
        int n = punctures + arc_total();  // components of the punctured boundary
        if (genus > 1) return true;
        if (genus == 1) return n >= 1;
        return n >= 3;
    }

    void validate() const {
        if (genus < 0 || punctures < 0) fail("EulerMismatch", "negative genus or puncture count");
        for (int a : boundary_arcs)
            if (a < 1) fail("EulerMismatch", "boundary circle without marked point");
        if (!hyperbolic()) fail("EulerMismatch", "surface is not hyperbolic");
        if (triangle_count() <= 0) fail("EulerMismatch", "no ideal triangulation exists");
    }

    bool operator==(const MarkedSurface&) const = default;
};

// ---------------------------------------------------------------------------
// Arc tags.  Each edge carries a lambda length evaluated at a fixed random
// decorated point, mod the Mersenne prime 2^61-1.  Flips update it by the
// Ptolemy relation, so two edge sets agree iff the arcs agree (up to a
// negligible collision probability).  The gluing table alone only sees the
// combinatorial type, which would identify all triangulations of the torus.

namespace arcmod {
constexpr uint64_t P = (uint64_t(1) << 61) - 1;
inline uint64_t mul(uint64_t a, uint64_t b) {
    unsigned __int128 z = (unsigned __int128)a * b;
    uint64_t lo = (uint64_t)(z & P), hi = (uint64_t)(z >> 61);
    uint64_t r = lo + hi;
    return r >= P ? r - P : r;
}
inline uint64_t add(uint64_t a, uint64_t b) {
    uint64_t r = a + b;
    return r >= P ? r - P : r;
}
inline uint64_t pow(uint64_t a, uint64_t e) {
    uint64_t r = 1;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}
inline uint64_t inv(uint64_t a) { return pow(a, P - 2); }
inline uint64_t splitmix(uint64_t& s) {
    uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
inline uint64_t ptolemy(uint64_t a, uint64_t c, uint64_t b, uint64_t d, uint64_t e) {
    return mul(add(mul(a, c), mul(b, d)), inv(e));
}
} // namespace arcmod

// ---------------------------------------------------------------------------
// Ideal triangulations as gluing involutions.
//
// Corners 0,1,2 run counterclockwise.  Side k joins corner k to corner k+1.
// Gluing (T,k) <-> (T',k') identifies corner k of T with corner k'+1 of T'
// and corner k+1 of T with corner k' of T' (orientation reversing).

struct SideRef {
    int tri = -1;
    int side = 0;
    bool glued() const { return tri >= 0; }
    bool operator==(const SideRef&) const = default;
    auto operator<=>(const SideRef&) const = default;
};

struct IdealTriangulation {
    MarkedSurface surface;
    std::vector<std::array<SideRef, 3>> glue;
    std::vector<std::array<uint64_t, 3>> arc;

    int size() const { return (int)glue.size(); }

    // Vertex class of every corner (orbits of corners under the gluing).
    std::vector<std::array<int, 3>> corner_vertices() const {
        int n = size();
        std::vector<int> parent(3 * n);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
        auto unite = [&](int a, int b) { parent[find(a)] = find(b); };
        for (int t = 0; t < n; ++t)
            for (int k = 0; k < 3; ++k) {
                SideRef p = glue[t][k];
                if (!p.glued()) continue;
                unite(3 * t + k, 3 * p.tri + (p.side + 1) % 3);
                unite(3 * t + (k + 1) % 3, 3 * p.tri + p.side);
            }
        std::map<int, int> ids;
        std::vector<std::array<int, 3>> out(n);
        for (int t = 0; t < n; ++t)
            for (int k = 0; k < 3; ++k) {
                int r = find(3 * t + k);
                auto it = ids.find(r);
                if (it == ids.end()) it = ids.emplace(r, (int)ids.size()).first;
                out[t][k] = it->second;
            }
        return out;
    }

    int vertex_count() const {
        int v = 0;
        for (auto& c : corner_vertices())
            for (int x : c) v = std::max(v, x + 1);
        return v;
    }

    int unglued_count() const {
        int u = 0;
        for (auto& g : glue)
            for (auto& s : g) u += !s.glued();
        return u;
    }

    int edge_count() const { return (3 * size() + unglued_count()) / 2; }

    // Structural checks: involution, Euler characteristic, triangle count.
    void validate() const {
        surface.validate();
        int n = size();
        if ((int)arc.size() != n) fail("NonInvolutiveGluing", "arc table size mismatch");
        for (int t = 0; t < n; ++t)
            for (int k = 0; k < 3; ++k) {
                SideRef p = glue[t][k];
                if (!p.glued()) continue;
                if (p.tri >= n || p.side < 0 || p.side > 2)
                    fail("NonInvolutiveGluing", "side reference out of range");
                if (p.tri == t && p.side == k) fail("NonInvolutiveGluing", "side glued to itself");
                SideRef back = glue[p.tri][p.side];
                if (back.tri != t || back.side != k)
                    fail("NonInvolutiveGluing", "gluing is not an involution at triangle " + std::to_string(t));
                if (arc[t][k] != arc[p.tri][p.side])
                    fail("NonInvolutiveGluing", "glued sides carry different arcs");
            }
        if (n != surface.triangle_count())
            fail("EulerMismatch", "triangle count " + std::to_string(n) + " but surface needs " +
                                      std::to_string(surface.triangle_count()));
        if (unglued_count() != surface.arc_total())
            fail("EulerMismatch", "unglued sides " + std::to_string(unglued_count()) + " but surface has " +
                                      std::to_string(surface.arc_total()) + " boundary arcs");
        int chi = vertex_count() - edge_count() + n;
        if (chi != surface.euler())
            fail("EulerMismatch", "glued complex has chi=" + std::to_string(chi) + ", surface needs " +
                                      std::to_string(surface.euler()));
        if (vertex_count() != surface.vertex_count())
            fail("EulerMismatch", "vertex count does not match punctures plus marked points");
    }

    // Fresh arc tags, one per edge, from a deterministic stream.
    void seed_arcs(uint64_t seed = 0x5eed) {
        arc.assign(size(), {0, 0, 0});
        uint64_t s = seed;
        for (int t = 0; t < size(); ++t)
            for (int k = 0; k < 3; ++k) {
                if (arc[t][k]) continue;
                uint64_t v = 0;
                while (v == 0) v = arcmod::splitmix(s) % arcmod::P;
                arc[t][k] = v;
                SideRef p = glue[t][k];
                if (p.glued()) arc[p.tri][p.side] = v;
            }
    }
};

// Raw gluing entry as read from text: partner side plus an orientation flag
// ('-' = orientation reversing, the only consistent choice).
struct RawGlue {
    int tri = -1;
    int side = 0;
    char orient = '-';
};

inline IdealTriangulation build_triangulation(const MarkedSurface& surface,
                                              const std::vector<std::array<RawGlue, 3>>& raw) {
    surface.validate();
    if ((int)raw.size() != surface.triangle_count())
        fail("EulerMismatch", "gluing table has " + std::to_string(raw.size()) + " triangles, surface needs " +
                                  std::to_string(surface.triangle_count()));
    IdealTriangulation tr;
    tr.surface = surface;
    tr.glue.resize(raw.size());
    for (size_t t = 0; t < raw.size(); ++t)
        for (int k = 0; k < 3; ++k) {
            const RawGlue& g = raw[t][k];
            if (g.tri >= 0 && g.orient != '-')
                fail("OrientationConflict", "side " + std::to_string(k) + " of triangle " + std::to_string(t) +
                                                " glued orientation-preserving");
            if (g.tri >= (int)raw.size() || (g.tri >= 0 && (g.side < 0 || g.side > 2)))
                fail("NonInvolutiveGluing", "side reference out of range");
            tr.glue[t][k] = g.tri >= 0 ? SideRef{g.tri, g.side} : SideRef{};
        }
    for (size_t t = 0; t < raw.size(); ++t)
        for (int k = 0; k < 3; ++k) {
            SideRef p = tr.glue[t][k];
            if (!p.glued()) continue;
            SideRef b = tr.glue[p.tri][p.side];
            if (b.tri != (int)t || b.side != k || (p.tri == (int)t && p.side == k))
                fail("NonInvolutiveGluing", "gluing is not a fixed-point-free involution");
            if (raw[p.tri][p.side].orient != raw[t][k].orient)
                fail("OrientationConflict", "mismatched orientation flags");
        }
    tr.seed_arcs();
    tr.validate();
    return tr;
}

// Builds the gluing from oriented faces given by vertex triples (ccw).
inline std::vector<std::array<RawGlue, 3>> glue_from_faces(const std::vector<std::array<int, 3>>& faces) {
    std::map<std::pair<int, int>, SideRef> dir;
    for (int f = 0; f < (int)faces.size(); ++f)
        for (int k = 0; k < 3; ++k) {
            auto key = std::make_pair(faces[f][k], faces[f][(k + 1) % 3]);
            if (dir.count(key)) fail("OrientationConflict", "directed edge used twice");
            dir[key] = SideRef{f, k};
        }
    std::vector<std::array<RawGlue, 3>> raw(faces.size());
    for (int f = 0; f < (int)faces.size(); ++f)
        for (int k = 0; k < 3; ++k) {
            auto it = dir.find({faces[f][(k + 1) % 3], faces[f][k]});
            if (it != dir.end()) raw[f][k] = RawGlue{it->second.tri, it->second.side, '-'};
        }
    return raw;
}

// Splits triangle t by a new central puncture: t becomes (a,b,x) and two new
// triangles (b,c,x), (c,a,x) are appended.
inline void insert_puncture(std::vector<std::array<RawGlue, 3>>& raw, int t) {
    int n = (int)raw.size();
    int t1 = t, t2 = n, t3 = n + 1;
    std::array<RawGlue, 3> old = raw[t];
    raw.resize(n + 2);
    auto relink = [&](int tri, int side, RawGlue src) {
        raw[tri][side] = src;
        if (src.tri >= 0) {
            int pt = src.tri == t ? -1 : src.tri;
            if (pt >= 0) raw[pt][src.side] = RawGlue{tri, side, '-'};
        }
    };
    // outer sides; self-glued sides of t are remapped afterwards
    std::array<std::pair<int, int>, 3> where = {{{t1, 0}, {t2, 0}, {t3, 0}}};
    for (int k = 0; k < 3; ++k) {
        RawGlue g = old[k];
        if (g.tri == t) g = RawGlue{where[g.side].first, where[g.side].second, '-'};
        relink(where[k].first, where[k].second, g);
    }
    raw[t1][1] = {t2, 2, '-'};
    raw[t2][2] = {t1, 1, '-'};
    raw[t2][1] = {t3, 2, '-'};
    raw[t3][2] = {t2, 1, '-'};
    raw[t3][1] = {t1, 2, '-'};
    raw[t1][2] = {t3, 1, '-'};
}

// Fan triangulation of the 4g-gon with sides paired a b a^-1 b^-1 ...
inline std::vector<std::array<RawGlue, 3>> polygon_gluing(int genus) {
    int N = 4 * genus;
    int F = N - 2;
    std::vector<std::array<RawGlue, 3>> raw(F);
    auto boundary = [&](int j) -> std::pair<int, int> {
        if (j == 0) return {0, 0};
        if (j == N - 1) return {F - 1, 2};
        return {j - 1, 1};
    };
    for (int k = 0; k + 1 < F; ++k) {
        raw[k][2] = {k + 1, 0, '-'};
        raw[k + 1][0] = {k, 2, '-'};
    }
    for (int i = 0; i < genus; ++i)
        for (int d = 0; d < 2; ++d) {
            auto a = boundary(4 * i + d), b = boundary(4 * i + d + 2);
            raw[a.first][a.second] = {b.first, b.second, '-'};
            raw[b.first][b.second] = {a.first, a.second, '-'};
        }
    return raw;
}

// ---------------------------------------------------------------------------
// Dotted triangulations

struct DottedTriangulation {
    IdealTriangulation base;
    std::vector<int> dot;    // corner per triangle
    std::vector<int> label;  // label index per triangle
    std::vector<std::string> names;  // display name per label index

    int size() const { return base.size(); }

    int tri_of(int lab) const {
        for (int t = 0; t < size(); ++t)
            if (label[t] == lab) return t;
        fail("Unsupported", "unknown label " + std::to_string(lab));
    }

    std::string name(int lab) const {
        return lab >= 0 && lab < (int)names.size() ? names[lab] : "#" + std::to_string(lab);
    }

    int label_index(const std::string& nm) const {
        for (int i = 0; i < (int)names.size(); ++i)
            if (names[i] == nm) return i;
        fail("Unsupported", "unknown label name " + nm);
    }

    void validate() const {
        base.validate();
        if ((int)dot.size() != size() || (int)label.size() != size())
            fail("Unsupported", "dot/label tables incomplete");
        for (int d : dot)
            if (d < 0 || d > 2) fail("Unsupported", "dot corner out of range");
        if (!perm_valid(label)) fail("Unsupported", "labels are not a bijection");
    }

    // Key for exact equality: per label, the arc tags of the triangle's sides
    // read counterclockwise starting at the dotted corner.
    std::vector<uint64_t> canonical_form() const {
        std::vector<uint64_t> key;
        key.reserve(3 * size());
        for (int l = 0; l < size(); ++l) {
            int t = tri_of(l);
            for (int i = 0; i < 3; ++i) key.push_back(base.arc[t][(dot[t] + i) % 3]);
        }
        return key;
    }

    bool operator==(const DottedTriangulation& o) const { return canonical_form() == o.canonical_form(); }
};

inline std::string default_label_name(int i) {
    static const char* names[] = {"t", "s", "u", "v", "w", "x", "y", "z"};
    if (i < 8) return names[i];
    return "l" + std::to_string(i);
}

inline DottedTriangulation make_dotted(IdealTriangulation base, std::vector<int> dot = {}) {
    DottedTriangulation d;
    int n = base.size();
    d.base = std::move(base);
    d.dot = dot.empty() ? std::vector<int>(n, 0) : std::move(dot);
    d.label = perm_identity(n);
    for (int i = 0; i < n; ++i) d.names.push_back(default_label_name(i));
    d.validate();
    return d;
}

// ---------------------------------------------------------------------------
// Built-in surfaces

inline IdealTriangulation closed_surface(int genus, int punctures) {
    MarkedSurface S{genus, punctures, {}};
    S.validate();
    std::vector<std::array<RawGlue, 3>> raw;
    int have;
    if (genus == 0) {
        raw = glue_from_faces({{{0, 1, 2}}, {{0, 2, 1}}});
        have = 3;
    } else {
        raw = polygon_gluing(genus);
        have = 1;
    }
    for (int k = have; k < punctures; ++k) insert_puncture(raw, (int)raw.size() - 1);
    return build_triangulation(S, raw);
}

inline IdealTriangulation punctured_torus() {
    MarkedSurface S{1, 1, {}};
    std::vector<std::array<RawGlue, 3>> raw(2);
    for (int k = 0; k < 3; ++k) {
        raw[0][k] = {1, k, '-'};
        raw[1][k] = {0, k, '-'};
    }
    return build_triangulation(S, raw);
}

// Disk with n marked points on the boundary, fan triangulated.
inline IdealTriangulation polygon_disk(int n) {
    MarkedSurface S{0, 0, {n}};
    std::vector<std::array<int, 3>> faces;
    for (int k = 0; k + 2 < n; ++k) faces.push_back({0, k + 1, k + 2});
    return build_triangulation(S, glue_from_faces(faces));
}

inline IdealTriangulation four_punctured_sphere() {
    MarkedSurface S{0, 4, {}};
    return build_triangulation(S, glue_from_faces({{{0, 2, 1}}, {{0, 1, 3}}, {{0, 3, 2}}, {{1, 2, 3}}}));
}

inline IdealTriangulation builtin_surface(const std::string& name) {
    if (name == "punctured-torus" || name == "torus") return punctured_torus();
    if (name == "triangle") return polygon_disk(3);
    if (name == "square") return polygon_disk(4);
    if (name == "pentagon" || name == "fan") return polygon_disk(5);
    if (name == "sphere4" || name == "four-punctured-sphere") return four_punctured_sphere();
    // gG-pN
    int g = 0, p = 0;
    if (std::sscanf(name.c_str(), "g%d-p%d", &g, &p) == 2) return closed_surface(g, p);
    fail("ConfigError", "unknown surface '" + name + "'");
}

// ---------------------------------------------------------------------------
// Kashaev moves

enum class MoveKind { Rho, Omega, TildeA, TildeT, Perm };

struct KashaevMove {
    MoveKind kind = MoveKind::TildeA;
    int t = -1, s = -1;
    Perm sigma;
    int exponent = 1;

    static KashaevMove rho(int t, int e = 1) { return {MoveKind::Rho, t, -1, {}, e}; }
    static KashaevMove A(int t, int e = 1) { return {MoveKind::TildeA, t, -1, {}, e}; }
    static KashaevMove T(int t, int s, int e = 1) { return {MoveKind::TildeT, t, s, {}, e}; }
    static KashaevMove omega(int t, int s, int e = 1) { return {MoveKind::Omega, t, s, {}, e}; }
    static KashaevMove P(Perm p, int e = 1) { return {MoveKind::Perm, -1, -1, std::move(p), e}; }

    KashaevMove inverse() const {
        KashaevMove m = *this;
        m.exponent = -exponent;
        return m;
    }

    template <class NameFn>
    std::string str(NameFn nm) const {
        std::string e = exponent == 1 ? "" : "^-1";
        switch (kind) {
        case MoveKind::Rho: return "rho_" + nm(t) + e;
        case MoveKind::TildeA: return "A~_" + nm(t) + e;
        case MoveKind::Omega: return "omega_" + nm(t) + nm(s) + e;
        case MoveKind::TildeT: return "T~_" + nm(t) + nm(s) + e;
        case MoveKind::Perm: return "P_" + perm_cycles(sigma, nm) + e;
        }
        return "?";
    }
};

// Words are listed in application order (first applied first).
using MoveWord = std::vector<KashaevMove>;

// Rewrites rho/omega into A~, T~ and P moves (application order).
inline MoveWord expand_basic(const KashaevMove& m) {
    switch (m.kind) {
    case MoveKind::Rho: return {KashaevMove::A(m.t, m.exponent)};
    case MoveKind::Omega:
        // omega_ij = A~_i A~_j^-1 T~_ij A~_j A~_i^-1, read from the right
        return {KashaevMove::A(m.t, -1), KashaevMove::A(m.s, 1), KashaevMove::T(m.t, m.s, m.exponent),
                KashaevMove::A(m.s, -1), KashaevMove::A(m.t, 1)};
    default: return {m};
    }
}

namespace detail {

// Replace triangles T and S.  srcT[j] / srcS[j] name the old side feeding
// new side j; tri == -2 marks the new diagonal.
inline void reseat(IdealTriangulation& tr, int T, int S, std::array<SideRef, 3> srcT, std::array<SideRef, 3> srcS,
                   uint64_t diag_arc) {
    auto old_glue = tr.glue;
    auto old_arc = tr.arc;
    std::map<SideRef, SideRef> moved;
    SideRef diagT, diagS;
    for (int j = 0; j < 3; ++j) {
        if (srcT[j].tri == -2) diagT = {T, j};
        else moved[srcT[j]] = {T, j};
        if (srcS[j].tri == -2) diagS = {S, j};
        else moved[srcS[j]] = {S, j};
    }
    auto place = [&](int X, int j, SideRef src) {
        if (src.tri == -2) {
            tr.glue[X][j] = X == T ? diagS : diagT;
            tr.arc[X][j] = diag_arc;
            return;
        }
        SideRef p = old_glue[src.tri][src.side];
        tr.arc[X][j] = old_arc[src.tri][src.side];
        if (p.glued() && (p.tri == T || p.tri == S)) p = moved.at(p);
        tr.glue[X][j] = p;
        if (p.glued() && p.tri != T && p.tri != S) tr.glue[p.tri][p.side] = {X, j};
    };
    for (int j = 0; j < 3; ++j) {
        place(T, j, srcT[j]);
        place(S, j, srcS[j]);
    }
}

inline int mod3(int x) { return ((x % 3) + 3) % 3; }

} // namespace detail

// Applies one move; returns nullopt and sets why when unsupported.
inline std::optional<DottedTriangulation> try_apply(const DottedTriangulation& d, const KashaevMove& m,
                                                    std::string* why = nullptr) {
    auto no = [&](const std::string& r) -> std::optional<DottedTriangulation> {
        if (why) *why = r;
        return std::nullopt;
    };
    int n = d.size();
    auto valid_label = [&](int l) { return l >= 0 && l < n; };
    switch (m.kind) {
    case MoveKind::Rho:
    case MoveKind::TildeA: {
        if (!valid_label(m.t)) return no("unknown label");
        DottedTriangulation r = d;
        int t = d.tri_of(m.t);
        r.dot[t] = detail::mod3(r.dot[t] + (m.exponent > 0 ? 1 : -1));
        return r;
    }
    case MoveKind::Perm: {
        if ((int)m.sigma.size() != n || !perm_valid(m.sigma)) return no("not a permutation of the labels");
        Perm sg = m.exponent > 0 ? m.sigma : perm_inverse(m.sigma);
        DottedTriangulation r = d;
        for (int t = 0; t < n; ++t) r.label[t] = sg[d.label[t]];
        return r;
    }
    case MoveKind::Omega: {
        if (!valid_label(m.t) || !valid_label(m.s) || m.t == m.s) return no("omega needs two distinct labels");
        DottedTriangulation cur = d;
        for (const auto& b : expand_basic(m)) {
            auto nx = try_apply(cur, b, why);
            if (!nx) return std::nullopt;
            cur = std::move(*nx);
        }
        return cur;
    }
    case MoveKind::TildeT: {
        if (!valid_label(m.t) || !valid_label(m.s)) return no("unknown label");
        if (m.t == m.s) return no("t and s coincide");
        int T = d.tri_of(m.t), S = d.tri_of(m.s);
        const auto& G = d.base.glue;
        const auto& L = d.base.arc;
        DottedTriangulation r = d;
        if (m.exponent > 0) {
            int ks = detail::mod3(d.dot[S] + 1);  // side of s opposite its dot
            SideRef p = G[S][ks];
            if (!p.glued()) return no("side of s opposite its dot is a boundary arc");
            if (p.tri == S) return no("flip edge bounds the same triangle twice");
            if (p.tri != T) return no("t is not across the side of s opposite its dot");
            int kt = p.side;
            if (d.dot[T] != detail::mod3(kt + 1)) return no("dot of t is not clockwise-next to its far corner");
            int a = kt, b = detail::mod3(kt + 1), c = detail::mod3(kt + 2);
            int a2 = ks, b2 = detail::mod3(ks + 1), c2 = detail::mod3(ks + 2);
            uint64_t lam = arcmod::ptolemy(L[T][c], L[S][c2], L[S][b2], L[T][b], L[T][a]);
            detail::reseat(r.base, T, S, {SideRef{-2, 0}, SideRef{S, c2}, SideRef{T, b}},
                           {SideRef{T, c}, SideRef{S, b2}, SideRef{-2, 0}}, lam);
            r.dot[T] = 2;
            r.dot[S] = 2;
        } else {
            int dt = d.dot[T];
            int kd = detail::mod3(dt + 1);  // side of t opposite its dot
            SideRef p = G[T][kd];
            if (!p.glued()) return no("side of t opposite its dot is a boundary arc");
            if (p.tri == T) return no("flip edge bounds the same triangle twice");
            if (p.tri != S) return no("s is not across the side of t opposite its dot");
            int k = p.side;
            if (d.dot[S] != k) return no("dot of s is not at the start of the shared side");
            int e0 = dt, e2 = detail::mod3(dt + 2);
            int k1 = detail::mod3(k + 1), k2 = detail::mod3(k + 2);
            // quad P,Q,R,S: PQ = S.k1, QR = S.k2, RS = T.e2, SP = T.e0, PR = T.kd
            uint64_t lam = arcmod::ptolemy(L[S][k1], L[T][e2], L[S][k2], L[T][e0], L[T][kd]);
            detail::reseat(r.base, T, S, {SideRef{S, k1}, SideRef{-2, 0}, SideRef{T, e0}},
                           {SideRef{S, k2}, SideRef{T, e2}, SideRef{-2, 0}}, lam);
            r.dot[T] = 2;
            r.dot[S] = 1;
        }
        return r;
    }
    }
    return no("unknown move");
}

inline DottedTriangulation apply_move(const DottedTriangulation& d, const KashaevMove& m) {
    std::string why;
    auto r = try_apply(d, m, &why);
    if (!r) fail("Unsupported", m.str([&](int l) { return d.name(l); }) + ": " + why);
    return *r;
}

inline std::optional<DottedTriangulation> try_apply_word(const DottedTriangulation& d, const MoveWord& w,
                                                         std::string* why = nullptr) {
    DottedTriangulation cur = d;
    for (const auto& m : w) {
        auto nx = try_apply(cur, m, why);
        if (!nx) return std::nullopt;
        cur = std::move(*nx);
    }
    return cur;
}

// ---------------------------------------------------------------------------
// Relations among rho, omega, P (application-order words)

struct RelationInstance {
    std::string name;
    std::vector<int> indices;
    MoveWord lhs, rhs;
};

struct RelationResult {
    RelationInstance rel;
    bool lhs_supported = false;
    bool rhs_supported = false;
    bool equal = false;
    std::string note;
    bool ok() const { return !lhs_supported || (rhs_supported && equal); }
};

// Permutations used for relation instances: all of them for small label
// sets, transpositions and 3-cycles otherwise.
inline std::vector<Perm> relation_perms(int n) {
    if (n <= 4) return perm_all(n);
    std::vector<Perm> out{perm_identity(n)};
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) out.push_back(perm_transposition(n, i, j));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (i < j && i < k && j != k) out.push_back(perm_cycle(n, {i, j, k}));
    return out;
}

inline std::vector<RelationInstance> relation_instances(int n, bool with_perm_pairs = true) {
    using K = KashaevMove;
    std::vector<RelationInstance> out;
    for (int i = 0; i < n; ++i) out.push_back({"order-three", {i}, {K::rho(i), K::rho(i), K::rho(i)}, {}});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                if (i != j && j != k && i != k)
                    out.push_back({"pentagon", {i, j, k},
                                   {K::omega(i, j), K::omega(i, k), K::omega(j, k)},
                                   {K::omega(j, k), K::omega(i, j)}});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            out.push_back({"inversion", {i, j},
                           {K::omega(j, i), K::rho(j), K::omega(i, j)},
                           {K::P(perm_transposition(n, i, j)), K::rho(j), K::rho(i)}});
            out.push_back({"consistency", {i, j},
                           {K::rho(i), K::omega(i, j), K::rho(j)},
                           {K::rho(j), K::omega(j, i), K::rho(i)}});
            out.push_back({"commutativity-rho-rho", {i, j}, {K::rho(j), K::rho(i)}, {K::rho(i), K::rho(j)}});
            for (int k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                out.push_back({"commutativity-omega-rho", {i, j, k},
                               {K::rho(k), K::omega(i, j)}, {K::omega(i, j), K::rho(k)}});
                for (int l = 0; l < n; ++l) {
                    if (l == i || l == j || l == k) continue;
                    out.push_back({"commutativity-omega-omega", {i, j, k, l},
                                   {K::omega(k, l), K::omega(i, j)}, {K::omega(i, j), K::omega(k, l)}});
                }
            }
        }
    auto perms = relation_perms(n);
    out.push_back({"permutation-identity", {}, {K::P(perm_identity(n))}, {}});
    for (const auto& sg : perms) {
        if (with_perm_pairs)
            for (const auto& s2 : perms)
                out.push_back({"permutation-compose", {}, {K::P(s2), K::P(sg)}, {K::P(perm_compose(sg, s2))}});
        for (int i = 0; i < n; ++i) {
            out.push_back({"index-change-rho", {i}, {K::rho(i), K::P(sg)}, {K::P(sg), K::rho(sg[i])}});
            for (int j = 0; j < n; ++j)
                if (i != j)
                    out.push_back({"index-change-omega", {i, j},
                                   {K::omega(i, j), K::P(sg)}, {K::P(sg), K::omega(sg[i], sg[j])}});
        }
    }
    return out;
}

inline RelationResult check_relation(const DottedTriangulation& d, const RelationInstance& rel) {
    RelationResult r;
    r.rel = rel;
    std::string why;
    auto L = try_apply_word(d, rel.lhs, &why);
    r.lhs_supported = (bool)L;
    if (!L) {
        r.note = why;
        return r;
    }
    auto R = try_apply_word(d, rel.rhs, &why);
    r.rhs_supported = (bool)R;
    if (!R) {
        r.note = "right side unsupported: " + why;
        return r;
    }
    r.equal = L->canonical_form() == R->canonical_form();
    return r;
}

// Every relation instance whose left side is supported at d.
inline std::vector<RelationResult> verify_relation_instances(const DottedTriangulation& d) {
    std::vector<RelationResult> out;
    for (const auto& rel : relation_instances(d.size(), d.size() <= 3)) {
        auto r = check_relation(d, rel);
        if (r.lhs_supported) out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Exploration of the move graph

struct MoveEdge {
    int from, to;
    std::string type;
};

struct MoveGraph {
    std::vector<DottedTriangulation> nodes;
    std::vector<MoveEdge> edges;
    bool budget_exceeded = false;
    int components = 0;
    long relation_instances = 0;
    long relation_failures = 0;
    std::vector<std::string> failures;
};

inline std::vector<KashaevMove> elementary_moves(int n) {
    std::vector<KashaevMove> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(KashaevMove::rho(i, 1));
        out.push_back(KashaevMove::rho(i, -1));
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) {
                out.push_back(KashaevMove::omega(i, j, 1));
                out.push_back(KashaevMove::omega(i, j, -1));
            }
    for (const auto& sg : relation_perms(n))
        if (!perm_is_identity(sg)) out.push_back(KashaevMove::P(sg));
    return out;
}

struct VecHash {
    size_t operator()(const std::vector<uint64_t>& v) const {
        uint64_t h = 1469598103934665603ULL;
        for (uint64_t x : v) h = (h ^ x) * 1099511628211ULL;
        return (size_t)h;
    }
};

inline MoveGraph explore(const DottedTriangulation& seed, int max_objects, bool check_relations = true) {
    if (max_objects < 1) fail("ConfigError", "max_objects must be positive");
    MoveGraph g;
    std::unordered_map<std::vector<uint64_t>, int, VecHash> index;
    g.nodes.push_back(seed);
    index[seed.canonical_form()] = 0;
    auto moves = elementary_moves(seed.size());
    auto nm = [&](int l) { return seed.name(l); };
    size_t head = 0;
    while (head < g.nodes.size()) {
        int u = (int)head++;
        for (const auto& m : moves) {
            auto nx = try_apply(g.nodes[u], m);
            if (!nx) continue;
            auto key = nx->canonical_form();
            auto it = index.find(key);
            int v;
            if (it == index.end()) {
                if ((int)g.nodes.size() >= max_objects) {
                    g.budget_exceeded = true;
                    continue;
                }
                v = (int)g.nodes.size();
                index.emplace(std::move(key), v);
                g.nodes.push_back(std::move(*nx));
            } else {
                v = it->second;
            }
            g.edges.push_back({u, v, m.str(nm)});
        }
    }
    // undirected components
    std::vector<int> parent(g.nodes.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (auto& e : g.edges) parent[find(e.from)] = find(e.to);
    for (int i = 0; i < (int)g.nodes.size(); ++i) g.components += find(i) == i;
    if (check_relations) {
        for (size_t i = 0; i < g.nodes.size(); ++i)
            for (auto& r : verify_relation_instances(g.nodes[i])) {
                ++g.relation_instances;
                if (!r.ok()) {
                    ++g.relation_failures;
                    if (g.failures.size() < 20)
                        g.failures.push_back("node " + std::to_string(i) + ": " + r.rel.name + " " + r.note);
                }
            }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Text format
//   surface <genus> <punctures> [<arcs per boundary circle>...]
//   tri <id> <t.side.o|-> <t.side.o|-> <t.side.o|->
//   dot <id> <corner>
//   lab <id> <name>

inline std::string to_text(const DottedTriangulation& d) {
    std::ostringstream os;
    const auto& S = d.base.surface;
    os << "surface " << S.genus << " " << S.punctures;
    for (int a : S.boundary_arcs) os << " " << a;
    os << "\n";
    for (int t = 0; t < d.size(); ++t) {
        os << "tri " << t;
        for (int k = 0; k < 3; ++k) {
            SideRef p = d.base.glue[t][k];
            if (p.glued()) os << " " << p.tri << "." << p.side << ".-";
            else os << " -";
        }
        os << "\n";
    }
    for (int t = 0; t < d.size(); ++t) os << "dot " << t << " " << d.dot[t] << "\n";
    for (int t = 0; t < d.size(); ++t) os << "lab " << t << " " << d.name(d.label[t]) << "\n";
    return os.str();
}

inline DottedTriangulation from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    MarkedSurface S;
    bool have_surface = false;
    std::map<int, std::array<RawGlue, 3>> tris;
    std::map<int, int> dots;
    std::map<int, std::string> labs;
    int lineno = 0;
    auto bad = [&](const std::string& m) { fail("ParseError", "line " + std::to_string(lineno) + ": " + m); };
    while (std::getline(is, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;
        if (kw == "surface") {
            if (!(ls >> S.genus >> S.punctures)) bad("surface needs genus and punctures");
            int a;
            while (ls >> a) S.boundary_arcs.push_back(a);
            have_surface = true;
        } else if (kw == "tri") {
            int id;
            if (!(ls >> id)) bad("tri needs an id");
            std::array<RawGlue, 3> g;
            for (int k = 0; k < 3; ++k) {
                std::string tok;
                if (!(ls >> tok)) bad("tri needs three side entries");
                if (tok == "-") continue;
                int a, b;
                char o = '-';
                if (std::sscanf(tok.c_str(), "%d.%d.%c", &a, &b, &o) < 2) bad("bad side entry '" + tok + "'");
                g[k] = RawGlue{a, b, o};
            }
            tris[id] = g;
        } else if (kw == "dot") {
            int id, c;
            if (!(ls >> id >> c)) bad("dot needs id and corner");
            dots[id] = c;
        } else if (kw == "lab") {
            int id;
            std::string nm;
            if (!(ls >> id >> nm)) bad("lab needs id and name");
            labs[id] = nm;
        } else {
            bad("unknown keyword '" + kw + "'");
        }
    }
    if (!have_surface) fail("ParseError", "missing surface line");
    std::vector<std::array<RawGlue, 3>> raw;
    for (int i = 0; i < (int)tris.size(); ++i) {
        if (!tris.count(i)) fail("ParseError", "triangle ids must be 0..n-1");
        raw.push_back(tris[i]);
    }
    DottedTriangulation d;
    d.base = build_triangulation(S, raw);
    int n = d.size();
    d.dot.assign(n, 0);
    for (auto [id, c] : dots) {
        if (id < 0 || id >= n) fail("ParseError", "dot for unknown triangle");
        d.dot[id] = c;
    }
    d.label = perm_identity(n);
    d.names.resize(n);
    for (int t = 0; t < n; ++t) d.names[t] = labs.count(t) ? labs[t] : default_label_name(t);
    std::set<std::string> uniq(d.names.begin(), d.names.end());
    if ((int)uniq.size() != n) fail("ParseError", "label names must be distinct");
    d.validate();
    return d;
}

} // namespace rcoord
