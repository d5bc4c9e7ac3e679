#pragma once

#include <gmpxx.h>

#include <limits>
#include <map>
#include <set>
#include <functional>
#include <algorithm>
#include <numeric>
#include <optional>
#include <memory>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "rcoord/error.hpp"
#include "rcoord/laurent.hpp"
#include "rcoord/perm.hpp"

namespace rcoord {

// ---------------------------------------------------------------------------
// Generator universe.  Slot i carries the pair (Y_i, Z_i) = generators 2i and
// 2i+1.  Sector 1 slots are the b^-1 doubles and use q-hat.

struct QUniverse {
    std::vector<std::string> names;
    std::vector<int> sector;
    std::vector<int> base;  // slot of the undoubled partner (itself for sector 0)

    static QUniverse labels(const std::vector<std::string>& names, bool doubles = false) {
        QUniverse U;
        for (size_t i = 0; i < names.size(); ++i) U.names.push_back(names[i]), U.sector.push_back(0), U.base.push_back((int)i);
        if (doubles)
            for (size_t i = 0; i < names.size(); ++i)
                U.names.push_back(names[i]), U.sector.push_back(1), U.base.push_back((int)i);
        return U;
    }
    static QUniverse plain(int n, bool doubles = false) {
        std::vector<std::string> nm;
        for (int i = 0; i < n; ++i) nm.push_back(default_label_name_q(i));
        return labels(nm, doubles);
    }
    static std::string default_label_name_q(int i) {
        static const char* base = "rstuvwxyz";
        return i < 9 ? std::string(1, base[i]) : "l" + std::to_string(i);
    }

    int nslots() const { return (int)names.size(); }
    int ngens() const { return 2 * nslots(); }
    int nlabels() const {
        int k = 0;
        for (int s : sector) k += s == 0;
        return k;
    }
    bool has_doubles() const { return nlabels() != nslots(); }
    // slot of label l in the given sector
    int slot(int label, int sec = 0) const { return sec == 0 ? label : nlabels() + label; }
    std::string gen_name(int g) const {
        int s = g / 2;
        std::string h = sector[s] ? "YY" : "Y";
        if (g % 2) h = sector[s] ? "ZZ" : "Z";
        return h + "_" + names[s];
    }
    friend bool operator==(const QUniverse& a, const QUniverse& b) { return a.names == b.names && a.sector == b.sector; }
};

// ---------------------------------------------------------------------------
// Weyl-ordered monomials: W(u) W(v) = q^{<u,v>} W(u+v) with
// <u,v> = sum over slots of (a c' - c a'), a the Y and c the Z exponent.
// Y^a Z^c = q^{ac} W(a,c).  q-powers are stored in half units.

struct QKey {
    std::vector<int> e;
    int qh = 0;   // exponent of q, times 2
    int qhh = 0;  // exponent of q-hat, times 2
    auto operator<=>(const QKey&) const = default;
    bool operator==(const QKey&) const = default;
};

inline void weyl_pairing(const QUniverse& U, const std::vector<int>& u, const std::vector<int>& v, int& p0, int& p1) {
    p0 = p1 = 0;
    for (int s = 0; s < U.nslots(); ++s) {
        int x = u[2 * s] * v[2 * s + 1] - u[2 * s + 1] * v[2 * s];
        (U.sector[s] ? p1 : p0) += x;
    }
}

class QTorusPoly {
public:
    QTorusPoly() = default;
    explicit QTorusPoly(const QUniverse* U) : U_(U) {}

    static QTorusPoly constant(const QUniverse* U, const mpq_class& c) {
        QTorusPoly p(U);
        if (c != 0) p.t_[QKey{std::vector<int>(U->ngens(), 0), 0, 0}] = c;
        return p;
    }
    // c * q^{qh/2} * qhat^{qhh/2} * W(e)
    static QTorusPoly weyl(const QUniverse* U, std::vector<int> e, int qh = 0, int qhh = 0, const mpq_class& c = 1) {
        QTorusPoly p(U);
        if (c != 0) p.t_[QKey{std::move(e), qh, qhh}] = c;
        return p;
    }
    static QTorusPoly gen(const QUniverse* U, int g, int power = 1) {
        std::vector<int> e(U->ngens(), 0);
        e[g] = power;
        return weyl(U, e);
    }
    // q^{k/2} (or q-hat) as a scalar
    static QTorusPoly qpow(const QUniverse* U, int half, int sec = 0) {
        return sec ? weyl(U, std::vector<int>(U->ngens(), 0), 0, half) : weyl(U, std::vector<int>(U->ngens(), 0), half, 0);
    }

    const QUniverse* universe() const { return U_; }
    const std::map<QKey, mpq_class>& terms() const { return t_; }
    bool is_zero() const { return t_.empty(); }
    bool is_term() const { return t_.size() == 1; }
    bool is_one() const {
        if (!is_term()) return false;
        auto& [k, c] = *t_.begin();
        return c == 1 && k.qh == 0 && k.qhh == 0 && std::all_of(k.e.begin(), k.e.end(), [](int x) { return !x; });
    }

    friend QTorusPoly operator+(const QTorusPoly& a, const QTorusPoly& b) {
        QTorusPoly r = a;
        if (!r.U_) r.U_ = b.U_;
        for (auto& [k, c] : b.t_) r.add_term(k, c);
        return r;
    }
    friend QTorusPoly operator-(const QTorusPoly& a, const QTorusPoly& b) {
        QTorusPoly r = a;
        if (!r.U_) r.U_ = b.U_;
        for (auto& [k, c] : b.t_) r.add_term(k, -c);
        return r;
    }
    friend QTorusPoly operator*(const QTorusPoly& a, const QTorusPoly& b) {
        QTorusPoly r(a.U_ ? a.U_ : b.U_);
        for (auto& [ka, ca] : a.t_)
            for (auto& [kb, cb] : b.t_) {
                QKey k;
                k.e.resize(ka.e.size());
                for (size_t i = 0; i < k.e.size(); ++i) k.e[i] = ka.e[i] + kb.e[i];
                int p0, p1;
                weyl_pairing(*r.U_, ka.e, kb.e, p0, p1);
                k.qh = ka.qh + kb.qh + 2 * p0;
                k.qhh = ka.qhh + kb.qhh + 2 * p1;
                r.add_term(k, ca * cb);
            }
        return r;
    }
    // Inverse of a single term.
    QTorusPoly term_inverse() const {
        if (!is_term()) fail("Unsupported", "only single terms are invertible in the torus");
        auto& [k, c] = *t_.begin();
        QKey n{k.e, -k.qh, -k.qhh};
        for (auto& x : n.e) x = -x;
        QTorusPoly r(U_);
        r.t_[n] = 1 / c;
        return r;
    }

    friend bool operator==(const QTorusPoly& a, const QTorusPoly& b) { return a.t_ == b.t_; }

    std::string str() const {
        if (t_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto& [k, c] : t_) {
            if (!first) os << " + ";
            first = false;
            bool any = false;
            if (c != 1) os << c.get_str(), any = true;
            if (k.qh) os << (any ? "*" : "") << "q^" << (k.qh % 2 ? std::to_string(k.qh) + "/2" : std::to_string(k.qh / 2)), any = true;
            if (k.qhh) os << (any ? "*" : "") << "qq^" << (k.qhh % 2 ? std::to_string(k.qhh) + "/2" : std::to_string(k.qhh / 2)), any = true;
            std::ostringstream w;
            bool wany = false;
            for (size_t g = 0; g < k.e.size(); ++g) {
                if (!k.e[g]) continue;
                if (wany) w << ",";
                w << U_->gen_name((int)g);
                if (k.e[g] != 1) w << "^" << k.e[g];
                wany = true;
            }
            if (wany) os << (any ? "*" : "") << "W(" << w.str() << ")";
            else if (!any) os << "1";
        }
        return os.str();
    }

private:
    void add_term(const QKey& k, const mpq_class& c) {
        auto it = t_.find(k);
        if (it == t_.end()) {
            if (c != 0) t_.emplace(k, c);
            return;
        }
        it->second += c;
        if (it->second == 0) t_.erase(it);
    }

    const QUniverse* U_ = nullptr;
    std::map<QKey, mpq_class> t_;
};

// ---------------------------------------------------------------------------
// Expression DAG over the torus

struct QNode;
using QExpr = std::shared_ptr<const QNode>;

struct QNode {
    enum Kind { Poly, Sum, Product, Inverse } kind = Poly;
    QTorusPoly poly;
    QExpr a, b;
    int depth = 1;
};

inline QExpr qpoly(QTorusPoly p) {
    auto n = std::make_shared<QNode>();
    n->kind = QNode::Poly;
    n->poly = std::move(p);
    return n;
}
inline QExpr qprod(const QExpr& x, const QExpr& y) {
    if (x->kind == QNode::Poly && y->kind == QNode::Poly) return qpoly(x->poly * y->poly);
    if (x->kind == QNode::Poly && x->poly.is_one()) return y;
    if (y->kind == QNode::Poly && y->poly.is_one()) return x;
    auto n = std::make_shared<QNode>();
    n->kind = QNode::Product;
    n->a = x, n->b = y;
    n->depth = 1 + std::max(x->depth, y->depth);
    return n;
}
inline QExpr qsum(const QExpr& x, const QExpr& y) {
    if (x->kind == QNode::Poly && y->kind == QNode::Poly) return qpoly(x->poly + y->poly);
    if (x->kind == QNode::Poly && x->poly.is_zero()) return y;
    if (y->kind == QNode::Poly && y->poly.is_zero()) return x;
    auto n = std::make_shared<QNode>();
    n->kind = QNode::Sum;
    n->a = x, n->b = y;
    n->depth = 1 + std::max(x->depth, y->depth);
    return n;
}
inline QExpr qinv(const QExpr& x) {
    if (x->kind == QNode::Poly) {
        if (x->poly.is_zero()) fail("DivisionByZero", "inverse of zero in the torus");
        if (x->poly.is_term()) return qpoly(x->poly.term_inverse());
    }
    if (x->kind == QNode::Inverse) return x->a;
    if (x->kind == QNode::Product) return qprod(qinv(x->b), qinv(x->a));
    auto n = std::make_shared<QNode>();
    n->kind = QNode::Inverse;
    n->a = x;
    n->depth = 1 + x->depth;
    return n;
}
inline QExpr qpow(const QExpr& x, int k) {
    if (k < 0) return qpow(qinv(x), -k);
    if (k == 0) fail("Unsupported", "zeroth power needs a universe");
    QExpr r = x;
    for (int i = 1; i < k; ++i) r = qprod(r, x);
    return r;
}

inline std::string qstr(const QExpr& x) {
    switch (x->kind) {
    case QNode::Poly: return x->poly.str();
    case QNode::Sum: return "(" + qstr(x->a) + " + " + qstr(x->b) + ")";
    case QNode::Product: return qstr(x->a) + " . " + qstr(x->b);
    case QNode::Inverse: return "[" + qstr(x->a) + "]^-1";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Automorphisms: image of every generator.

struct QAutomorphism {
    const QUniverse* U = nullptr;
    std::vector<QExpr> img;
    std::string tag;

    static QAutomorphism identity(const QUniverse* U) {
        QAutomorphism a;
        a.U = U;
        a.tag = "id";
        for (int g = 0; g < U->ngens(); ++g) a.img.push_back(qpoly(QTorusPoly::gen(U, g)));
        return a;
    }
};

// Replaces every generator in e by its image under a.
inline QExpr substitute(const QExpr& e, const QAutomorphism& a, std::unordered_map<const QNode*, QExpr>& memo,
                        int depth_budget) {
    auto it = memo.find(e.get());
    if (it != memo.end()) return it->second;
    QExpr out;
    switch (e->kind) {
    case QNode::Poly: {
        const QUniverse& U = *a.U;
        out = qpoly(QTorusPoly(a.U));
        for (auto& [k, c] : e->poly.terms()) {
            // W(v) = q^{-sum a c} prod_slots Y^a Z^c
            int corr0 = 0, corr1 = 0;
            for (int s = 0; s < U.nslots(); ++s) (U.sector[s] ? corr1 : corr0) += k.e[2 * s] * k.e[2 * s + 1];
            QExpr t = qpoly(QTorusPoly::weyl(a.U, std::vector<int>(U.ngens(), 0), k.qh - 2 * corr0, k.qhh - 2 * corr1, c));
            for (int g = 0; g < U.ngens(); ++g)
                if (k.e[g]) t = qprod(t, qpow(a.img[g], k.e[g]));
            out = qsum(out, t);
        }
        break;
    }
    case QNode::Sum: out = qsum(substitute(e->a, a, memo, depth_budget), substitute(e->b, a, memo, depth_budget)); break;
    case QNode::Product:
        out = qprod(substitute(e->a, a, memo, depth_budget), substitute(e->b, a, memo, depth_budget));
        break;
    case QNode::Inverse: out = qinv(substitute(e->a, a, memo, depth_budget)); break;
    }
    if (out->depth > depth_budget) fail("DepthBudgetExceeded", "expression depth " + std::to_string(out->depth));
    memo[e.get()] = out;
    return out;
}

// compose(a1, a2) acts with a1 first: a1's images are substituted into a2's
// expressions.
inline QAutomorphism compose(const QAutomorphism& a1, const QAutomorphism& a2, int depth_budget = 256) {
    if (!(*a1.U == *a2.U)) fail("Unsupported", "automorphisms over different generator sets");
    QAutomorphism r;
    r.U = a1.U;
    r.tag = a1.tag + " ; " + a2.tag;
    std::unordered_map<const QNode*, QExpr> memo;
    for (const auto& e : a2.img) r.img.push_back(substitute(e, a1, memo, depth_budget));
    return r;
}

// Generator images for slot pairs, written exactly as products of generators.
namespace qgen {
inline QExpr Y(const QUniverse* U, int slot, int k = 1) { return qpoly(QTorusPoly::gen(U, 2 * slot, k)); }
inline QExpr Z(const QUniverse* U, int slot, int k = 1) { return qpoly(QTorusPoly::gen(U, 2 * slot + 1, k)); }
inline QExpr q(const QUniverse* U, int slot, int half) { return qpoly(QTorusPoly::qpow(U, half, U->sector[slot])); }
} // namespace qgen

// A_s: Y_s -> Z_s^-1, Z_s -> q Y_s Z_s^-1 (and the same on the double).
inline QAutomorphism aut_A(const QUniverse* U, int s) {
    using namespace qgen;
    auto a = QAutomorphism::identity(U);
    a.tag = "A_" + U->names[s];
    for (int sec = 0; sec < (U->has_doubles() ? 2 : 1); ++sec) {
        int x = U->slot(s, sec);
        a.img[2 * x] = Z(U, x, -1);
        a.img[2 * x + 1] = qprod(qprod(q(U, x, 2), Y(U, x)), Z(U, x, -1));
    }
    return a;
}

inline QAutomorphism aut_T(const QUniverse* U, int r, int s) {
    using namespace qgen;
    auto a = QAutomorphism::identity(U);
    a.tag = "T_" + U->names[r] + U->names[s];
    for (int sec = 0; sec < (U->has_doubles() ? 2 : 1); ++sec) {
        int x = U->slot(r, sec), y = U->slot(s, sec);
        a.img[2 * x] = qinv(qsum(Z(U, y), qprod(Y(U, x, -1), Y(U, y))));
        a.img[2 * x + 1] =
            qinv(qsum(qprod(qprod(qprod(qprod(q(U, x, 4), Y(U, x)), Z(U, x, -1)), Y(U, y, -1)), Z(U, y)), Z(U, x, -1)));
        a.img[2 * y] = qsum(qprod(Y(U, x), Z(U, y)), Y(U, y));
        a.img[2 * y + 1] = qprod(Z(U, x), Z(U, y));
    }
    return a;
}

// Inverse of aut_T: Y_r -> Y_r Y_s, Z_r -> Z_r + q Y_r Z_s,
// Y_s -> Z_r' ^-1 ... written through the common factor G = Z_r + q^-1 Z_s Y_r.
inline QAutomorphism aut_T_inverse(const QUniverse* U, int r, int s) {
    using namespace qgen;
    auto a = QAutomorphism::identity(U);
    a.tag = "T_" + U->names[r] + U->names[s] + "^-1";
    for (int sec = 0; sec < (U->has_doubles() ? 2 : 1); ++sec) {
        int x = U->slot(r, sec), y = U->slot(s, sec);
        QExpr G = qsum(Z(U, x), qprod(Y(U, x), Z(U, y)));
        a.img[2 * x] = qprod(Y(U, x), Y(U, y));
        a.img[2 * x + 1] = G;
        a.img[2 * y] = qprod(qprod(Y(U, y), Z(U, x)), qinv(G));
        a.img[2 * y + 1] = qprod(qinv(G), Z(U, y));
    }
    return a;
}

inline QAutomorphism aut_F(const QUniverse* U, int r, int s) {
    using namespace qgen;
    auto a = QAutomorphism::identity(U);
    a.tag = "F_" + U->names[r] + U->names[s];
    for (int sec = 0; sec < (U->has_doubles() ? 2 : 1); ++sec) {
        int x = U->slot(r, sec), y = U->slot(s, sec);
        a.img[2 * x + 1] = qprod(Z(U, x), Z(U, y, -1));
        a.img[2 * y] = qprod(Y(U, x), Y(U, y));
    }
    return a;
}

// P_sigma: Y_s -> Y_{sigma^-1(s)}.  sigma acts on labels.
inline QAutomorphism aut_P(const QUniverse* U, const Perm& sigma) {
    using namespace qgen;
    auto a = QAutomorphism::identity(U);
    a.tag = "P";
    Perm inv = perm_inverse(sigma);
    for (int sec = 0; sec < (U->has_doubles() ? 2 : 1); ++sec)
        for (int l = 0; l < U->nlabels(); ++l) {
            int x = U->slot(l, sec), y = U->slot(inv[l], sec);
            a.img[2 * x] = Y(U, y);
            a.img[2 * x + 1] = Z(U, y);
        }
    return a;
}

// Operator words as written (leftmost factor first); the rightmost factor
// acts first under conjugation X -> W^-1 X W.
struct QFactor {
    char kind;  // 'A', 'T', 't' (T inverse), 'F', 'P'
    int r = -1, s = -1;
    Perm sigma;
};

inline QAutomorphism factor_automorphism(const QUniverse* U, const QFactor& f) {
    switch (f.kind) {
    case 'A': return aut_A(U, f.s);
    case 'T': return aut_T(U, f.r, f.s);
    case 't': return aut_T_inverse(U, f.r, f.s);
    case 'F': return aut_F(U, f.r, f.s);
    case 'P': return aut_P(U, f.sigma);
    }
    fail("Unsupported", std::string("unknown operator factor ") + f.kind);
}

inline QAutomorphism word_automorphism(const QUniverse* U, const std::vector<QFactor>& word, int depth_budget = 256) {
    auto acc = QAutomorphism::identity(U);
    for (const auto& f : word) acc = compose(factor_automorphism(U, f), acc, depth_budget);
    acc.tag = "word";
    return acc;
}

// ---------------------------------------------------------------------------
// Classical specialization q, q-hat -> 1

inline RatFn to_classical(const QExpr& e, int nvars, std::unordered_map<const QNode*, RatFn>& memo) {
    auto it = memo.find(e.get());
    if (it != memo.end()) return it->second;
    RatFn out(nvars);
    switch (e->kind) {
    case QNode::Poly:
        for (auto& [k, c] : e->poly.terms()) out = out + RatFn::monomial(nvars, k.e, c);
        break;
    case QNode::Sum: out = to_classical(e->a, nvars, memo) + to_classical(e->b, nvars, memo); break;
    case QNode::Product: out = to_classical(e->a, nvars, memo) * to_classical(e->b, nvars, memo); break;
    case QNode::Inverse: out = to_classical(e->a, nvars, memo).inv(); break;
    }
    memo[e.get()] = out;
    return out;
}

inline RatFn to_classical(const QExpr& e, int nvars) {
    std::unordered_map<const QNode*, RatFn> memo;
    return to_classical(e, nvars, memo);
}

// ---------------------------------------------------------------------------
// Clock and shift matrix models over F_p

namespace modp {
inline uint64_t mul(uint64_t a, uint64_t b, uint64_t p) { return a * b % p; }
inline uint64_t pw(uint64_t a, uint64_t e, uint64_t p) {
    uint64_t r = 1;
    a %= p;
    while (e) {
        if (e & 1) r = r * a % p;
        a = a * a % p;
        e >>= 1;
    }
    return r;
}
inline uint64_t inv(uint64_t a, uint64_t p) { return pw(a, p - 2, p); }
inline bool is_prime(uint64_t n) {
    if (n < 2) return false;
    for (uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}
} // namespace modp

struct ClockShiftParams {
    int N = 7;
    uint64_t p = 0;  // 0: choose the largest prime below 2^31 with p = 1 mod N
};

// Root-of-unity data for one model.
struct ClockShiftModel {
    int N = 0;
    uint64_t p = 0;
    uint64_t omega = 0;   // primitive N-th root of unity, equal to q^2
    uint64_t qhalf = 0;   // q^{1/2}
    uint64_t qqhalf = 0;  // q-hat^{1/2}

    uint64_t qpow_half(int k, int sec) const {
        uint64_t b = sec ? qqhalf : qhalf;
        if (k < 0) return modp::pw(modp::inv(b, p), -(long)k, p);
        return modp::pw(b, k, p);
    }
};

inline ClockShiftModel clock_shift_model(const ClockShiftParams& prm, uint64_t seed = 1) {
    ClockShiftModel M;
    M.N = prm.N;
    if (prm.N < 2 || prm.N % 2 == 0) fail("NoRootOfUnity", "matrix dimension must be odd and at least 3");
    uint64_t p = prm.p;
    if (!p) {
        p = (1ULL << 31) - 1;
        while (!(modp::is_prime(p) && p % prm.N == 1)) --p;
    }
    if (!modp::is_prime(p) || p % prm.N != 1)
        fail("NoRootOfUnity", "p = " + std::to_string(p) + " is not a prime congruent to 1 mod " + std::to_string(prm.N));
    M.p = p;
    auto order_is_N = [&](uint64_t w) {
        if (modp::pw(w, prm.N, p) != 1) return false;
        for (int d = 1; d < prm.N; ++d)
            if (prm.N % d == 0 && modp::pw(w, d, p) == 1) return false;
        return true;
    };
    for (uint64_t g = 2;; ++g) {
        uint64_t w = modp::pw(g, (p - 1) / prm.N, p);
        if (order_is_N(w)) {
            M.omega = w;
            break;
        }
    }
    // q = omega^{(N+1)/2}, q^{1/2} = omega^k with 4k = 1 mod N
    int k = 0;
    while ((4 * k) % prm.N != 1 % prm.N) ++k;
    M.qhalf = modp::pw(M.omega, k, p);
    // q-hat uses another primitive root, picked by the seed
    std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
    int t = 1;
    do t = 1 + (int)(rng() % (prm.N - 1));
    while (std::gcd(t, prm.N) != 1);
    M.qqhalf = modp::pw(M.qhalf, t, p);
    return M;
}

// Dense square matrix mod p.
struct ModMat {
    int n = 0;
    std::vector<uint64_t> a;
    ModMat() = default;
    explicit ModMat(int n) : n(n), a((size_t)n * n, 0) {}
    uint64_t& at(int i, int j) { return a[(size_t)i * n + j]; }
    uint64_t at(int i, int j) const { return a[(size_t)i * n + j]; }
    size_t nnz() const {
        size_t k = 0;
        for (auto x : a) k += x != 0;
        return k;
    }
};

inline ModMat mat_add(const ModMat& x, const ModMat& y, uint64_t p) {
    ModMat r(x.n);
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = (x.a[i] + y.a[i]) % p;
    return r;
}

inline ModMat mat_mul(const ModMat& x, const ModMat& y, uint64_t p) {
    int n = x.n;
    ModMat r(n);
    if (x.nnz() <= y.nnz()) {
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) {
                uint64_t v = x.at(i, k);
                if (!v) continue;
                const uint64_t* yr = &y.a[(size_t)k * n];
                uint64_t* rr = &r.a[(size_t)i * n];
                for (int j = 0; j < n; ++j)
                    if (yr[j]) rr[j] = (rr[j] + v * yr[j]) % p;
            }
    } else {
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) {
                uint64_t v = y.at(k, j);
                if (!v) continue;
                for (int i = 0; i < n; ++i) {
                    uint64_t w = x.at(i, k);
                    if (w) r.at(i, j) = (r.at(i, j) + w * v) % p;
                }
            }
    }
    return r;
}

inline std::optional<ModMat> mat_inverse(ModMat m, uint64_t p) {
    int n = m.n;
    ModMat inv(n);
    for (int i = 0; i < n; ++i) inv.at(i, i) = 1;
    for (int c = 0; c < n; ++c) {
        int piv = -1;
        for (int r = c; r < n; ++r)
            if (m.at(r, c)) {
                piv = r;
                break;
            }
        if (piv < 0) return std::nullopt;
        if (piv != c)
            for (int j = 0; j < n; ++j) std::swap(m.at(piv, j), m.at(c, j)), std::swap(inv.at(piv, j), inv.at(c, j));
        uint64_t f = modp::inv(m.at(c, c), p);
        for (int j = 0; j < n; ++j) m.at(c, j) = m.at(c, j) * f % p, inv.at(c, j) = inv.at(c, j) * f % p;
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            uint64_t g = m.at(r, c);
            if (!g) continue;
            uint64_t ng = p - g;
            uint64_t* mr = &m.a[(size_t)r * n];
            const uint64_t* mc = &m.a[(size_t)c * n];
            uint64_t* ir = &inv.a[(size_t)r * n];
            const uint64_t* ic = &inv.a[(size_t)c * n];
            for (int j = 0; j < n; ++j) {
                if (mc[j]) mr[j] = (mr[j] + ng * mc[j]) % p;
                if (ic[j]) ir[j] = (ir[j] + ng * ic[j]) % p;
            }
        }
    }
    return inv;
}

// Evaluates expressions on the tensor product of clock/shift slots.
class MatrixEvaluator {
public:
    MatrixEvaluator(const QUniverse* U, const ClockShiftModel& M, std::vector<int> slots, uint64_t seed)
        : U_(U), M_(M), slots_(std::move(slots)) {
        dim_ = 1;
        for (size_t i = 0; i < slots_.size(); ++i) dim_ *= M.N;
        std::mt19937_64 rng(seed);
        alpha_.assign(U->ngens(), 1);
        for (int g = 0; g < U->ngens(); ++g) alpha_[g] = 1 + rng() % (M.p - 1);
        pos_.assign(U->nslots(), -1);
        for (size_t i = 0; i < slots_.size(); ++i) pos_[slots_[i]] = (int)i;
    }
    int dim() const { return dim_; }

    ModMat eval(const QExpr& e) {
        auto it = memo_.find(e.get());
        if (it != memo_.end()) return it->second;
        ModMat out;
        switch (e->kind) {
        case QNode::Poly: out = eval_poly(e->poly); break;
        case QNode::Sum: out = mat_add(eval(e->a), eval(e->b), M_.p); break;
        case QNode::Product: out = mat_mul(eval(e->a), eval(e->b), M_.p); break;
        case QNode::Inverse: {
            auto inv = mat_inverse(eval(e->a), M_.p);
            if (!inv) fail("SingularDenominator", "denominator singular at this evaluation point");
            out = std::move(*inv);
            break;
        }
        }
        memo_[e.get()] = out;
        keep_.push_back(e);
        return out;
    }

    // Matrix of a generator (for the defining-relation tests).
    ModMat generator(int g) { return eval_poly(QTorusPoly::gen(U_, g)); }

private:
    ModMat eval_poly(const QTorusPoly& P) {
        uint64_t p = M_.p;
        int N = M_.N, k = (int)slots_.size();
        ModMat r(dim_);
        for (auto& [key, c] : P.terms()) {
            for (int s = 0; s < U_->nslots(); ++s)
                if (pos_[s] < 0 && (key.e[2 * s] || key.e[2 * s + 1]))
                    fail("Unsupported", "expression uses a slot outside the model");
            mpz_class num = c.get_num() % (unsigned long)p, den = c.get_den() % (unsigned long)p;
            if (num < 0) num += (unsigned long)p;
            uint64_t scal = num.get_ui() * modp::inv(den.get_ui(), p) % p;
            scal = scal * M_.qpow_half(key.qh, 0) % p * M_.qpow_half(key.qhh, 1) % p;
            // W(a,c) = q^{-ac} (alpha U)^a (beta V)^c on each slot
            std::vector<int> a(k), cc(k);
            std::vector<uint64_t> sc(k);
            for (int i = 0; i < k; ++i) {
                int s = slots_[i];
                a[i] = key.e[2 * s], cc[i] = key.e[2 * s + 1];
                uint64_t v = M_.qpow_half(-2 * a[i] * cc[i], U_->sector[s]);
                v = v * pow_signed(alpha_[2 * s], a[i]) % p * pow_signed(alpha_[2 * s + 1], cc[i]) % p;
                sc[i] = v;
            }
            for (int col = 0; col < dim_; ++col) {
                int rest = col, row = 0, mult = 1;
                uint64_t v = scal;
                // slot 0 is the most significant digit
                std::vector<int> digit(k);
                for (int i = k - 1; i >= 0; --i) digit[i] = rest % N, rest /= N;
                for (int i = 0; i < k; ++i) {
                    int j = digit[i];
                    int jn = ((j + cc[i]) % N + N) % N;
                    uint64_t w = slot_root(slots_[i], (long)a[i] * jn);
                    v = v * sc[i] % p * w % p;
                    digit[i] = jn;
                }
                for (int i = k - 1; i >= 0; --i) row += digit[i] * mult, mult *= N;
                r.at(row, col) = (r.at(row, col) + v) % p;
            }
        }
        return r;
    }
    // omega^x for sector 0 slots, the q-hat square for sector 1 slots
    uint64_t slot_root(int s, long x) const {
        int N = M_.N;
        long e = ((x % N) + N) % N;
        uint64_t w = U_->sector[s] ? M_.qpow_half(4, 1) : M_.omega;
        return modp::pw(w, e, M_.p);
    }
    uint64_t pow_signed(uint64_t b, int e) const {
        if (e < 0) return modp::pw(modp::inv(b, M_.p), -e, M_.p);
        return modp::pw(b, e, M_.p);
    }

    const QUniverse* U_;
    ClockShiftModel M_;
    std::vector<int> slots_;
    std::vector<int> pos_;
    int dim_ = 1;
    std::vector<uint64_t> alpha_;
    std::unordered_map<const QNode*, ModMat> memo_;
    std::vector<QExpr> keep_;  // memo keys must not be recycled
};

// Truncated Malcev-Neumann expansion at a random q in F_p.  Monomials are
// ordered by a random integer weight; a series is exact for all terms of
// weight <= prec.  Used when the clock/shift model would be too large.

struct SeriesParams {
    int rel_prec = 12;       // expansion depth past the leading term, in weight units
    int weight_bound = 6;    // weights drawn from [-bound, bound] \ {0}
    size_t max_terms = 400000;
};

struct ExpVecHash {
    size_t operator()(const std::vector<int>& v) const {
        size_t h = 0xcbf29ce484222325ULL;
        for (int x : v) h = (h ^ (size_t)(uint32_t)x) * 0x100000001b3ULL;
        return h;
    }
};

class SeriesEvaluator {
public:
    static constexpr long kInf = std::numeric_limits<long>::max() / 4;

    struct Term {
        std::vector<int> e;
        uint64_t c;
        long w;
    };
    struct Ser {
        std::vector<Term> t;  // sorted by weight, nonzero coefficients
        long prec = kInf;
        long val() const { return t.empty() ? kInf : t.front().w; }
    };

    SeriesEvaluator(const QUniverse* U, uint64_t p, uint64_t seed, SeriesParams prm = {})
        : U_(U), p_(p), prm_(prm) {
        std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ULL + 17);
        wt_.resize(U->ngens());
        for (auto& w : wt_) {
            do w = (long)(rng() % (2 * prm.weight_bound + 1)) - prm.weight_bound;
            while (w == 0);
        }
        qh_ = 2 + rng() % (p - 3);
        qqh_ = 2 + rng() % (p - 3);
    }

    const Ser& eval(const QExpr& e) {
        auto it = memo_.find(e.get());
        if (it != memo_.end()) return it->second;
        Ser out;
        switch (e->kind) {
        case QNode::Poly: out = from_poly(e->poly); break;
        case QNode::Sum: {
            const Ser& a = eval(e->a);
            const Ser& b = eval(e->b);
            out = add(a, b);
            break;
        }
        case QNode::Product: {
            const Ser& a = eval(e->a);
            const Ser& b = eval(e->b);
            out = mul(a, b);
            break;
        }
        case QNode::Inverse: out = inverse(eval(e->a)); break;
        }
        keep_.push_back(e);
        return memo_.emplace(e.get(), std::move(out)).first->second;
    }

    // 1 equal up to the common precision, 0 differ; rel receives the precision
    // past the leading term that was actually compared.
    int compare(const QExpr& x, const QExpr& y, long& rel) {
        const Ser& a = eval(x);
        const Ser& b = eval(y);
        long prec = std::min(a.prec, b.prec);
        Ser d = add(a, negate(b));
        long lead = std::min(a.val(), b.val());
        rel = prec >= kInf ? kInf : prec - lead;
        for (auto& t : d.t)
            if (t.w <= prec) return 0;
        return 1;
    }

    // The only term of e up to the working precision, if there is exactly one.
    std::optional<std::pair<std::vector<int>, uint64_t>> single_term(const QExpr& e) {
        const Ser& a = eval(e);
        if (a.t.empty() || a.t.size() > 1 && a.t[1].w <= a.prec) return std::nullopt;
        if (a.prec < kInf && a.prec - a.t[0].w < prm_.rel_prec / 2) return std::nullopt;
        return std::make_pair(a.t[0].e, a.t[0].c);
    }
    // value of c q^{qh/2} qhat^{qhh/2} at the evaluation point
    uint64_t value(const mpq_class& c, int qh, int qhh) const {
        return scalar(c) * pw_half(qh, 0) % p_ * pw_half(qhh, 1) % p_;
    }

private:
    long weight(const std::vector<int>& e) const {
        long w = 0;
        for (size_t g = 0; g < e.size(); ++g) w += wt_[g] * e[g];
        return w;
    }
    uint64_t pw_half(long k, int sec) const {
        uint64_t b = sec ? qqh_ : qh_;
        if (k < 0) return modp::pw(modp::inv(b, p_), -k, p_);
        return modp::pw(b, k, p_);
    }
    uint64_t scalar(const mpq_class& c) const {
        mpz_class num = c.get_num() % (unsigned long)p_, den = c.get_den() % (unsigned long)p_;
        if (num < 0) num += (unsigned long)p_;
        return num.get_ui() * modp::inv(den.get_ui(), p_) % p_;
    }
    Ser finish(std::unordered_map<std::vector<int>, uint64_t, ExpVecHash>& acc, long prec) const {
        Ser s;
        s.prec = prec;
        for (auto& [e, c] : acc) {
            if (!c) continue;
            long w = weight(e);
            if (w > prec) continue;
            s.t.push_back({e, c, w});
        }
        std::sort(s.t.begin(), s.t.end(), [](const Term& a, const Term& b) { return a.w != b.w ? a.w < b.w : a.e < b.e; });
        if (s.t.size() > prm_.max_terms) fail("BudgetExceeded", "series expansion exceeds the term budget");
        return s;
    }
    Ser from_poly(const QTorusPoly& P) const {
        std::unordered_map<std::vector<int>, uint64_t, ExpVecHash> acc;
        for (auto& [k, c] : P.terms()) {
            uint64_t v = scalar(c) * pw_half(k.qh, 0) % p_ * pw_half(k.qhh, 1) % p_;
            auto& slot = acc[k.e];
            slot = (slot + v) % p_;
        }
        return finish(acc, kInf);
    }
    Ser negate(const Ser& a) const {
        Ser r = a;
        for (auto& t : r.t) t.c = (p_ - t.c) % p_;
        return r;
    }
    Ser add(const Ser& a, const Ser& b) const {
        std::unordered_map<std::vector<int>, uint64_t, ExpVecHash> acc;
        for (auto& t : a.t) acc[t.e] = t.c;
        for (auto& t : b.t) {
            auto& slot = acc[t.e];
            slot = (slot + t.c) % p_;
        }
        return finish(acc, std::min(a.prec, b.prec));
    }
    // q-factor of W(u) W(v)
    uint64_t twist(const std::vector<int>& u, const std::vector<int>& v) const {
        int p0, p1;
        weyl_pairing(*U_, u, v, p0, p1);
        return pw_half(2L * p0, 0) * pw_half(2L * p1, 1) % p_;
    }
    Ser mul(const Ser& a, const Ser& b) const {
        long prec = kInf;
        if (a.prec < kInf) prec = std::min(prec, a.prec + (b.t.empty() ? 0 : b.val()));
        if (b.prec < kInf) prec = std::min(prec, b.prec + (a.t.empty() ? 0 : a.val()));
        std::unordered_map<std::vector<int>, uint64_t, ExpVecHash> acc;
        std::vector<int> e(U_->ngens());
        for (auto& x : a.t)
            for (auto& y : b.t) {
                if (x.w + y.w > prec) break;
                for (size_t g = 0; g < e.size(); ++g) e[g] = x.e[g] + y.e[g];
                uint64_t v = x.c * y.c % p_ * twist(x.e, y.e) % p_;
                auto& slot = acc[e];
                slot = (slot + v) % p_;
            }
        return finish(acc, prec);
    }
    Ser inverse(const Ser& a) const {
        if (a.t.empty() || a.val() > a.prec) fail("SingularDenominator", "denominator vanishes to the working precision");
        if (a.t.size() > 1 && a.t[1].w == a.t[0].w) fail("SingularDenominator", "tied leading weights");
        const Term& l = a.t.front();
        long rho = a.prec >= kInf ? prm_.rel_prec : a.prec - l.w;
        // a = l (1 + R)
        Ser linv;
        {
            std::vector<int> e(l.e.size());
            for (size_t g = 0; g < e.size(); ++g) e[g] = -l.e[g];
            uint64_t c = modp::inv(l.c * twist(l.e, e) % p_, p_);
            linv.t.push_back({e, c, -l.w});
        }
        Ser rest;
        rest.t.assign(a.t.begin() + 1, a.t.end());
        rest.prec = kInf;
        Ser R = mul(linv, rest);
        R.prec = rho;  // relative weights
        Ser one;
        one.t.push_back({std::vector<int>(U_->ngens(), 0), 1, 0});
        one.prec = rho;
        Ser sum = one, power = one;
        Ser negR = negate(R);
        for (long k = 1; k <= rho; ++k) {
            power = mul(power, negR);
            power.prec = rho;
            std::erase_if(power.t, [&](const Term& t) { return t.w > rho; });
            if (power.t.empty()) break;
            sum = add(sum, power);
        }
        sum.prec = rho;
        Ser out = mul(sum, linv);
        out.prec = -l.w + rho;
        std::erase_if(out.t, [&](const Term& t) { return t.w > out.prec; });
        return out;
    }

    const QUniverse* U_;
    uint64_t p_;
    SeriesParams prm_;
    std::vector<long> wt_;
    uint64_t qh_, qqh_;
    std::unordered_map<const QNode*, Ser> memo_;
    std::vector<QExpr> keep_;
};

// ---------------------------------------------------------------------------
// Equality testing

enum class Verdict { EqualExact, EqualRandomized, NotEqual, Inconclusive };

inline const char* verdict_name(Verdict v) {
    switch (v) {
    case Verdict::EqualExact: return "EqualExact";
    case Verdict::EqualRandomized: return "EqualRandomized";
    case Verdict::NotEqual: return "NotEqual";
    case Verdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct EqualOptions {
    bool exact = true;
    bool classical = true;
    bool randomized = true;
    bool run_all = false;  // run every strategy instead of stopping at the first verdict
    ClockShiftParams matrix;
    std::vector<uint64_t> seeds{1, 2, 3};
    int max_matrix_dim = 343;  // beyond this the series strategy is used
    SeriesParams series;
};

struct EqualReport {
    Verdict verdict = Verdict::Inconclusive;
    int exact = -1;       // -1 not run / shape unsupported, 0 differ, 1 equal
    int classical = -1;   // same encoding
    int randomized = -1;  // same encoding
    std::vector<uint64_t> seeds_used;
    int dim = 0;
    uint64_t prime = 0;
    std::string method;  // "matrix" or "series"
    long series_precision = 0;
    std::string witness;
};

// Shape normal form: a polynomial, or the inverse of a polynomial.
struct QShape {
    bool inverse = false;
    QTorusPoly p;
};

inline std::optional<QShape> shape_of(const QExpr& e) {
    switch (e->kind) {
    case QNode::Poly: return QShape{false, e->poly};
    case QNode::Inverse: {
        auto s = shape_of(e->a);
        if (!s || s->inverse) return std::nullopt;
        return QShape{true, s->p};
    }
    case QNode::Product: {
        auto x = shape_of(e->a), y = shape_of(e->b);
        if (!x || !y) return std::nullopt;
        if (!x->inverse && !y->inverse) return QShape{false, x->p * y->p};
        // monomial * D^-1 = (D * monomial^-1)^-1, and D^-1 * monomial likewise
        if (!x->inverse && x->p.is_term() && y->inverse) return QShape{true, y->p * x->p.term_inverse()};
        if (x->inverse && !y->inverse && y->p.is_term()) return QShape{true, y->p.term_inverse() * x->p};
        return std::nullopt;
    }
    case QNode::Sum: {
        auto x = shape_of(e->a), y = shape_of(e->b);
        if (!x || !y || x->inverse || y->inverse) return std::nullopt;
        return QShape{false, x->p + y->p};
    }
    }
    return std::nullopt;
}

inline int exact_compare(const QExpr& e1, const QExpr& e2) {
    auto a = shape_of(e1), b = shape_of(e2);
    if (!a || !b) return -1;
    if (a->inverse == b->inverse) return a->p == b->p ? 1 : 0;
    const QShape& poly = a->inverse ? *b : *a;
    const QShape& inv = a->inverse ? *a : *b;
    return (poly.p * inv.p).is_one() ? 1 : 0;
}

inline std::vector<int> slots_used(const QExpr& e, int nslots) {
    std::vector<char> used(nslots, 0);
    std::unordered_map<const QNode*, bool> seen;
    std::function<void(const QExpr&)> walk = [&](const QExpr& x) {
        if (seen[x.get()]) return;
        seen[x.get()] = true;
        if (x->kind == QNode::Poly) {
            for (auto& [k, c] : x->poly.terms())
                for (int s = 0; s < nslots; ++s)
                    if (k.e[2 * s] || k.e[2 * s + 1]) used[s] = 1;
            return;
        }
        if (x->a) walk(x->a);
        if (x->b) walk(x->b);
    };
    walk(e);
    std::vector<int> out;
    for (int s = 0; s < nslots; ++s)
        if (used[s]) out.push_back(s);
    return out;
}

inline EqualReport expr_equal(const QUniverse* U, const QExpr& e1, const QExpr& e2, const EqualOptions& opt = {}) {
    EqualReport rep;
    if (opt.exact) {
        rep.exact = exact_compare(e1, e2);
        if (rep.exact == 1) rep.verdict = Verdict::EqualExact;
        if (rep.exact == 0) {
            rep.verdict = Verdict::NotEqual;
            rep.witness = "normal forms differ";
        }
        if (rep.exact >= 0 && !opt.run_all) return rep;
    }
    if (opt.classical) {
        RatFn c1 = to_classical(e1, U->ngens()), c2 = to_classical(e2, U->ngens());
        rep.classical = c1 == c2;
        if (!rep.classical) {
            rep.verdict = Verdict::NotEqual;
            rep.witness = "classical limit differs: " + c1.str() + " vs " + c2.str();
            if (!opt.run_all) return rep;
        }
    }
    if (opt.randomized) {
        std::vector<int> slots;
        {
            auto a = slots_used(e1, U->nslots()), b = slots_used(e2, U->nslots());
            std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(slots));
            if (slots.empty()) slots.push_back(0);
        }
        double dim = std::pow((double)opt.matrix.N, (double)slots.size());
        bool use_matrix = dim <= opt.max_matrix_dim;
        rep.method = use_matrix ? "matrix" : "series";
        bool all = true;
        rep.series_precision = SeriesEvaluator::kInf;
        for (uint64_t seed : opt.seeds) {
            uint64_t s = seed;
            for (int attempt = 0;; ++attempt) {
                try {
                    auto M = clock_shift_model(opt.matrix, s);
                    rep.prime = M.p;
                    bool eq;
                    if (use_matrix) {
                        MatrixEvaluator ev(U, M, slots, s);
                        rep.dim = ev.dim();
                        eq = ev.eval(e1).a == ev.eval(e2).a;
                    } else {
                        SeriesEvaluator ev(U, M.p, s, opt.series);
                        long rel = 0;
                        eq = ev.compare(e1, e2, rel) == 1;
                        rep.series_precision = std::min(rep.series_precision, rel);
                    }
                    rep.seeds_used.push_back(s);
                    if (!eq) {
                        all = false;
                        rep.witness = rep.method + " evaluation differs at seed " + std::to_string(s);
                    }
                    break;
                } catch (const Error& err) {
                    if (err.kind() != "SingularDenominator" || attempt > 16) throw;
                    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
                }
            }
            if (!all) break;
        }
        if (use_matrix) rep.series_precision = 0;
        rep.randomized = all;
        if (all && !use_matrix && rep.series_precision < opt.series.rel_prec / 2) {
            rep.randomized = -1;
            rep.witness = "series precision collapsed to " + std::to_string(rep.series_precision);
        }
        if (!all) rep.verdict = Verdict::NotEqual;
        else if (rep.randomized == 1 && rep.verdict == Verdict::Inconclusive) rep.verdict = Verdict::EqualRandomized;
    }
    if (rep.verdict == Verdict::EqualExact && rep.classical == 0) rep.verdict = Verdict::NotEqual;
    return rep;
}

// ---------------------------------------------------------------------------
// m = 2 relations of the Kashaev operators, checked as conjugators

struct QuantumRelation {
    std::string name;
    std::vector<QFactor> lhs, rhs;
};

struct QuantumCheck {
    std::string relation;
    std::string generator;
    EqualReport report;
    bool ok() const { return report.classical == 1 && (report.randomized == 1 || report.exact == 1) && report.exact != 0; }
};

inline std::vector<QuantumRelation> quantum_m2_relations(int n) {
    if (n < 4) fail("ConfigError", "the m = 2 relation set needs four labels");
    auto A = [](int s) { return QFactor{'A', -1, s, {}}; };
    auto T = [](int r, int s) { return QFactor{'T', r, s, {}}; };
    auto P = [](Perm p) { return QFactor{'P', -1, -1, std::move(p)}; };
    int r = 0, s = 1, t = 2, u = 3;
    Perm swap_rs = perm_transposition(n, r, s);
    Perm cyc = perm_cycle(n, {r, s, t});
    Perm g2 = perm_transposition(n, s, u);
    std::vector<QuantumRelation> R;
    R.push_back({"order-three", {A(s), A(s), A(s)}, {}});
    R.push_back({"pentagon", {T(s, t), T(r, s)}, {T(r, s), T(r, t), T(s, t)}});
    R.push_back({"consistency", {A(r), T(r, s), A(s)}, {A(s), T(s, r), A(r)}});
    R.push_back({"inversion", {T(r, s), A(r), T(s, r)}, {A(r), A(s), P(swap_rs)}});
    R.push_back({"permutation-identity", {P(perm_identity(n))}, {}});
    R.push_back({"permutation-compose", {P(cyc), P(g2)}, {P(perm_compose(cyc, g2))}});
    R.push_back({"index-change-A", {P(cyc), A(s)}, {A(cyc[s]), P(cyc)}});
    R.push_back({"index-change-T", {P(cyc), T(r, s)}, {T(cyc[r], cyc[s]), P(cyc)}});
    R.push_back({"commutativity-T-T", {T(r, s), T(t, u)}, {T(t, u), T(r, s)}});
    R.push_back({"commutativity-T-A", {T(r, s), A(t)}, {A(t), T(r, s)}});
    R.push_back({"commutativity-A-A", {A(r), A(s)}, {A(s), A(r)}});
    R.push_back({"T-inverse", {T(r, s), QFactor{'t', r, s, {}}}, {}});
    return R;
}

inline std::vector<QuantumCheck> verify_quantum_m2(const EqualOptions& opt_in = {}) {
    EqualOptions opt = opt_in;
    opt.run_all = true;
    static const QUniverse U = QUniverse::plain(4);
    std::vector<QuantumCheck> out;
    for (const auto& rel : quantum_m2_relations(U.nlabels())) {
        auto L = word_automorphism(&U, rel.lhs);
        auto R = word_automorphism(&U, rel.rhs);
        for (int g = 0; g < U.ngens(); ++g)
            out.push_back({rel.name, U.gen_name(g), expr_equal(&U, L.img[g], R.img[g], opt)});
    }
    return out;
}

} // namespace rcoord
