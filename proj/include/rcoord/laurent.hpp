#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "rcoord/error.hpp"

namespace rcoord {

using VarNamer = std::function<std::string(int)>;

inline VarNamer default_var_namer() {
    return [](int i) { return "x" + std::to_string(i); };
}

// ---------------------------------------------------------------------------
// Sparse Laurent polynomial with integer coefficients.  Terms are kept in
// strictly decreasing lex order of their exponent rows.

class LaurentPoly {
public:
    LaurentPoly() = default;
    explicit LaurentPoly(int nvars) : n_(nvars) {}

    static LaurentPoly constant(int n, const mpz_class& c) {
        LaurentPoly p(n);
        if (c != 0) {
            p.e_.assign(n, 0);
            p.c_.push_back(c);
        }
        return p;
    }
    static LaurentPoly monomial(int n, const std::vector<int>& exps, const mpz_class& c = 1) {
        LaurentPoly p(n);
        if (c != 0) {
            p.e_ = exps;
            p.c_.push_back(c);
        }
        return p;
    }
    static LaurentPoly var(int n, int i, int power = 1) {
        std::vector<int> e(n, 0);
        e[i] = power;
        return monomial(n, e);
    }
    // Collects arbitrary (exponent, coefficient) pairs.
    static LaurentPoly from_terms(int n, std::vector<std::pair<std::vector<int>, mpz_class>> terms) {
        std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        LaurentPoly p(n);
        for (auto& [e, c] : terms) {
            if (!p.c_.empty() && std::equal(e.begin(), e.end(), p.e_.end() - n)) {
                p.c_.back() += c;
                if (p.c_.back() == 0) {
                    p.c_.pop_back();
                    p.e_.resize(p.e_.size() - n);
                }
                continue;
            }
            if (c == 0) continue;
            p.e_.insert(p.e_.end(), e.begin(), e.end());
            p.c_.push_back(c);
        }
        return p;
    }

    int nvars() const { return n_; }
    size_t size() const { return c_.size(); }
    bool is_zero() const { return c_.empty(); }
    const int* exp(size_t i) const { return e_.data() + i * n_; }
    std::vector<int> exp_vec(size_t i) const { return {exp(i), exp(i) + n_}; }
    const mpz_class& coef(size_t i) const { return c_[i]; }
    bool is_monomial() const { return c_.size() == 1; }
    bool is_constant() const {
        return is_zero() || (is_monomial() && std::all_of(exp(0), exp(0) + n_, [](int x) { return x == 0; }));
    }

    std::vector<int> min_exps() const {
        std::vector<int> m(n_, 0);
        for (size_t i = 0; i < size(); ++i)
            for (int k = 0; k < n_; ++k) m[k] = i == 0 ? exp(i)[k] : std::min(m[k], exp(i)[k]);
        return m;
    }
    std::vector<int> max_exps() const {
        std::vector<int> m(n_, 0);
        for (size_t i = 0; i < size(); ++i)
            for (int k = 0; k < n_; ++k) m[k] = i == 0 ? exp(i)[k] : std::max(m[k], exp(i)[k]);
        return m;
    }
    mpz_class content() const {
        mpz_class g = 0;
        for (const auto& c : c_) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
        return g;
    }
    bool all_positive() const {
        return std::all_of(c_.begin(), c_.end(), [](const mpz_class& c) { return c > 0; });
    }

    // Multiply by c * x^shift (order preserved).
    LaurentPoly scaled(const std::vector<int>& shift, const mpz_class& c) const {
        LaurentPoly r(n_);
        if (c == 0) return r;
        r.e_ = e_;
        r.c_ = c_;
        for (size_t i = 0; i < size(); ++i) {
            for (int k = 0; k < n_; ++k) r.e_[i * n_ + k] += shift[k];
            r.c_[i] *= c;
        }
        return r;
    }
    LaurentPoly divided_by_content(const mpz_class& g) const {
        LaurentPoly r = *this;
        for (auto& c : r.c_) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), g.get_mpz_t());
        return r;
    }

    friend bool operator==(const LaurentPoly& a, const LaurentPoly& b) {
        return a.n_ == b.n_ && a.e_ == b.e_ && a.c_ == b.c_;
    }

    friend LaurentPoly operator+(const LaurentPoly& a, const LaurentPoly& b) { return merge(a, b, 1); }
    friend LaurentPoly operator-(const LaurentPoly& a, const LaurentPoly& b) { return merge(a, b, -1); }
    LaurentPoly operator-() const { return scaled(std::vector<int>(n_, 0), -1); }

    friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
        if (a.is_zero() || b.is_zero()) return LaurentPoly(a.n_);
        const LaurentPoly& small = a.size() <= b.size() ? a : b;
        const LaurentPoly& big = a.size() <= b.size() ? b : a;
        std::vector<LaurentPoly> parts;
        parts.reserve(small.size());
        for (size_t i = 0; i < small.size(); ++i) parts.push_back(big.scaled(small.exp_vec(i), small.coef(i)));
        while (parts.size() > 1) {
            std::vector<LaurentPoly> next;
            for (size_t i = 0; i + 1 < parts.size(); i += 2) next.push_back(merge(parts[i], parts[i + 1], 1));
            if (parts.size() % 2) next.push_back(std::move(parts.back()));
            parts.swap(next);
        }
        return parts[0];
    }

    LaurentPoly pow(int k) const {
        LaurentPoly r = constant(n_, 1), b = *this;
        while (k > 0) {
            if (k & 1) r = r * b;
            k >>= 1;
            if (k) b = b * b;
        }
        return r;
    }

    // Exact quotient by a polynomial f whose exponent minima are all zero.
    std::optional<LaurentPoly> divide_exact(const LaurentPoly& f) const {
        if (f.is_zero()) fail("DivisionByZero", "exact division by zero polynomial");
        if (is_zero()) return LaurentPoly(n_);
        auto lo = min_exps(), hi = max_exps(), fhi = f.max_exps();
        for (int k = 0; k < n_; ++k)
            if (hi[k] - fhi[k] < lo[k]) return std::nullopt;
        LaurentPoly rem = *this;
        std::vector<std::pair<std::vector<int>, mpz_class>> quot;
        std::vector<int> d(n_);
        mpz_class q;
        while (!rem.is_zero()) {
            for (int k = 0; k < n_; ++k) {
                d[k] = rem.exp(0)[k] - f.exp(0)[k];
                if (d[k] < lo[k] || d[k] > hi[k] - fhi[k]) return std::nullopt;
            }
            if (!mpz_divisible_p(rem.coef(0).get_mpz_t(), f.coef(0).get_mpz_t())) return std::nullopt;
            mpz_divexact(q.get_mpz_t(), rem.coef(0).get_mpz_t(), f.coef(0).get_mpz_t());
            quot.push_back({d, q});
            rem = merge(rem, f.scaled(d, q), -1);
        }
        return from_terms(n_, std::move(quot));
    }

    // Ring map sending x_i to the monomial images[i] in nn variables.
    LaurentPoly substitute_monomials(const std::vector<std::vector<int>>& images, int nn) const {
        std::vector<std::pair<std::vector<int>, mpz_class>> t;
        t.reserve(size());
        for (size_t i = 0; i < size(); ++i) {
            std::vector<int> e(nn, 0);
            for (int k = 0; k < n_; ++k)
                if (exp(i)[k])
                    for (int j = 0; j < nn; ++j) e[j] += exp(i)[k] * images[k][j];
            t.push_back({std::move(e), coef(i)});
        }
        return from_terms(nn, std::move(t));
    }

    // Evaluation modulo a prime p at nonzero residues.
    uint64_t eval_mod(const std::vector<uint64_t>& pt, uint64_t p) const {
        auto mulm = [p](uint64_t a, uint64_t b) { return (uint64_t)((__uint128_t)a * b % p); };
        auto powm = [&](uint64_t a, long e) {
            if (e < 0) {
                // a^(p-2) is the inverse
                uint64_t r = 1, b = a, k = p - 2;
                while (k) {
                    if (k & 1) r = mulm(r, b);
                    b = mulm(b, b);
                    k >>= 1;
                }
                a = r;
                e = -e;
            }
            uint64_t r = 1;
            while (e) {
                if (e & 1) r = mulm(r, a);
                a = mulm(a, a);
                e >>= 1;
            }
            return r;
        };
        uint64_t acc = 0;
        for (size_t i = 0; i < size(); ++i) {
            mpz_class cm = coef(i) % (unsigned long)p;
            if (cm < 0) cm += (unsigned long)p;
            uint64_t t = cm.get_ui();
            for (int k = 0; k < n_; ++k)
                if (exp(i)[k]) t = mulm(t, powm(pt[k], exp(i)[k]));
            acc = (acc + t) % p;
        }
        return acc;
    }

    size_t hash() const {
        size_t h = std::hash<int>()(n_) ^ (size() * 0x9e3779b97f4a7c15ULL);
        for (int x : e_) h = h * 1000003u ^ std::hash<int>()(x);
        for (const auto& c : c_) h = h * 1000003u ^ std::hash<long>()(mpz_get_si(c.get_mpz_t()));
        return h;
    }

    std::string str(const VarNamer& nm = default_var_namer()) const {
        if (is_zero()) return "0";
        std::ostringstream os;
        for (size_t i = 0; i < size(); ++i) {
            mpz_class c = coef(i);
            bool unit_mono = false;
            std::ostringstream mono;
            for (int k = 0; k < n_; ++k) {
                int x = exp(i)[k];
                if (!x) continue;
                if (unit_mono) mono << "*";
                mono << nm(k);
                if (x != 1) mono << "^" << x;
                unit_mono = true;
            }
            if (i) os << (c < 0 ? " - " : " + ");
            else if (c < 0) os << "-";
            mpz_class a = abs(c);
            if (!unit_mono) os << a;
            else {
                if (a != 1) os << a << "*";
                os << mono.str();
            }
        }
        return os.str();
    }

private:
    static LaurentPoly merge(const LaurentPoly& a, const LaurentPoly& b, int sign) {
        int n = a.n_;
        LaurentPoly r(n);
        r.e_.reserve(a.e_.size() + b.e_.size());
        r.c_.reserve(a.size() + b.size());
        size_t i = 0, j = 0;
        auto push = [&](const int* e, mpz_class c) {
            r.e_.insert(r.e_.end(), e, e + n);
            r.c_.push_back(std::move(c));
        };
        while (i < a.size() || j < b.size()) {
            int cmp;
            if (i == a.size()) cmp = -1;
            else if (j == b.size()) cmp = 1;
            else {
                cmp = 0;
                const int* x = a.exp(i);
                const int* y = b.exp(j);
                for (int k = 0; k < n && !cmp; ++k) cmp = x[k] > y[k] ? 1 : x[k] < y[k] ? -1 : 0;
            }
            if (cmp > 0) push(a.exp(i), a.coef(i)), ++i;
            else if (cmp < 0) push(b.exp(j), sign > 0 ? b.coef(j) : mpz_class(-b.coef(j))), ++j;
            else {
                mpz_class c = sign > 0 ? mpz_class(a.coef(i) + b.coef(j)) : mpz_class(a.coef(i) - b.coef(j));
                if (c != 0) push(a.exp(i), std::move(c));
                ++i, ++j;
            }
        }
        return r;
    }

    int n_ = 0;
    std::vector<int> e_;
    std::vector<mpz_class> c_;
};

// Splits p = c * x^m * f with f a primitive polynomial whose exponent minima
// are zero and whose leading coefficient is positive.
struct PolySplit {
    mpz_class c;
    std::vector<int> mono;
    LaurentPoly f;
};

inline PolySplit split_poly(const LaurentPoly& p) {
    PolySplit s{0, std::vector<int>(p.nvars(), 0), LaurentPoly(p.nvars())};
    if (p.is_zero()) return s;
    s.mono = p.min_exps();
    s.c = p.content();
    if (p.coef(0) < 0) s.c = -s.c;
    std::vector<int> neg(s.mono.size());
    for (size_t k = 0; k < neg.size(); ++k) neg[k] = -s.mono[k];
    s.f = p.divided_by_content(s.c).scaled(neg, 1);
    return s;
}

// ---------------------------------------------------------------------------
// Interned polynomial factors shared by every RatFn.

class FactorTable {
public:
    static FactorTable& instance() {
        static FactorTable t;
        return t;
    }
    // f must already be normalized (see split_poly) and non-constant.
    int intern(const LaurentPoly& f) {
        std::lock_guard<std::mutex> lk(mu_);
        size_t h = f.hash();
        auto& bucket = index_[h];
        for (int id : bucket)
            if (polys_[id] == f) return id;
        polys_.push_back(f);
        bucket.push_back((int)polys_.size() - 1);
        return (int)polys_.size() - 1;
    }
    LaurentPoly get(int id) const {
        std::lock_guard<std::mutex> lk(mu_);
        return polys_[id];
    }
    size_t size() const {
        std::lock_guard<std::mutex> lk(mu_);
        return polys_.size();
    }

private:
    mutable std::mutex mu_;
    std::vector<LaurentPoly> polys_;
    std::unordered_map<size_t, std::vector<int>> index_;
};

// ---------------------------------------------------------------------------
// Rational function c * x^mono * prod f_i^{k_i}, k_i nonzero integers.

class RatFn {
public:
    RatFn() = default;
    explicit RatFn(int n) : n_(n), c_(0), mono_(n, 0) {}

    static RatFn constant(int n, const mpq_class& c) {
        RatFn r(n);
        r.c_ = c;
        return r;
    }
    static RatFn monomial(int n, const std::vector<int>& e, const mpq_class& c = 1) {
        RatFn r = constant(n, c);
        if (c != 0) r.mono_ = e;
        return r;
    }
    static RatFn var(int n, int i, int power = 1) {
        std::vector<int> e(n, 0);
        e[i] = power;
        return monomial(n, e);
    }
    static RatFn from_poly(const LaurentPoly& p, const std::vector<int>& hint = {}) {
        RatFn r(p.nvars());
        if (p.is_zero()) return r;
        auto s = split_poly(p);
        r.c_ = s.c;
        r.mono_ = s.mono;
        if (!s.f.is_constant()) r.absorb_factor(s.f, 1, hint);
        return r;
    }

    int nvars() const { return n_; }
    bool is_zero() const { return c_ == 0; }
    const mpq_class& coefficient() const { return c_; }
    const std::vector<int>& mono() const { return mono_; }
    const std::vector<std::pair<int, int>>& factors() const { return fac_; }
    bool is_monomial() const { return fac_.empty(); }

    friend RatFn operator*(const RatFn& a, const RatFn& b) {
        RatFn r(a.n_);
        if (a.is_zero() || b.is_zero()) return r;
        r.c_ = a.c_ * b.c_;
        for (int k = 0; k < a.n_; ++k) r.mono_[k] = a.mono_[k] + b.mono_[k];
        r.fac_ = merge_factors(a.fac_, b.fac_, 1);
        return r;
    }
    RatFn inv() const {
        if (is_zero()) fail("DivisionByZero", "inverse of the zero function");
        RatFn r = *this;
        r.c_ = 1 / c_;
        for (auto& x : r.mono_) x = -x;
        for (auto& f : r.fac_) f.second = -f.second;
        return r;
    }
    friend RatFn operator/(const RatFn& a, const RatFn& b) { return a * b.inv(); }
    RatFn pow(int k) const {
        if (k < 0) return inv().pow(-k);
        RatFn r = constant(n_, 1);
        if (k == 0) return r;
        if (is_zero()) return *this;
        mpz_class num, den;
        mpz_pow_ui(num.get_mpz_t(), c_.get_num_mpz_t(), k);
        mpz_pow_ui(den.get_mpz_t(), c_.get_den_mpz_t(), k);
        r.c_ = mpq_class(num, den);
        r.c_.canonicalize();
        for (int i = 0; i < n_; ++i) r.mono_[i] = mono_[i] * k;
        r.fac_ = fac_;
        for (auto& f : r.fac_) f.second *= k;
        return r;
    }

    friend RatFn operator+(const RatFn& a, const RatFn& b) { return add(a, b, 1); }
    friend RatFn operator-(const RatFn& a, const RatFn& b) { return add(a, b, -1); }

    // Numerator and denominator as expanded polynomials (denominator has a
    // positive integer leading coefficient).
    std::pair<LaurentPoly, LaurentPoly> num_den() const {
        LaurentPoly num = LaurentPoly::constant(n_, c_.get_num());
        LaurentPoly den = LaurentPoly::constant(n_, c_.get_den());
        std::vector<int> pos(n_), neg(n_);
        for (int k = 0; k < n_; ++k) {
            pos[k] = std::max(mono_[k], 0);
            neg[k] = std::max(-mono_[k], 0);
        }
        num = num.scaled(pos, 1);
        den = den.scaled(neg, 1);
        auto& T = FactorTable::instance();
        for (auto [id, k] : fac_) {
            LaurentPoly f = T.get(id).pow(std::abs(k));
            if (k > 0) num = num * f;
            else den = den * f;
        }
        return {num, den};
    }

    friend bool operator==(const RatFn& a, const RatFn& b) {
        if (a.n_ != b.n_) return false;
        if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
        if (a.c_ == b.c_ && a.mono_ == b.mono_ && a.fac_ == b.fac_) return true;
        RatFn q = a / b;
        auto [n, d] = q.num_den();
        return n == d;
    }
    friend bool operator!=(const RatFn& a, const RatFn& b) { return !(a == b); }

    // Subtraction-free: positive constant and positive-coefficient factors.
    bool positive() const {
        if (c_ <= 0) return false;
        auto& T = FactorTable::instance();
        for (auto [id, k] : fac_)
            if (!T.get(id).all_positive()) return false;
        return true;
    }

    RatFn substitute_monomials(const std::vector<std::vector<int>>& images, int nn) const {
        RatFn r(nn);
        if (is_zero()) return r;
        r.c_ = c_;
        for (int k = 0; k < n_; ++k)
            if (mono_[k])
                for (int j = 0; j < nn; ++j) r.mono_[j] += mono_[k] * images[k][j];
        auto& T = FactorTable::instance();
        for (auto [id, k] : fac_) {
            RatFn f = from_poly(T.get(id).substitute_monomials(images, nn));
            r = r * f.pow(k);
        }
        return r;
    }

    // Substitutes rational functions for the variables.
    RatFn substitute(const std::vector<RatFn>& images) const {
        int nn = images.empty() ? 0 : images[0].nvars();
        RatFn r = constant(nn, c_);
        if (is_zero()) return r;
        for (int k = 0; k < n_; ++k)
            if (mono_[k]) r = r * images[k].pow(mono_[k]);
        auto& T = FactorTable::instance();
        for (auto [id, k] : fac_) {
            LaurentPoly f = T.get(id);
            RatFn val(nn);
            for (size_t i = 0; i < f.size(); ++i) {
                RatFn t = constant(nn, mpq_class(f.coef(i)));
                for (int v = 0; v < n_; ++v)
                    if (f.exp(i)[v]) t = t * images[v].pow(f.exp(i)[v]);
                val = val + t;
            }
            r = r * val.pow(k);
        }
        return r;
    }

    // Value modulo p; nullopt when a factor vanishes in the denominator.
    std::optional<uint64_t> eval_mod(const std::vector<uint64_t>& pt, uint64_t p) const {
        auto num = LaurentPoly::monomial(n_, mono_, 1);
        uint64_t v = num.eval_mod(pt, p);
        auto mulm = [p](uint64_t a, uint64_t b) { return (uint64_t)((__uint128_t)a * b % p); };
        auto inv = [&](uint64_t a) {
            uint64_t r = 1, b = a, k = p - 2;
            while (k) {
                if (k & 1) r = mulm(r, b);
                b = mulm(b, b);
                k >>= 1;
            }
            return r;
        };
        auto resid = [&](const mpz_class& z) {
            mpz_class m = z % (unsigned long)p;
            if (m < 0) m += (unsigned long)p;
            return (uint64_t)m.get_ui();
        };
        uint64_t cd = resid(c_.get_den());
        if (!cd) return std::nullopt;
        v = mulm(v, mulm(resid(c_.get_num()), inv(cd)));
        auto& T = FactorTable::instance();
        for (auto [id, k] : fac_) {
            uint64_t f = T.get(id).eval_mod(pt, p);
            if (!f) {
                if (k < 0) return std::nullopt;
                return 0;
            }
            if (k < 0) f = inv(f);
            for (int j = 0; j < std::abs(k); ++j) v = mulm(v, f);
        }
        return v;
    }

    std::string str(const VarNamer& nm = default_var_namer()) const {
        if (is_zero()) return "0";
        auto& T = FactorTable::instance();
        std::ostringstream os;
        bool any = false;
        if (c_ != 1 || (fac_.empty() && std::all_of(mono_.begin(), mono_.end(), [](int x) { return !x; }))) {
            os << c_.get_str();
            any = true;
        }
        for (int k = 0; k < n_; ++k) {
            if (!mono_[k]) continue;
            os << (any ? "*" : "") << nm(k);
            if (mono_[k] != 1) os << "^" << mono_[k];
            any = true;
        }
        for (auto [id, k] : fac_) {
            os << (any ? "*" : "") << "(" << T.get(id).str(nm) << ")";
            if (k != 1) os << "^" << k;
            any = true;
        }
        return os.str();
    }

private:
    static std::vector<std::pair<int, int>> merge_factors(const std::vector<std::pair<int, int>>& a,
                                                          const std::vector<std::pair<int, int>>& b, int sign) {
        std::vector<std::pair<int, int>> r;
        size_t i = 0, j = 0;
        while (i < a.size() || j < b.size()) {
            if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) r.push_back(a[i++]);
            else if (i == a.size() || b[j].first < a[i].first) r.push_back({b[j].first, sign * b[j].second}), ++j;
            else {
                int k = a[i].second + sign * b[j].second;
                if (k) r.push_back({a[i].first, k});
                ++i, ++j;
            }
        }
        return r;
    }

    void multiply_factor(int id, int k) {
        std::vector<std::pair<int, int>> one{{id, k}};
        fac_ = merge_factors(fac_, one, 1);
    }

    // Multiplies by f^k, dividing out known factors first.  Candidates are
    // tried in the order given (denominator factors of the operands first).
    void absorb_factor(LaurentPoly f, int k, const std::vector<int>& candidates) {
        auto& T = FactorTable::instance();
        for (int id : candidates) {
            LaurentPoly g = T.get(id);
            if (g.nvars() != f.nvars()) continue;
            while (!f.is_constant()) {
                auto q = f.divide_exact(g);
                if (!q) break;
                multiply_factor(id, k);
                auto s = split_poly(*q);
                for (int t = 0; t < n_; ++t) mono_[t] += k * s.mono[t];
                mpz_class cc;
                mpz_pow_ui(cc.get_mpz_t(), s.c.get_mpz_t(), std::abs(k));
                c_ = k > 0 ? mpq_class(c_ * cc) : mpq_class(c_ / cc);
                f = s.f;
            }
            if (f.is_constant()) return;
        }
        multiply_factor(T.intern(f), k);
    }

    static RatFn add(const RatFn& a, const RatFn& b, int sign) {
        if (a.is_zero()) {
            if (sign > 0) return b;
            RatFn r = b;
            r.c_ = -r.c_;
            return r;
        }
        if (b.is_zero()) return a;
        int n = a.n_;
        RatFn g(n);
        g.c_ = 1;
        for (int k = 0; k < n; ++k) g.mono_[k] = std::min(a.mono_[k], b.mono_[k]);
        // common factor exponents and the remaining positive parts
        std::vector<std::pair<int, int>> ra, rb;
        std::vector<int> cand;
        {
            size_t i = 0, j = 0;
            auto take = [&](int id, int ka, int kb) {
                int m = std::min(ka, kb);
                if (m) g.fac_.push_back({id, m});
                if (ka - m) ra.push_back({id, ka - m});
                if (kb - m) rb.push_back({id, kb - m});
                if (m < 0) cand.push_back(id);
            };
            while (i < a.fac_.size() || j < b.fac_.size()) {
                if (j == b.fac_.size() || (i < a.fac_.size() && a.fac_[i].first < b.fac_[j].first))
                    take(a.fac_[i].first, a.fac_[i].second, 0), ++i;
                else if (i == a.fac_.size() || b.fac_[j].first < a.fac_[i].first)
                    take(b.fac_[j].first, 0, b.fac_[j].second), ++j;
                else take(a.fac_[i].first, a.fac_[i].second, b.fac_[j].second), ++i, ++j;
            }
        }
        auto& T = FactorTable::instance();
        auto expand = [&](const RatFn& x, const std::vector<std::pair<int, int>>& rest, const mpz_class& scale) {
            std::vector<int> sh(n);
            for (int k = 0; k < n; ++k) sh[k] = x.mono_[k] - g.mono_[k];
            LaurentPoly p = LaurentPoly::monomial(n, sh, scale);
            for (auto [id, k] : rest) p = p * T.get(id).pow(k);
            return p;
        };
        mpz_class da = a.c_.get_den(), db = b.c_.get_den();
        LaurentPoly pa = expand(a, ra, a.c_.get_num() * db);
        LaurentPoly pb = expand(b, rb, b.c_.get_num() * da);
        LaurentPoly s = sign > 0 ? pa + pb : pa - pb;
        if (s.is_zero()) return RatFn(n);
        auto sp = split_poly(s);
        g.c_ = mpq_class(sp.c, da * db);
        g.c_.canonicalize();
        for (int k = 0; k < n; ++k) g.mono_[k] += sp.mono[k];
        if (!sp.f.is_constant()) {
            // also try factors present only on one side
            for (auto [id, k] : ra) cand.push_back(id);
            for (auto [id, k] : rb) cand.push_back(id);
            g.absorb_factor(sp.f, 1, cand);
        }
        return g;
    }

    int n_ = 0;
    mpq_class c_ = 0;
    std::vector<int> mono_;
    std::vector<std::pair<int, int>> fac_;  // sorted by factor id
};

} // namespace rcoord
