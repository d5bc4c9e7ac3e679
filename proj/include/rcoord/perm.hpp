#pragma once

#include <algorithm>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "rcoord/error.hpp"

namespace rcoord {

// Permutation of {0..n-1}; p[i] is the image of i.
using Perm = std::vector<int>;

inline Perm perm_identity(int n) {
    Perm p(n);
    std::iota(p.begin(), p.end(), 0);
    return p;
}

inline bool perm_is_identity(const Perm& p) {
    for (int i = 0; i < (int)p.size(); ++i)
        if (p[i] != i) return false;
    return true;
}

inline bool perm_valid(const Perm& p) {
    std::vector<char> seen(p.size(), 0);
    for (int x : p) {
        if (x < 0 || x >= (int)p.size() || seen[x]) return false;
        seen[x] = 1;
    }
    return true;
}

// (a o b)(i) = a(b(i))
inline Perm perm_compose(const Perm& a, const Perm& b) {
    Perm r(b.size());
    for (size_t i = 0; i < b.size(); ++i) r[i] = a[b[i]];
    return r;
}

inline Perm perm_inverse(const Perm& p) {
    Perm r(p.size());
    for (size_t i = 0; i < p.size(); ++i) r[p[i]] = (int)i;
    return r;
}

inline Perm perm_transposition(int n, int i, int j) {
    Perm p = perm_identity(n);
    std::swap(p[i], p[j]);
    return p;
}

// Builds the permutation from one cycle (c0 c1 ... ck): c0 -> c1 -> ... -> c0.
inline Perm perm_cycle(int n, const std::vector<int>& cyc) {
    Perm p = perm_identity(n);
    for (size_t i = 0; i < cyc.size(); ++i) p[cyc[i]] = cyc[(i + 1) % cyc.size()];
    return p;
}

inline std::vector<Perm> perm_all(int n) {
    std::vector<Perm> out;
    Perm p = perm_identity(n);
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

template <class NameFn>
std::string perm_cycles(const Perm& p, NameFn name) {
    std::vector<char> seen(p.size(), 0);
    std::ostringstream os;
    for (int i = 0; i < (int)p.size(); ++i) {
        if (seen[i] || p[i] == i) continue;
        os << "(";
        int j = i;
        bool first = true;
        while (!seen[j]) {
            seen[j] = 1;
            if (!first) os << " ";
            os << name(j);
            first = false;
            j = p[j];
        }
        os << ")";
    }
    std::string s = os.str();
    return s.empty() ? "id" : s;
}

} // namespace rcoord
