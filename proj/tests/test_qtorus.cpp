#include <doctest.h>

#include "rcoord/classical.hpp"
#include "rcoord/qtorus.hpp"

#include <random>

using namespace rcoord;
using namespace rcoord::qgen;

namespace {

const QUniverse U2 = QUniverse::plain(2);
const QUniverse U4 = QUniverse::plain(4);

ModMat scale(ModMat m, uint64_t c, uint64_t p) {
    for (auto& x : m.a) x = x * c % p;
    return m;
}

bool mat_eq(const ModMat& a, const ModMat& b) { return a.n == b.n && a.a == b.a; }

} // namespace

TEST_CASE("normal ordering is associative") {
    std::mt19937_64 rng(7);
    auto rnd = [&](int lo, int hi) { return lo + (int)(rng() % (hi - lo + 1)); };
    for (int k = 0; k < 200; ++k) {
        QTorusPoly m[3];
        for (auto& x : m) {
            std::vector<int> e(U4.ngens());
            for (auto& v : e) v = rnd(-3, 3);
            x = QTorusPoly::weyl(&U4, e, rnd(-4, 4), 0, rnd(1, 5));
        }
        CHECK((m[0] * m[1]) * m[2] == m[0] * (m[1] * m[2]));
    }
}

TEST_CASE("commutation relation") {
    auto YZ = qprod(Y(&U2, 0), Z(&U2, 0));
    auto ZY = qprod(qprod(q(&U2, 0, 4), Z(&U2, 0)), Y(&U2, 0));
    auto r = expr_equal(&U2, YZ, ZY);
    CHECK(r.verdict == Verdict::EqualExact);
    // different labels commute
    CHECK(expr_equal(&U2, qprod(Y(&U2, 0), Z(&U2, 1)), qprod(Z(&U2, 1), Y(&U2, 0))).verdict == Verdict::EqualExact);

    EqualOptions all;
    all.run_all = true;
    auto ne = expr_equal(&U2, Y(&U2, 0), Z(&U2, 0), all);
    CHECK(ne.verdict == Verdict::NotEqual);
    CHECK(ne.classical == 0);
    CHECK(!ne.witness.empty());
}

TEST_CASE("a wrong q-power is caught by the randomized strategy only") {
    auto lhs = qinv(qsum(Z(&U2, 1), qprod(Y(&U2, 0, -1), Y(&U2, 1))));
    auto bad = qinv(qsum(Z(&U2, 1), qprod(q(&U2, 0, 2), qprod(Y(&U2, 0, -1), Y(&U2, 1)))));
    EqualOptions opt;
    opt.exact = false;
    opt.run_all = true;
    auto r = expr_equal(&U2, lhs, bad, opt);
    CHECK(r.classical == 1);
    CHECK(r.randomized == 0);
    CHECK(r.verdict == Verdict::NotEqual);
    auto good = expr_equal(&U2, lhs, lhs, opt);
    CHECK(good.verdict == Verdict::EqualRandomized);
    CHECK(good.seeds_used.size() == 3);
}

TEST_CASE("automorphism tables") {
    auto A = aut_A(&U2, 1);
    CHECK(exact_compare(A.img[2], Z(&U2, 1, -1)) == 1);
    CHECK(exact_compare(A.img[3], qprod(qprod(q(&U2, 1, 2), Y(&U2, 1)), Z(&U2, 1, -1))) == 1);
    auto F = aut_F(&U2, 0, 1);
    CHECK(exact_compare(F.img[3], Z(&U2, 1)) == 1);
    CHECK(exact_compare(F.img[0], Y(&U2, 0)) == 1);
    auto P = aut_P(&U2, perm_identity(2));
    for (int g = 0; g < U2.ngens(); ++g) CHECK(exact_compare(P.img[g], qpoly(QTorusPoly::gen(&U2, g))) == 1);
}

TEST_CASE("composition") {
    auto A = aut_A(&U2, 0);
    auto A3 = compose(A, compose(A, A));
    for (int g = 0; g < U2.ngens(); ++g) {
        auto r = expr_equal(&U2, A3.img[g], qpoly(QTorusPoly::gen(&U2, g)));
        CHECK(r.verdict == Verdict::EqualExact);
    }
    auto T = aut_T(&U2, 0, 1);
    auto id = QAutomorphism::identity(&U2);
    auto Ti = compose(T, id), iT = compose(id, T);
    for (int g = 0; g < U2.ngens(); ++g) {
        CHECK(exact_compare(Ti.img[g], T.img[g]) == 1);
        CHECK(exact_compare(iT.img[g], T.img[g]) == 1);
    }
    auto TT = compose(T, aut_T_inverse(&U2, 0, 1));
    for (int g = 0; g < U2.ngens(); ++g) {
        auto r = expr_equal(&U2, TT.img[g], qpoly(QTorusPoly::gen(&U2, g)));
        CHECK(r.verdict != Verdict::NotEqual);
        CHECK(r.classical == 1);
    }
}

TEST_CASE("classical specialization of the tables is the classical coordinate change") {
    auto Q = build_Qm(make_dotted(builtin_surface("square")), 2);
    LabelIndex idx(Q);
    ShadedLabel r = idx.labels[0], s = idx.labels[1];
    struct Case {
        QAutomorphism a;
        QdtTransform tr;
    };
    std::vector<Case> cases{{aut_A(&U2, 1), QdtTransform::A(s)},
                            {aut_T(&U2, 0, 1), QdtTransform::T(r, s)},
                            {aut_F(&U2, 0, 1), QdtTransform::F(r, s)},
                            {aut_P(&U2, perm_transposition(2, 0, 1)), QdtTransform::P({{r, s}, {s, r}})}};
    for (auto& c : cases) {
        auto cl = classical_change(c.tr, idx);
        for (int g = 0; g < U2.ngens(); ++g) CHECK_MESSAGE(to_classical(c.a.img[g], U2.ngens()) == cl[g], c.a.tag, " ", g);
    }
}

TEST_CASE("clock and shift matrices") {
    static const QUniverse U1 = QUniverse::plain(1);
    auto M = clock_shift_model({3, 0}, 1);
    CHECK(M.p % 3 == 1);
    MatrixEvaluator ev(&U1, M, {0}, 1);
    auto y = ev.eval(Y(&U1, 0)), z = ev.eval(Z(&U1, 0));
    // Y Z = q^2 Z Y with q^2 = omega
    CHECK(mat_eq(mat_mul(y, z, M.p), scale(mat_mul(z, y, M.p), M.omega, M.p)));
    CHECK(!mat_eq(mat_mul(y, z, M.p), mat_mul(z, y, M.p)));

    auto M7 = clock_shift_model({7, 0}, 2);
    MatrixEvaluator e2(&U2, M7, {0, 1}, 2);
    CHECK(mat_eq(mat_mul(e2.eval(Y(&U2, 0)), e2.eval(Z(&U2, 1)), M7.p),
                 mat_mul(e2.eval(Z(&U2, 1)), e2.eval(Y(&U2, 0)), M7.p)));

    // q-power of a normal-ordered word against the matrix product
    std::mt19937_64 rng(11);
    for (int k = 0; k < 20; ++k) {
        QTorusPoly w = QTorusPoly::constant(&U2, 1);
        ModMat prod;
        for (int j = 0; j < 6; ++j) {
            int g = (int)(rng() % 4), pw = rng() % 2 ? 1 : -1;
            auto x = QTorusPoly::gen(&U2, g, pw);
            w = w * x;
            auto mx = e2.eval(qpoly(x));
            prod = j ? mat_mul(prod, mx, M7.p) : mx;
        }
        CHECK(mat_eq(e2.eval(qpoly(w)), prod));
    }
    CHECK_THROWS_AS(clock_shift_model({7, 13}, 1), Error);
}

TEST_CASE("quantum m = 2 relations") {
    auto res = verify_quantum_m2();
    std::set<std::string> names;
    for (auto& c : res) {
        names.insert(c.relation);
        CHECK_MESSAGE(c.ok(), c.relation, " ", c.generator);
        CHECK(c.report.classical == 1);
        CHECK(c.report.randomized == 1);
        CHECK(c.report.seeds_used.size() == 3);
        // randomized and classical never disagree
        CHECK(!(c.report.classical == 0 && c.report.randomized == 1));
    }
    for (auto n : {"order-three", "pentagon", "consistency", "inversion"}) CHECK(names.count(n));
}

TEST_CASE("series strategy agrees on the m = 2 relations") {
    EqualOptions opt;
    opt.max_matrix_dim = 1;
    auto res = verify_quantum_m2(opt);
    for (auto& c : res) {
        CHECK(c.report.method == "series");
        CHECK_MESSAGE(c.report.randomized == 1, c.relation, " ", c.generator);
    }
}

TEST_CASE("negative controls on whole relations") {
    // pentagon with the right-hand side in the wrong order
    std::vector<QFactor> lhs{{'T', 2, 1, {}}, {'T', 0, 1, {}}};
    std::vector<QFactor> rhs{{'T', 1, 2, {}}, {'T', 0, 2, {}}, {'T', 0, 1, {}}};
    auto L = word_automorphism(&U4, lhs), R = word_automorphism(&U4, rhs);
    int differ = 0;
    for (int g = 0; g < U4.ngens(); ++g) differ += expr_equal(&U4, L.img[g], R.img[g]).verdict == Verdict::NotEqual;
    CHECK(differ > 0);
}
