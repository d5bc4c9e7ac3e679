#include <doctest.h>

#include "rcoord/dilog.hpp"

#include <random>

using namespace rcoord;
using namespace rcoord::qgen;

namespace {

const QUniverse R2 = QUniverse::labels({"r", "s"});
const QUniverse R3 = QUniverse::labels({"r", "s", "t"});

LinForm random_form(std::mt19937_64& rng, int n) {
    LinForm L(n);
    for (auto& x : L.c) x = (int)(rng() % 7) - 3;
    return L;
}

std::vector<OperatorWord> linear_words(int n) {
    return {op_A(n, 0, "r"), op_A(n, 1, "s"), op_F(n, 0, 1, "r", "s"), op_F(n, 1, 2, "s", "t"),
            op_P(perm_cycle(n, {0, 1, 2}), "(r s t)")};
}

} // namespace

TEST_CASE("linear action of A_s") {
    auto A = op_A(2, 0, "r");
    CHECK(conj_linear(A, LinForm::P(2, 0)) == LinForm::Q(2, 0) - LinForm::P(2, 0));
    CHECK(conj_linear(A, LinForm::Q(2, 0)) == -1 * LinForm::P(2, 0));
    CHECK(conj_linear(A, LinForm::Q(2, 1)) == LinForm::Q(2, 1));
    // order three up to the central constant
    auto A3 = concat("A^3", {A, A, A});
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
        auto L = random_form(rng, 2);
        CHECK(conj_linear(A3, L) == L);
    }
    CHECK(A3.constant().r0 == -1);
}

TEST_CASE("mixed quadratic exponential") {
    int n = 3;
    // e^{2 pi i P_r Q_s} commutes with P_t and with P_r, moves Q_r and P_s
    auto E = make_expquad(2, LinForm::P(n, 0), LinForm::Q(n, 1));
    CHECK(conj_expquad(E, LinForm::P(n, 2)) == LinForm::P(n, 2));
    CHECK(conj_expquad(E, LinForm::P(n, 0)) == LinForm::P(n, 0));
    CHECK(conj_expquad(E, LinForm::Q(n, 1)) == LinForm::Q(n, 1));
    CHECK(!(conj_expquad(E, LinForm::Q(n, 0)) == LinForm::Q(n, 0)));
    // the inverse factor undoes it
    auto Ei = std::get<ExpQuad>(invert_factor(E));
    std::mt19937_64 rng(5);
    for (int k = 0; k < 50; ++k) {
        auto L = random_form(rng, n);
        CHECK(conj_expquad(Ei, conj_expquad(E, L)) == L);
    }
    CHECK_THROWS_WITH_AS(make_expquad(1, LinForm::P(n, 0), LinForm::Q(n, 0)), doctest::Contains("NonNilpotentQuadratic"),
                         Error);
}

TEST_CASE("linear factors preserve the pairing") {
    std::mt19937_64 rng(11);
    for (auto& w : linear_words(3))
        for (int k = 0; k < 40; ++k) {
            auto L = random_form(rng, 3), M = random_form(rng, 3);
            CHECK(pairing(conj_linear(w, L), conj_linear(w, M)) == pairing(L, M));
        }
}

TEST_CASE("permutation relabels symbols") {
    Perm sigma = perm_cycle(3, {0, 1, 2});
    auto P = op_P(sigma, "(r s t)");
    Perm inv = perm_inverse(sigma);
    for (int l = 0; l < 3; ++l) {
        CHECK(conj_linear(P, LinForm::Q(3, l)) == LinForm::Q(3, inv[l]));
        CHECK(conj_linear(P, LinForm::P(3, l)) == LinForm::P(3, inv[l]));
    }
}

TEST_CASE("T_rs on exponentials of the symbols") {
    auto T = op_T(2, 0, 1, "r", "s");
    const QUniverse* U = &R2;
    auto Qr = conj_word_on_exponential(U, T, LinForm::Q(2, 0), 0);
    auto Pr = conj_word_on_exponential(U, T, LinForm::P(2, 0), 0);
    auto Qs = conj_word_on_exponential(U, T, LinForm::Q(2, 1), 0);
    auto Ps = conj_word_on_exponential(U, T, LinForm::P(2, 1), 0);
    CHECK(expr_equal(U, Qr, qinv(qsum(Z(U, 1), qprod(Y(U, 0, -1), Y(U, 1))))).verdict != Verdict::NotEqual);
    CHECK(expr_equal(U, Qs, qsum(qprod(Y(U, 0), Z(U, 1)), Y(U, 1))).verdict != Verdict::NotEqual);
    CHECK(expr_equal(U, Ps, qprod(Z(U, 0), Z(U, 1))).verdict == Verdict::EqualExact);
    // T preserves the commutation relations
    auto ZYq = [&](const QExpr& z, const QExpr& y) { return qprod(qprod(q(U, 0, 4), z), y); };
    CHECK(expr_equal(U, qprod(Qr, Pr), ZYq(Pr, Qr)).verdict != Verdict::NotEqual);
    CHECK(expr_equal(U, qprod(Qs, Ps), ZYq(Ps, Qs)).verdict != Verdict::NotEqual);
    CHECK(expr_equal(U, qprod(Qr, Qs), qprod(Qs, Qr)).verdict != Verdict::NotEqual);
}

TEST_CASE("operator words against the torus tables") {
    auto ids = verify_conjugation_tables();
    CHECK(ids.size() == 24);
    for (auto& c : ids) {
        INFO(c.name << " sector " << c.sector << ": " << c.image);
        CHECK(c.exact);
    }
}

TEST_CASE("Psi crossing with a fractional shift is refused") {
    const QUniverse* U = &R2;
    PsiFactor f{mpq_class(1, 2) * LinForm::Q(2, 0), 1};
    auto key = QTorusPoly::gen(U, 1).terms().begin()->first;
    CHECK_THROWS_AS(factor_on_term(U, f, key, 1), Error);
}

TEST_CASE("m=2 relations as conjugators") {
    const QUniverse* U = &R2;
    auto Ar = op_A(2, 0, "r"), As = op_A(2, 1, "s");
    auto Trs = op_T(2, 0, 1, "r", "s"), Tsr = op_T(2, 1, 0, "s", "r");
    auto P = op_P(perm_transposition(2, 0, 1), "(r s)");
    OperatorWord id;
    id.name = "id";

    auto order3 = weak_equal_as_conjugators(U, concat("A^3", {Ar, Ar, Ar}), id);
    CHECK(order3.equal);
    auto inv = weak_equal_as_conjugators(U, concat("T A T", {Trs, Ar, Tsr}), concat("A A P", {Ar, As, P}));
    CHECK(inv.equal);
    CHECK(!weak_equal_as_conjugators(U, concat("T A T", {Trs, Ar, Tsr}), concat("A A", {Ar, As})).equal);

    const QUniverse* V = &R3;
    auto T = [](int r, int s) { return op_T(3, r, s, std::string(1, "rst"[r]), std::string(1, "rst"[s])); };
    auto pent = weak_equal_as_conjugators(V, concat("T T T", {T(0, 1), T(0, 2), T(1, 2)}), concat("T T", {T(1, 2), T(0, 1)}));
    CHECK(pent.equal);
    CHECK(!weak_equal_as_conjugators(V, concat("T T", {T(0, 1), T(1, 2)}), concat("T T", {T(1, 2), T(0, 1)})).equal);
}

TEST_CASE("m=3 operator assembly") {
    auto ops = build_m3_operators(2);
    REQUIRE(ops.names == std::vector<std::string>{"t1", "t2", "t3", "s1", "s2", "s3"});
    auto T = ops.T(0, 1);
    CHECK(T.blocks == std::vector<std::string>{"T t3 s1", "T t2 s2", "F s2 t3", "T t3 s3", "T t1 s2"});
    auto A = ops.A(0);
    REQUIRE(std::holds_alternative<PermFactor>(A.f.front()));
    Perm sigma = std::get<PermFactor>(A.f.front()).sigma;
    CHECK(sigma[0] == 2);
    CHECK(sigma[2] == 1);
    CHECK(sigma[1] == 0);
    CHECK(sigma[3] == 3);
    // P on triangles lifts to all three labels
    auto P = ops.P({1, 0});
    Perm full = std::get<PermFactor>(P.f.front()).sigma;
    for (int k = 0; k < 3; ++k) CHECK(full[k] == 3 + k);
}

TEST_CASE("m=3 consistency") {
    auto rep = verify_m3_consistency();
    CHECK(rep.all_ok());
    for (auto& r : rep.relations) CHECK(r.equal);
    CHECK(!rep.inversion_plain.equal);
    CHECK(rep.inversion_lattice.equal);
    CHECK(rep.inversion_residual.equal);
    CHECK(rep.k_identity_mod_lattice);
    REQUIRE(rep.k_images.size() == 12);

    // every image differs from its symbol by a multiple of the diamond row
    auto ops = build_m3_operators(2);
    IntRow D = ops.diamond(0, 1);
    for (size_t i = 0; i < rep.k_images.size(); ++i) {
        auto& s = rep.k_images[i];
        INFO(s.symbol << " -> " << s.image);
        CHECK(s.trivial_mod_lattice);
        if (s.symbol == "P_s2") CHECK(s.trivial_exact);
    }
    auto K = ops.K(0, 1);
    int n = 6;
    for (int l = 0; l < n; ++l)
        for (int pz = 0; pz < 2; ++pz) {
            LinForm M = pz ? LinForm::P(n, l) : LinForm::Q(n, l);
            LinForm d = conj_linear(K, M) - M;
            // d = k * D for a single integer k
            std::optional<mpq_class> k;
            bool ok = true;
            for (int i = 0; i < 2 * n; ++i) {
                if (D[i] == 0) {
                    ok = ok && d.c[i] == 0;
                    continue;
                }
                mpq_class r = d.c[i] / D[i];
                if (!k) k = r;
                ok = ok && *k == r;
            }
            CHECK(ok);
        }
    auto qs3 = std::find_if(rep.k_images.begin(), rep.k_images.end(), [](auto& s) { return s.symbol == "Q_s3"; });
    CHECK(qs3->image == "-P_t2 + Q_t3 - P_s1 + P_s3");
}

TEST_CASE("lattice reduction is idempotent") {
    auto ops = build_m3_operators(2);
    RelationLattice lat(12);
    lat.add(ops.diamond(0, 1));
    lat.add(ops.diamond(1, 0));
    std::mt19937_64 rng(17);
    for (int k = 0; k < 100; ++k) {
        IntRow r(12);
        for (auto& x : r) x = (long)(rng() % 9) - 4;
        auto once = lat.reduce(r);
        CHECK(lat.reduce(once) == once);
        IntRow diff(12);
        for (int i = 0; i < 12; ++i) diff[i] = r[i] - once[i];
        CHECK(lat.contains(diff));
    }
}

TEST_CASE("zeta powers") {
    auto z = zeta_power(4);
    CHECK(z.r0 == mpq_class(-2, 3));
    CHECK(z.rp == mpq_class(-1, 3));
    CHECK(z.rm == mpq_class(-1, 3));
    CHECK(zeta_power(4).r0.get_str() == "-2/3");
}
