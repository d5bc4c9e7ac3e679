#include <doctest.h>

#include "rcoord/quiverdt.hpp"

using namespace rcoord;

namespace {

DottedTriangulation flippable_square() {
    auto e = make_dotted(builtin_surface("square"));
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            e.dot = {a, b};
            if (try_apply(e, KashaevMove::T(0, 1))) return e;
        }
    FAIL("no dotting supports the flip");
    return e;
}

std::vector<std::string> words(const QdtWord& w) {
    std::vector<std::string> out;
    for (auto& tr : w) out.push_back(tr.str(default_namer()));
    return out;
}

} // namespace

TEST_CASE("Q_2 of one triangle is an oriented 3-cycle with one shaded triangle") {
    auto Q = build_Qm(make_dotted(builtin_surface("triangle")), 2);
    CHECK(Q.nv == 3);
    int arrows = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) arrows += Q.eps[i][j] > 0;
    CHECK(arrows == 3);
    for (int i = 0; i < 3; ++i) CHECK(Q.eps[i][(i + 1) % 3] == -Q.eps[(i + 1) % 3][i]);
    REQUIRE(Q.shaded.size() == 1);
    CHECK(Q.shaded[0].label == ShadedLabel{0, 1, 1});
    CHECK(Q.check().empty());
}

TEST_CASE("Q_3 of one triangle: vertex count by lattice point enumeration") {
    int m = 3, points = 0;
    for (int x = 0; x <= m; ++x)
        for (int y = 0; x + y <= m; ++y) {
            int z = m - x - y;
            bool corner = x == m || y == m || z == m;
            if (!corner) ++points;
        }
    auto Q = build_Qm(make_dotted(builtin_surface("triangle")), m);
    CHECK(Q.nv == points);
    std::set<ShadedLabel> labels;
    for (auto& s : Q.shaded) labels.insert(s.label);
    CHECK(labels == std::set<ShadedLabel>{{0, 1, 1}, {0, 2, 1}, {0, 2, 2}});
}

TEST_CASE("no 2-cycles on the square for m = 2, 3") {
    for (int m : {2, 3}) {
        auto Q = build_Qm(make_dotted(builtin_surface("square")), m);
        CHECK(Q.two_cycles_cancelled == 0);
        CHECK(Q.check().empty());
        for (int i = 0; i < Q.nv; ++i) {
            CHECK(Q.eps[i][i] == 0);
            for (int j = 0; j < Q.nv; ++j) CHECK(Q.eps[i][j] == -Q.eps[j][i]);
        }
    }
}

TEST_CASE("A three times is the identity on the shading") {
    for (int m : {2, 3}) {
        auto Q = build_Qm(make_dotted(builtin_surface("square")), m);
        auto R = Q;
        for (int k = 0; k < 3; ++k) R = apply_transform(R, QdtTransform::A({1, 1, 1}));
        CHECK(same_quiver(Q, R));
        CHECK(!same_quiver(Q, apply_transform(Q, QdtTransform::A({1, 1, 1}))));
    }
}

TEST_CASE("flip sequences") {
    CHECK(words(flip_sequence(0, 1, 2)) == std::vector<std::string>{"T t_11 s_11"});

    // written as an operator product, the m = 3 word reads right to left
    auto w = words(flip_sequence(0, 1, 3));
    std::reverse(w.begin(), w.end());
    CHECK(w == std::vector<std::string>{"T t_21 s_21", "T t_22 s_11", "F s_21 t_22", "T t_11 s_21", "T t_22 s_22"});

    for (int m = 2; m <= 6; ++m) {
        int T = 0, F = 0;
        for (auto& tr : flip_sequence(0, 1, m)) (tr.kind == QdtKind::T ? T : F)++;
        // layer l mutates l(m - l) vertices
        int t_expected = 0, f_expected = 0;
        for (int l = 1; l < m; ++l) t_expected += l * (m - l);
        for (int l = 1; l < m - 1; ++l) f_expected += l * (m - 1 - l);
        CHECK(T == t_expected);
        CHECK(F == f_expected);
    }
}

TEST_CASE("flip sequences rebuild the flipped quiver") {
    auto d = flippable_square();
    auto r = *try_apply(d, KashaevMove::T(0, 1));
    for (int m = 2; m <= 5; ++m) {
        auto Q = build_Qm(d, m);
        for (auto& tr : flip_sequence(0, 1, m)) {
            Q = apply_transform(Q, tr);
            CHECK(Q.check().empty());
        }
        CHECK(same_quiver(Q, build_Qm(r, m)));
    }
    auto w2 = realize_move(d, KashaevMove::T(0, 1), 2);
    CHECK(w2.size() == 1);
}

TEST_CASE("dot change sequences") {
    auto w = dotchange_sequence(0, 2);
    REQUIRE(w.size() == 2);
    CHECK(w[0].kind == QdtKind::A);
    CHECK(w[1].kind == QdtKind::P);
    for (auto& [from, to] : w[1].sigma) CHECK(from == to);

    auto rot = dot_rotation(0, 3);
    CHECK(rot.at({0, 1, 1}) == ShadedLabel{0, 2, 2});
    CHECK(rot.at({0, 2, 2}) == ShadedLabel{0, 2, 1});
    CHECK(rot.at({0, 2, 1}) == ShadedLabel{0, 1, 1});

    auto d = make_dotted(builtin_surface("square"));
    for (int m : {2, 3, 4})
        for (int t = 0; t < 2; ++t) {
            auto Q = apply_word(build_Qm(d, m), dotchange_sequence(t, m));
            CHECK(same_quiver(Q, build_Qm(apply_move(d, KashaevMove::A(t)), m)));
        }
}

TEST_CASE("relabeling") {
    CHECK(relabel_sequence(perm_identity(2), 3).empty());
    auto d = make_dotted(builtin_surface("square"));
    Perm sw = perm_transposition(2, 0, 1);
    for (int m : {2, 3}) {
        auto Q = apply_word(build_Qm(d, m), relabel_sequence(sw, m));
        CHECK(same_quiver(Q, build_Qm(apply_move(d, KashaevMove::P(sw)), m)));
    }
}

TEST_CASE("F on the m = 3 configuration after the first layer") {
    auto d = flippable_square();
    auto Q = build_Qm(d, 3);
    auto w = flip_sequence(0, 1, 3);
    size_t k = 0;
    while (w[k].kind != QdtKind::F) Q = apply_transform(Q, w[k++]);
    auto tr = w[k];
    auto R = apply_transform(Q, tr);
    // the arrows stay, the shading turns across the invisible edge
    CHECK(R.eps == Q.eps);
    CHECK(R.check().empty());
    CHECK(!same_quiver(R, Q));
    CHECK(R.defective(R.at(tr.r)));
    // afterwards the dots no longer sit on the shared edge
    CHECK(!try_transform(R, tr));
    CHECK(!try_transform(R, QdtTransform::F(tr.s, tr.r)));
}
