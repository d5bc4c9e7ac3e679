#include <doctest.h>

#include "rcoord/surface.hpp"

using namespace rcoord;

namespace {

std::string kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return "";
}

} // namespace

TEST_CASE("punctured torus: two triangles, three edges, all sides glued") {
    auto tr = punctured_torus();
    CHECK(tr.size() == 2);
    CHECK(tr.edge_count() == 3);
    CHECK(tr.unglued_count() == 0);
    CHECK(tr.vertex_count() == 1);
}

TEST_CASE("four-punctured sphere: counts agree with the Euler characteristic") {
    auto tr = four_punctured_sphere();
    // closed sphere: V - E + F = 2 with V = 4 punctures
    int V = 4, F = 4, E = 3 * F / 2;
    CHECK(V - E + F == 2);
    CHECK(tr.size() == F);
    CHECK(tr.edge_count() == E);
    CHECK(tr.vertex_count() == V);
}

TEST_CASE("an unglued side without boundary arcs is rejected") {
    MarkedSurface S{0, 3, {}};
    std::vector<std::array<RawGlue, 3>> raw(2);
    raw[0][0] = {1, 0, '-'};
    raw[1][0] = {0, 0, '-'};
    CHECK(kind_of([&] { build_triangulation(S, raw); }) == "EulerMismatch");
}

TEST_CASE("non-hyperbolic surfaces are rejected") {
    CHECK(kind_of([] { closed_surface(0, 2); }) == "EulerMismatch");
    CHECK(kind_of([] { closed_surface(1, 0); }) == "EulerMismatch");
}

TEST_CASE("dot change has order three; identity permutation is trivial") {
    for (auto nm : {"square", "punctured-torus", "sphere4"}) {
        auto d = make_dotted(builtin_surface(nm));
        auto e = d;
        for (int k = 0; k < 3; ++k) e = apply_move(e, KashaevMove::A(0));
        CHECK(e == d);
        CHECK(apply_move(d, KashaevMove::P(perm_identity(d.size()))) == d);
    }
}

TEST_CASE("canonical form separates dots and labels") {
    for (auto nm : {"square", "sphere4", "punctured-torus"}) {
        auto d = make_dotted(builtin_surface(nm));
        CHECK(d.canonical_form() == d.canonical_form());
        CHECK(d.canonical_form() != apply_move(d, KashaevMove::A(0)).canonical_form());
        auto swapped = apply_move(d, KashaevMove::P(perm_transposition(d.size(), 0, 1)));
        // the elliptic involution of the torus swaps its two triangles and fixes every arc
        if (std::string(nm) == "punctured-torus") CHECK(d.canonical_form() == swapped.canonical_form());
        else CHECK(d.canonical_form() != swapped.canonical_form());
    }
}

TEST_CASE("enhanced flips on the punctured torus and their inverses") {
    auto d = make_dotted(punctured_torus());
    int supported = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            auto e = d;
            e.dot = {a, b};
            auto r = try_apply(e, KashaevMove::T(0, 1));
            if (!r) continue;
            ++supported;
            auto back = try_apply(*r, KashaevMove::T(0, 1, -1));
            REQUIRE(back);
            CHECK(*back == e);
        }
    // the flip needs one dot on each side of the shared configuration
    CHECK(supported > 0);
    CHECK(supported < 9);
}

TEST_CASE("relation instances close on the square, the fan and the torus") {
    for (auto nm : {"square", "pentagon", "punctured-torus"}) {
        auto base = make_dotted(builtin_surface(nm));
        int n = base.size(), total = 1;
        for (int i = 0; i < n; ++i) total *= 3;
        long pentagons = 0, inversions = 0;
        for (int mask = 0; mask < total; ++mask) {
            auto d = base;
            for (int t = 0, x = mask; t < n; ++t, x /= 3) d.dot[t] = x % 3;
            for (auto& r : verify_relation_instances(d)) {
                CHECK_MESSAGE(r.ok(), nm, " ", r.rel.name, " ", r.note);
                pentagons += r.rel.name == "pentagon";
                inversions += r.rel.name == "inversion";
            }
        }
        if (std::string(nm) == "pentagon") CHECK(pentagons > 0);
        if (std::string(nm) == "square") CHECK(inversions > 0);
    }
}

TEST_CASE("exploration") {
    auto d = make_dotted(punctured_torus());
    auto g1 = explore(d, 1);
    CHECK(g1.nodes.size() == 1);
    CHECK(g1.budget_exceeded);

    auto g = explore(d, 300);
    CHECK(g.components == 1);
    CHECK(g.relation_failures == 0);
    int a = -1;
    for (size_t i = 0; i < g.nodes.size(); ++i)
        if (g.nodes[i] == apply_move(d, KashaevMove::A(0))) a = (int)i;
    CHECK(a > 0);

    auto again = explore(d, 300);
    REQUIRE(again.nodes.size() == g.nodes.size());
    for (size_t i = 0; i < g.nodes.size(); ++i) CHECK(to_text(g.nodes[i]) == to_text(again.nodes[i]));
}

TEST_CASE("text format round trip") {
    auto d = apply_move(make_dotted(four_punctured_sphere()), KashaevMove::A(2));
    CHECK(from_text(to_text(d)) == d);
    CHECK(kind_of([] { from_text("tri 0 - - -\n"); }) == "ParseError");
}
