#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "latsch/cone.hpp"
#include "latsch/domain.hpp"
#include "latsch/io.hpp"
#include "latsch/site.hpp"
#include "oracles.hpp"

using namespace latsch;

TEST_CASE("neighbors: 2d stencil, deterministic order") {
    auto nb = neighbors(Site{0, 0});
    REQUIRE(nb.size() == 4);
    CHECK(nb[0] == Site{-1, 0});
    CHECK(nb[1] == Site{1, 0});
    CHECK(nb[2] == Site{0, -1});
    CHECK(nb[3] == Site{0, 1});

    auto nb3 = neighbors(Site{3, -1, 2});
    REQUIRE(nb3.size() == 6);
    for (const Site& m : nb3) CHECK(dist2(m, Site{3, -1, 2}) == 1);

    // adjacency is symmetric
    auto first = neighbors(Site{5, 7})[0];
    auto back = neighbors(first);
    CHECK(std::count(back.begin(), back.end(), Site{5, 7}) == 1);
}

TEST_CASE("classify_domain: 3x3 box obstacle") {
    std::set<Site> obstacle;
    Box({0, 0}, {2, 2}).for_each([&](const Site& n) { obstacle.insert(n); });
    ExteriorDomain dom = classify_domain(2, obstacle, 8);

    CHECK(!dom.contains(Site{1, 1}));          // the single interior obstacle site
    CHECK(dom.contains(Site{0, 0}));           // corner of the box stays in Omega_ext
    CHECK(dom.is_boundary(Site{0, 1}));        // adjacent to the removed center
    CHECK(dom.degree(Site{0, 1}) == 3);
    CHECK(dom.degree(Site{5, 5}) == 4);        // generic site, full degree
    CHECK(dom.is_interior(Site{5, 5}));
}

TEST_CASE("classify_domain: empty obstacle, whole space") {
    ExteriorDomain dom = classify_domain(2, {}, 5);
    Box::centered(2, 5).for_each([&](const Site& n) {
        CHECK(dom.contains(n));
        CHECK(dom.degree(n) == 4);
        CHECK(dom.is_interior(n));
    });
}

TEST_CASE("classify_domain: rhombus boundary matches the enumeration oracle") {
    std::set<Site> obstacle = obstacle_rhombus(2, 3);
    ExteriorDomain dom = classify_domain(2, obstacle, 9);

    std::set<Site> expect = oracles::boundary_by_enumeration(obstacle, 2, 9);
    std::set<Site> got;
    for (const Site& n : dom.boundary_sites()) got.insert(n);
    CHECK(got == expect);

    // enumeration says: exactly the l1-sphere of radius 3
    for (const Site& n : got) CHECK(n.norm1() == 3);
    CHECK(got.size() == 12);
}

TEST_CASE("classify_domain: error paths") {
    std::set<Site> obstacle = obstacle_rectangle({2, 2});
    CHECK_THROWS_AS(classify_domain(2, obstacle, 4), WindowTooSmall);

    // hollow square traps an interior component of Omega_ext: the ring is
    // thick enough that its middle layer is obstacle interior, a closed loop
    std::set<Site> ring;
    Box::centered(2, 4).for_each([&](const Site& n) {
        if (n.norm_inf() >= 2) ring.insert(n);
    });
    CHECK_THROWS_AS(classify_domain(2, ring, 9), DisconnectedDomain);
}

TEST_CASE("cone_contained: rectangle obstacle, every exterior site has a witness") {
    std::set<Site> obstacle = obstacle_rectangle({3, 2});
    ExteriorDomain dom = classify_domain(2, obstacle, 8);
    dom.window().for_each([&](const Site& n) {
        if (!dom.contains(n)) return;
        auto w = cone_contained(dom, n);
        REQUIRE(w.has_value());
        // cross-check the witness with the exhaustive scan oracle
        CHECK(oracles::cone_inside_by_scan(obstacle, 2, 8, n, w->first, w->second));
    });
}

TEST_CASE("cone_contained: empty obstacle gives witness (1,+)") {
    ExteriorDomain dom = classify_domain(2, {}, 5);
    auto w = cone_contained(dom, Site{2, -1});
    REQUIRE(w.has_value());
    CHECK(w->first == 1);
    CHECK(w->second == +1);
}

TEST_CASE("cone_contained: staircase inner corner has no witness") {
    std::set<Site> obstacle = obstacle_figure2_staircase(3);
    int ext = 0;
    for (const Site& n : obstacle) ext = std::max(ext, n.norm_inf());
    ExteriorDomain dom = classify_domain(2, obstacle, ext + 4);

    // locate the reentrant corner: interior site adjacent to two boundary
    // sites that have no other interior neighbor
    ConeVerdict cv = satisfies_cone_condition(dom);
    REQUIRE(!cv.satisfied);
    REQUIRE(!cv.violating_sites.empty());
    for (const Site& n : cv.violating_sites) {
        CHECK(!cone_contained(dom, n).has_value());
        for (int axis = 1; axis <= 2; ++axis)
            for (int sign : {+1, -1})
                CHECK(!oracles::cone_inside_by_scan(obstacle, 2, dom.bounding_radius(), n, axis,
                                                    sign));
    }
}

TEST_CASE("satisfies_cone_condition: preset verdicts") {
    auto check_preset = [](const std::string& name, bool expect) {
        std::set<Site> obstacle = obstacle_preset(name, 2, {});
        int ext = 0;
        for (const Site& n : obstacle) ext = std::max(ext, n.norm_inf());
        ExteriorDomain dom = classify_domain(2, obstacle, ext + 4);
        ConeVerdict v = satisfies_cone_condition(dom);
        CHECK(v.satisfied == expect);
        if (expect) CHECK(v.violating_sites.empty());
        if (!expect) CHECK(!v.violating_sites.empty());
    };
    check_preset("rectangle", true);
    check_preset("rhombus", true);
    check_preset("zigzag", true);
    check_preset("figure2_staircase", false);
}

TEST_CASE("partition and degree-bound invariants over presets") {
    for (const char* name : {"rectangle", "rhombus", "zigzag", "figure2_staircase"}) {
        std::set<Site> obstacle = obstacle_preset(name, 2, {});
        int ext = 0;
        for (const Site& n : obstacle) ext = std::max(ext, n.norm_inf());
        ExteriorDomain dom = classify_domain(2, obstacle, ext + 4);
        ClassifiedSet cs = dom.windowed();
        for (int i = 0; i < cs.size(); ++i) {
            CHECK(cs.degree(i) > 0);
            CHECK(cs.degree(i) <= 4);
            CHECK((cs.is_interior(i) ? cs.degree(i) == 4 : cs.degree(i) < 4));
        }
    }
}

TEST_CASE("cone nesting: m in C => C(m) subset C(n), by sampling") {
    CounterRng rng(42, "test/cone-nesting");
    for (int t = 0; t < 200; ++t) {
        Site apex{int(rng.uniform(-5, 5)), int(rng.uniform(-5, 5))};
        int axis = 1 + int(rng.index(2)), sign = rng.uniform() < 0.5 ? 1 : -1;
        Cone c{axis, sign, apex};
        Site m = apex;
        int along = 1 + int(rng.index(6));
        m[axis - 1] += sign * along;
        m[axis % 2] += int(rng.uniform(-along, along + 1));
        if (!c.contains(m)) continue;
        Cone cm{axis, sign, m};
        for (int s = 0; s < 20; ++s) {
            Site p = m;
            int a2 = 1 + int(rng.index(5));
            p[axis - 1] += sign * a2;
            p[axis % 2] += int(rng.uniform(-a2, a2 + 1));
            if (cm.contains(p)) CHECK(c.contains(p));
        }
    }
}

TEST_CASE("monotonicity: larger obstacle only shrinks the witnessed set") {
    std::set<Site> small = obstacle_rectangle({2, 1});
    std::set<Site> big = obstacle_rectangle({3, 2});
    ExteriorDomain ds = classify_domain(2, small, 8);
    ExteriorDomain db = classify_domain(2, big, 8);
    ds.window().for_each([&](const Site& n) {
        if (!db.contains(n) || !ds.contains(n)) return;
        if (cone_contained(db, n).has_value()) CHECK(cone_contained(ds, n).has_value());
    });
}

TEST_CASE("domain JSON round trip") {
    std::set<Site> obstacle = obstacle_preset("rhombus", 2, {2});
    ExteriorDomain dom = classify_domain(2, obstacle, 7);
    json j = domain_to_json(dom);
    ExteriorDomain back = domain_from_json(j);
    CHECK(back.dim() == dom.dim());
    CHECK(back.bounding_radius() == dom.bounding_radius());
    CHECK(back.obstacle() == dom.obstacle());
}
