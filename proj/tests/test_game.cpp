#include "doctest.h"

#include "gamesynth/game.hpp"
#include "gamesynth/solver.hpp"
#include "test_support.hpp"

using namespace gamesynth;

TEST_CASE("vertex and edge assignments bind by declaration order") {
    GameDef g = ts::load_benchmark("box1d.game");
    Assignment a = vertex_assignment(g, {3, 1});
    CHECK(a.get({"x", false}) == 3);
    CHECK(a.get({"y", false}) == 1);
    CHECK(a.primed.empty());

    Assignment e = edge_assignment(g, {3, 1}, {2, 0});
    CHECK(e.get({"x", false}) == 3);
    CHECK(e.get({"x", true}) == 2);
    CHECK(e.get({"y", true}) == 0);

    CHECK(vertex_to_string({0, 0}) == "(0,0)");
    CHECK(vertex_to_string({-3}) == "(-3)");

    CHECK(is_player0(g, {5, 0}));
    CHECK(!is_player0(g, {5, 1}));
    CHECK(vertex_in(g.safe, g, {0, 1}));
    CHECK(!vertex_in(g.safe, g, {-1, 0}));
}

TEST_CASE("successor enumeration is exact and sorted") {
    GameDef g = ts::load_benchmark("box1d.game");
    Session s;
    s.declare_vars(g.variables);

    auto s00 = successors(g, {0, 0}, s, 64);
    CHECK(s00 == std::vector<Vertex>{{-1, 1}, {1, 1}});
    auto s21 = successors(g, {2, 1}, s, 64);
    CHECK(s21 == std::vector<Vertex>{{1, 0}, {3, 0}});

    // repeated calls agree
    CHECK(successors(g, {0, 0}, s, 64) == s00);

    // every move the edge relation admits near the vertex is present, and
    // everything returned satisfies the edge relation
    for (Int wx = -3; wx <= 3; wx++) {
        for (Int wy = -3; wy <= 3; wy++) {
            Vertex w{wx, wy};
            bool admitted = eval(g.edges, edge_assignment(g, {0, 0}, w));
            bool listed = std::find(s00.begin(), s00.end(), w) != s00.end();
            CHECK(admitted == listed);
        }
    }
}

TEST_CASE("self-loops enumerate as single successors") {
    GameDef g = parse_game(
        "(game (vars x) (player0 true) (init (= x 7)) (safe true) (edges (= x' x)))", "loop");
    Session s;
    s.declare_vars(g.variables);
    CHECK(successors(g, {7}, s, 8) == std::vector<Vertex>{{7}});
}

TEST_CASE("unbounded branching hits the cap") {
    GameDef g = parse_game(
        "(game (vars x) (player0 true) (init (= x 0)) (safe true) (edges (>= x' x)))", "wide");
    Session s;
    s.declare_vars(g.variables);
    try {
        successors(g, {0}, s, 8);
        FAIL("expected SolverError");
    } catch (const SolverError& e) {
        CHECK(std::string(e.what()).find("exceeded cap") != std::string::npos);
    }
}

TEST_CASE("validate accepts a well-formed game") {
    GameDef g = ts::load_benchmark("box1d.game");
    Session s;
    s.declare_vars(g.variables);
    Validation v = validate(g, s);
    CHECK(v.ok());
    CHECK(v.init_nonempty == Validation::Status::Ok);
    CHECK(v.totality == Validation::Status::Ok);
    REQUIRE(v.init_witness.has_value());
    CHECK(*v.init_witness == Vertex{0, 0}); // init is a singleton
    CHECK(v.unconstrained_primed.empty());
}

TEST_CASE("validate flags an empty init") {
    GameDef g = parse_game(
        "(game (vars x) (player0 true) (init (and (= x 0) (= x 1))) (safe true) (edges (= x' x)))",
        "noinit");
    Session s;
    s.declare_vars(g.variables);
    Validation v = validate(g, s);
    CHECK(!v.ok());
    CHECK(v.init_nonempty == Validation::Status::Violated);
    CHECK(!v.init_witness.has_value());
}

TEST_CASE("validate finds stuck vertices") {
    GameDef g = parse_game(
        "(game (vars x) (player0 true) (init (= x 0)) (safe true)"
        " (edges (and (= x' x) (>= x 0))))",
        "stuck");
    Session s;
    s.declare_vars(g.variables);
    Validation v = validate(g, s);
    CHECK(!v.ok());
    CHECK(v.totality == Validation::Status::Violated);
    REQUIRE(v.stuck_vertex.has_value());
    CHECK((*v.stuck_vertex)[0] < 0);
}

TEST_CASE("validate reports unconstrained primed variables") {
    GameDef g = parse_game(
        "(game (vars x y) (player0 true) (init (= x 0)) (safe true) (edges (= x' x)))", "loose");
    Session s;
    s.declare_vars(g.variables);
    Validation v = validate(g, s);
    CHECK(v.unconstrained_primed == std::vector<std::string>{"y"});
}
