#include "doctest.h"

#include <random>
#include <set>

#include "gamesynth/formula.hpp"
#include "gamesynth/game.hpp"
#include "test_support.hpp"

using namespace gamesynth;

namespace {

Assignment bind(std::map<std::string, Int> unprimed, std::map<std::string, Int> primed = {}) {
    Assignment a;
    a.unprimed = std::move(unprimed);
    a.primed = std::move(primed);
    return a;
}

// Random term/formula generator for round-trip and commutation fuzzing.
// Sticks to a small var pool and shallow depth so values stay small.
struct Gen {
    std::mt19937_64 rng;
    bool primed_ok;

    explicit Gen(uint64_t seed, bool primed) : rng(seed), primed_ok(primed) {}

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

    Term term(int depth) {
        static const char* names[] = {"x", "y", "z"};
        if (depth == 0) {
            if (pick(0, 2) == 0) return Term::int_const(pick(-9, 9));
            return Term::var(names[pick(0, 2)], primed_ok && pick(0, 3) == 0);
        }
        switch (pick(0, 5)) {
        case 0: {
            std::vector<Term> args;
            for (int n = pick(1, 3); n > 0; n--) args.push_back(term(depth - 1));
            return Term::add(std::move(args));
        }
        case 1: return Term::sub(term(depth - 1), term(depth - 1));
        case 2: return Term::neg(term(depth - 1));
        case 3: return Term::mul_const(pick(-3, 3), term(depth - 1));
        case 4: return Term::mod_const(term(depth - 1), pick(1, 5));
        default: return Term::div_const(term(depth - 1), pick(1, 5));
        }
    }

    Formula formula(int depth) {
        if (depth == 0) {
            if (pick(0, 5) == 0) return Formula::bool_const(pick(0, 1) == 1);
            CmpOp op = static_cast<CmpOp>(pick(0, 4));
            return Formula::cmp(op, term(2), term(2));
        }
        switch (pick(0, 3)) {
        case 0: {
            std::vector<Formula> args;
            for (int n = pick(1, 3); n > 0; n--) args.push_back(formula(depth - 1));
            return Formula::conj(std::move(args));
        }
        case 1: {
            std::vector<Formula> args;
            for (int n = pick(1, 3); n > 0; n--) args.push_back(formula(depth - 1));
            return Formula::disj(std::move(args));
        }
        case 2: return Formula::negate(formula(depth - 1));
        default: return Formula::implies(formula(depth - 1), formula(depth - 1));
        }
    }

    Assignment assignment_for(const Formula& f) {
        Assignment a;
        for (const VarRef& v : free_vars(f)) a.set(v, pick(-9, 9));
        return a;
    }
};

} // namespace

TEST_CASE("mod and div are Euclidean") {
    Assignment a = bind({{"x", -3}});
    CHECK(eval_term(Term::mod_const(Term::var("x"), 2), a) == 1);
    CHECK(eval_term(Term::div_const(Term::var("x"), 2), a) == -2);

    a = bind({{"x", -7}});
    CHECK(eval_term(Term::mod_const(Term::var("x"), 2), a) == 1);
    CHECK(eval_term(Term::div_const(Term::var("x"), 2), a) == -4);

    a = bind({{"x", 7}});
    CHECK(eval_term(Term::mod_const(Term::var("x"), 3), a) == 1);
    CHECK(eval_term(Term::div_const(Term::var("x"), 3), a) == 2);

    // remainder is always in [0, d) and a == d*q + r
    for (Int x = -50; x <= 50; x++) {
        for (Int d : {1, 2, 3, 5, 7}) {
            Assignment b = bind({{"x", x}});
            Int r = eval_term(Term::mod_const(Term::var("x"), d), b);
            Int q = eval_term(Term::div_const(Term::var("x"), d), b);
            CHECK(r >= 0);
            CHECK(r < d);
            CHECK(x == d * q + r);
        }
    }
}

TEST_CASE("term and formula evaluation") {
    Assignment a = bind({{"x", 3}, {"y", -2}}, {{"x", 4}});
    Term t = Term::add({Term::var("x"), Term::mul_const(2, Term::var("y")), Term::int_const(1)});
    CHECK(eval_term(t, a) == 0);
    CHECK(eval_term(Term::var("x", true), a) == 4);
    CHECK(eval_term(Term::sub(Term::var("x"), Term::var("y")), a) == 5);
    CHECK(eval_term(Term::neg(Term::var("y")), a) == 2);

    Formula f = Formula::conj({Formula::cmp(CmpOp::Ge, Term::var("x"), Term::int_const(0)),
                               Formula::cmp(CmpOp::Lt, Term::var("y"), Term::int_const(0))});
    CHECK(eval(f, a));
    CHECK(!eval(Formula::negate(f), a));
    CHECK(eval(Formula::disj({f, Formula::bottom()}), a));
    CHECK(eval(Formula::top(), a));
    CHECK(!eval(Formula::bottom(), a));

    // implication truth table
    Formula tt = Formula::top(), ff = Formula::bottom();
    CHECK(eval(Formula::implies(tt, tt), a));
    CHECK(!eval(Formula::implies(tt, ff), a));
    CHECK(eval(Formula::implies(ff, tt), a));
    CHECK(eval(Formula::implies(ff, ff), a));

    CHECK_THROWS_AS(eval_term(Term::var("nope"), a), EvalError);
    CHECK_THROWS_AS(eval_term(Term::var("y", true), a), EvalError);
}

TEST_CASE("assignments track primed and unprimed copies separately") {
    Assignment a;
    a.set({"x", false}, 1);
    a.set({"x", true}, 9);
    CHECK(a.has({"x", false}));
    CHECK(a.has({"x", true}));
    CHECK(!a.has({"y", false}));
    CHECK(a.get({"x", false}) == 1);
    CHECK(a.get({"x", true}) == 9);
    CHECK_THROWS_AS(a.get({"y", false}), EvalError);
}

TEST_CASE("free variables") {
    Formula f = parse_formula("(or (= x' (+ x 1)) (<= y 0))");
    auto fv = free_vars(f);
    CHECK(fv == std::set<VarRef>{{"x", false}, {"x", true}, {"y", false}});
}

TEST_CASE("instantiate plugs in one class of variables") {
    Formula edge = parse_formula("(or (= x' (+ x 1)) (= x' (- x 1)))");
    Formula at3 = instantiate(edge, bind({{"x", 3}}), VarClass::Unprimed);
    auto fv = free_vars(at3);
    REQUIRE(fv == std::set<VarRef>{{"x", true}});
    CHECK(eval(at3, bind({}, {{"x", 4}})));
    CHECK(eval(at3, bind({}, {{"x", 2}})));
    CHECK(!eval(at3, bind({}, {{"x", 3}})));

    // instantiating with an empty assignment changes nothing
    Formula same = instantiate(edge, Assignment{}, VarClass::Both);
    CHECK(free_vars(same) == free_vars(edge));
}

TEST_CASE("instantiate commutes with evaluation") {
    for (uint64_t seed = 0; seed < 60; seed++) {
        Gen g(seed * 7 + 1, /*primed=*/true);
        Formula f = g.formula(2);
        Assignment full = g.assignment_for(f);
        Assignment half;
        half.unprimed = full.unprimed; // plug unprimed only
        Formula fi = instantiate(f, half, VarClass::Unprimed);
        Assignment rest;
        rest.primed = full.primed;
        CHECK(eval(fi, rest) == eval(f, full));
    }
}

TEST_CASE("prime_vars rewrites x to x'") {
    Formula h = parse_formula("(and (>= x 0) (<= x 2))");
    Formula hp = prime_vars(h);
    CHECK(free_vars(hp) == std::set<VarRef>{{"x", true}});
    CHECK(eval(hp, bind({}, {{"x", 1}})));
    CHECK(!eval(hp, bind({}, {{"x", 5}})));
    CHECK(render(hp).find("x_next") != std::string::npos);
}

TEST_CASE("render round-trips through the parser") {
    for (uint64_t seed = 0; seed < 100; seed++) {
        Gen g(seed, /*primed=*/seed % 2 == 0);
        Formula f = g.formula(2);
        Formula back = parse_formula(render(f));
        for (int k = 0; k < 20; k++) {
            Assignment a = g.assignment_for(f);
            CHECK(eval(back, a) == eval(f, a));
        }
    }
}

TEST_CASE("wire names") {
    CHECK(wire_name({"x", false}) == "x");
    CHECK(wire_name({"x", true}) == "x_next");
    CHECK(from_wire_name("x") == VarRef{"x", false});
    CHECK(from_wire_name("x_next") == VarRef{"x", true});
    CHECK(from_wire_name(wire_name({"pos", true})) == VarRef{"pos", true});
    // both spellings parse to the same variable
    Formula a = parse_formula("(= x' 1)");
    Formula b = parse_formula("(= x_next 1)");
    CHECK(free_vars(a) == free_vars(b));
}

TEST_CASE("parse_game accepts both vars spellings") {
    const char* typed = R"((game
      (vars (x Int))
      (player0 true)
      (init (= x 0))
      (safe (>= x 0))
      (edges (= x' (+ x 1)))))";
    GameDef g = parse_game(typed, "mini");
    CHECK(g.name == "mini");
    REQUIRE(g.variables == std::vector<std::string>{"x"});
    CHECK(g.warnings.empty());
    CHECK(eval(g.init, bind({{"x", 0}})));
    CHECK(!eval(g.init, bind({{"x", 1}})));

    const char* bare = R"((game
      (vars x y)
      (player0 (= y 0))
      (init (and (= x 0) (= y 0)))
      (safe (>= x 0))
      (edges (and (= y' (- 1 y)) (= x' x)))))";
    GameDef g2 = parse_game(bare, "mini2");
    CHECK(g2.variables == std::vector<std::string>{"x", "y"});
    CHECK(g2.warnings.empty());

    const char* mixed = R"((game
      (vars (x Int) y)
      (player0 true)
      (init (= x y))
      (safe true)
      (edges (and (= x' x) (= y' y)))))";
    CHECK(parse_game(mixed, "m").variables == std::vector<std::string>{"x", "y"});
}

TEST_CASE("parse_game on the 1-D robot") {
    GameDef g = ts::load_benchmark("box1d.game");
    CHECK(g.name == "box1d");
    CHECK(g.variables == std::vector<std::string>{"x", "y"});
    CHECK(g.warnings.empty());
    // spot-check the sections against hand evaluation
    CHECK(eval(g.player0, bind({{"x", 5}, {"y", 0}})));
    CHECK(!eval(g.player0, bind({{"x", 5}, {"y", 1}})));
    CHECK(eval(g.init, bind({{"x", 0}, {"y", 0}})));
    CHECK(eval(g.safe, bind({{"x", 3}, {"y", 1}})));
    CHECK(!eval(g.safe, bind({{"x", -1}, {"y", 0}})));
    Assignment step = bind({{"x", 0}, {"y", 0}}, {{"x", 1}, {"y", 1}});
    CHECK(eval(g.edges, step));
    step.primed["x"] = 0;
    CHECK(!eval(g.edges, step));
}

TEST_CASE("parse_game reports an unconstrained primed variable") {
    const char* text = R"((game
      (vars x y)
      (player0 true)
      (init (= x 0))
      (safe true)
      (edges (= x' x))))";
    GameDef g = parse_game(text, "w");
    REQUIRE(g.warnings.size() == 1);
    CHECK(g.warnings[0].find("y'") != std::string::npos);
}

TEST_CASE("parse_game rejects malformed input") {
    auto bad = [](const char* text) { CHECK_THROWS_AS(parse_game(text, "t"), ParseError); };
    // missing section
    bad("(game (vars x) (player0 true) (init (= x 0)) (safe true))");
    // duplicate section
    bad("(game (vars x) (player0 true) (player0 true) (init (= x 0)) (safe true) (edges (= x' x)))");
    // unknown section
    bad("(game (vars x) (player0 true) (init (= x 0)) (safe true) (goal true) (edges (= x' x)))");
    // undeclared variable
    bad("(game (vars x) (player0 true) (init (= z 0)) (safe true) (edges (= x' x)))");
    // primed variable outside the edge relation
    bad("(game (vars x) (player0 true) (init (= x' 0)) (safe true) (edges (= x' x)))");
    // non-constant multiplication
    bad("(game (vars x y) (player0 true) (init (= x 0)) (safe true) (edges (= x' (* x y))))");
    // non-constant mod
    bad("(game (vars x y) (player0 true) (init (= x 0)) (safe true) (edges (= x' (mod x y))))");
    // duplicate variable
    bad("(game (vars x x) (player0 true) (init (= x 0)) (safe true) (edges (= x' x)))");
    // name collides with the wire spelling of a primed variable
    bad("(game (vars x x_next) (player0 true) (init (= x 0)) (safe true) (edges (= x' x)))");
    // typed vars entry must be (NAME Int)
    bad("(game (vars (x Real)) (player0 true) (init (= x 0)) (safe true) (edges (= x' x)))");
    // numeric variable name
    bad("(game (vars 3) (player0 true) (init true) (safe true) (edges true))");
    // arity errors
    bad("(game (vars x) (player0 true) (init (=)) (safe true) (edges (= x' x)))");
    bad("(game (vars x) (player0 (not true false)) (init true) (safe true) (edges (= x' x)))");
}
