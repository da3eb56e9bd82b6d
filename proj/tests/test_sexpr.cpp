#include "doctest.h"

#include "gamesynth/sexpr.hpp"

using namespace gamesynth;

TEST_CASE("atoms and nesting") {
    auto v = read_sexprs("foo (bar -12 (baz x')) ()");
    REQUIRE(v.size() == 3);
    CHECK(v[0].atom);
    CHECK(v[0].text == "foo");

    const Sexpr& l = v[1];
    REQUIRE(!l.atom);
    REQUIRE(l.size() == 3);
    CHECK(l[0].text == "bar");
    CHECK(l[1].text == "-12");
    REQUIRE(!l[2].atom);
    CHECK(l[2][0].text == "baz");
    CHECK(l[2][1].text == "x'");

    CHECK(!v[2].atom);
    CHECK(v[2].size() == 0);
}

TEST_CASE("source positions are 1-based") {
    auto v = read_sexprs("(a\n  (b c))");
    REQUIRE(v.size() == 1);
    CHECK(v[0].line == 1);
    CHECK(v[0].col == 1);
    CHECK(v[0][0].line == 1);
    CHECK(v[0][0].col == 2);
    const Sexpr& inner = v[0][1];
    CHECK(inner.line == 2);
    CHECK(inner.col == 3);
    CHECK(inner[1].line == 2);
    CHECK(inner[1].col == 7);
}

TEST_CASE("comments run to end of line") {
    auto v = read_sexprs("; header\n(a ; trailing\n b) ;; tail");
    REQUIRE(v.size() == 1);
    REQUIRE(v[0].size() == 2);
    CHECK(v[0][0].text == "a");
    CHECK(v[0][1].text == "b");
}

TEST_CASE("reader errors carry positions") {
    CHECK_THROWS_AS(read_sexprs("(a (b)"), ParseError);
    CHECK_THROWS_AS(read_sexprs("a) b"), ParseError);
    try {
        read_sexprs("(a\n(b");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line >= 1);
        CHECK(std::string(e.what()).size() > 0);
    }
}

TEST_CASE("read_one_sexpr wants exactly one form") {
    Sexpr s = read_one_sexpr("(+ x 1)");
    CHECK(!s.atom);
    CHECK(s.size() == 3);
    CHECK_THROWS_AS(read_one_sexpr(""), ParseError);
    CHECK_THROWS_AS(read_one_sexpr("(a) (b)"), ParseError);
}

TEST_CASE("to_string round-trips structure") {
    const char* text = "(and (= x' (+ x 1)) (or (<= y 3) false))";
    Sexpr s = read_one_sexpr(text);
    std::string printed = sexpr_to_string(s);
    CHECK(printed == text);
    Sexpr again = read_one_sexpr(printed);
    CHECK(sexpr_to_string(again) == printed);
}
