#include "doctest.h"
#include "isect/syntax.hpp"

using namespace isect;

static std::vector<std::string> fvs(const std::string& s) { return free_vars(parse_term(s)); }

TEST_CASE("parse basic shapes")
{
    Term t = parse_term("\\x. x");
    CHECK(t->kind == Kind::Abs);
    CHECK(t->a->kind == Kind::Var);

    t = parse_term("(\\x. x x)(\\y. a y y)");
    REQUIRE(t->kind == Kind::App);
    CHECK(print_term(t) == "(\\x. x x) (\\y. a y y)");

    t = parse_term("x[x := y]");
    REQUIRE(t->kind == Kind::ESub);
    CHECK(t->name == "x");
    CHECK(t->b->name == "y");

    t = parse_term("λx. x");
    CHECK(t->kind == Kind::Abs);
}

TEST_CASE("esub binds tighter than application")
{
    Term t = parse_term("f x[x := y]");
    REQUIRE(t->kind == Kind::App);
    CHECK(t->b->kind == Kind::ESub);
    t = parse_term("x y[y := z] w");
    REQUIRE(t->kind == Kind::App);
    CHECK(t->a->kind == Kind::App);
}

TEST_CASE("weakening and contraction syntax")
{
    Term t = parse_term("C[x < y, z] y z");
    REQUIRE(t->kind == Kind::Con);
    CHECK(t->y == "y");
    CHECK(t->z == "z");
    CHECK(free_vars(t) == std::vector<std::string>{"x"});
    t = parse_term("W[x] y");
    CHECK(free_vars(t) == std::vector<std::string>{"x", "y"});
}

TEST_CASE("parse errors carry offsets")
{
    try {
        parse_term("\\x x");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.offset == 4);
    }
    CHECK_THROWS_AS(parse_term("(x"), ParseError);
    CHECK_THROWS_AS(parse_term("x )"), ParseError);
    CHECK_THROWS_AS(parse_term(""), ParseError);
}

TEST_CASE("free variables")
{
    CHECK(free_vars(con("x", "y", "z", var("y"))) == std::vector<std::string>{"x"});
    CHECK(free_vars(con("x", "y", "z", var("w"))) == std::vector<std::string>{"w"});
    CHECK(fvs("\\x. x y") == std::vector<std::string>{"y"});
    CHECK(fvs("x[x := y] z") == std::vector<std::string>{"y", "z"});
}

TEST_CASE("fragments")
{
    CHECK(check_fragment(parse_term("\\x. x"), Fragment::LambdaLxr));
    CHECK_FALSE(check_fragment(parse_term("\\x. x x"), Fragment::LambdaLxr));
    CHECK_FALSE(check_fragment(parse_term("x[x := y]"), Fragment::PureLambda));
    CHECK(check_fragment(parse_term("x[x := y]"), Fragment::LambdaS));
    CHECK(check_fragment(parse_term("\\x. C[x < y, z] y z"), Fragment::LambdaLxr));
    CHECK(check_fragment(parse_term("\\x. W[x] \\y. y"), Fragment::LambdaLxr));
    CHECK_FALSE(check_fragment(parse_term("\\x. \\y. y"), Fragment::LambdaLxr));
    CHECK_FALSE(check_fragment(parse_term("W[x] x"), Fragment::LambdaLxr));
}

TEST_CASE("capture-avoiding substitution")
{
    Term r = capture_subst(parse_term("x x"), "x", parse_term("\\y. y"));
    CHECK(alpha_eq(r, parse_term("(\\y. y) (\\y. y)")));

    r = capture_subst(parse_term("\\y. x"), "x", var("y"));
    REQUIRE(r->kind == Kind::Abs);
    CHECK(r->name != "y");
    CHECK(free_vars(r) == std::vector<std::string>{"y"});

    Term m = parse_term("\\y. a");
    CHECK(term_eq(capture_subst(m, "x", var("b")), m));
    CHECK_THROWS_AS(capture_subst(parse_term("x[x := y]"), "y", var("z")), FragmentError);
}

TEST_CASE("alpha equivalence")
{
    CHECK(alpha_eq(parse_term("\\x. x"), parse_term("\\y. y")));
    CHECK_FALSE(alpha_eq(parse_term("\\x. \\y. x"), parse_term("\\y. \\x. x")));
    CHECK(alpha_eq(parse_term("x[x := z]"), parse_term("y[y := z]")));
    CHECK(alpha_eq(parse_term("C[a < y, z] y z"), parse_term("C[a < p, q] p q")));
    CHECK_FALSE(alpha_eq(parse_term("C[a < y, z] y z"), parse_term("C[a < p, q] q p")));
}

TEST_CASE("barendregt renames shadowing binders")
{
    Term t = parse_term("x (\\x. x)");
    REQUIRE(t->kind == Kind::App);
    CHECK(t->b->name != "x");
    CHECK(alpha_eq(t, parse_term("x (\\z. z)")));

    t = parse_term("\\x. \\x. x");
    CHECK(t->name != t->a->name);
    CHECK(alpha_eq(t, parse_term("\\a. \\b. b")));

    // sibling binders may share a name
    t = parse_term("(\\x. x) (\\x. x)");
    CHECK(t->a->name == "x");
    CHECK(t->b->name == "x");
}

TEST_CASE("print/parse round trip")
{
    for (const char* s : {"\\x. x", "(\\x. x x) (\\y. a y y)", "x[x := y]", "f (\\x. x) y", "x y[y := \\z. z] w",
                          "(\\x. x)[y := z] w", "C[x < y, z] W[w] y z", "a (W[x] b)", "(x[x := y])[z := w]"}) {
        Term t = parse_term(s);
        CHECK(alpha_eq(parse_term(print_term(t)), t));
    }
}

TEST_CASE("positions")
{
    Term t = parse_term("(\\x. x y) z");
    CHECK(print_term(subterm(t, {0, 0})) == "x y");
    Term r = replace_at(t, {1}, var("w"));
    CHECK(print_term(r) == "(\\x. x y) w");
    CHECK(app_count(t) == 2);
    CHECK(var_occurrences(t) == 3);
    CHECK(occurrences(parse_term("x x (\\y. x)"), "x") == 3);
    CHECK(is_beta_normal(parse_term("x (\\y. y)")));
    CHECK_FALSE(is_beta_normal(t));
    std::string h;
    CHECK(is_accumulator(parse_term("x a b"), &h));
    CHECK(h == "x");
}

TEST_CASE("subst free-variable law")
{
    Term m = parse_term("\\y. x y (x z)");
    Term n = parse_term("y w");
    Term r = capture_subst(m, "x", n);
    CHECK(free_vars(r) == std::vector<std::string>{"w", "y", "z"});
}
