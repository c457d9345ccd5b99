#include "doctest.h"
#include "isect/derivations.hpp"

using namespace isect;

static Type T(const char* s) { return parse_type(s); }

// \f. \x. f x x : ('t -> 't -> 'u) -> ('t & 't -> 'u)
static Deriv fxx()
{
    Deriv f = d_var("f", T("'t -> 't -> 'u"));
    Deriv app1 = d_app(f, d_var("x", T("'t")));
    Deriv app2 = d_app(app1, d_var("x", T("'t")));
    Deriv lx = d_abs("x", app2, T("'t & 't"));
    return d_abs("f", lx, T("'t -> 't -> 'u"));
}

TEST_CASE("var and abs with a forgotten argument")
{
    Deriv v = d_var("x", T("'f"));
    auto j = check_derivation(v);
    CHECK(j.measures.app_count == 0);
    CHECK(print_ctx(j.ctx) == "x: 'f");

    Deriv l = d_abs("y", v, T("'a"));
    j = check_derivation(l);
    CHECK(print_type(j.type) == "'a -> 'f");
    CHECK(is_omega(l->u));
    auto fg = forgotten_types(l);
    REQUIRE(fg.size() == 1);
    CHECK(print_type(fg[0]) == "'a");
}

TEST_CASE("duplicating abstraction")
{
    Deriv d = fxx();
    auto j = check_derivation(d);
    CHECK(j.ctx.empty());
    CHECK(print_type(j.type) == "('t -> 't -> 'u) -> 't & 't -> 'u");
    CHECK(j.measures.app_count == 2);
    CHECK(j.measures.inter_count == 0);
    CHECK(j.measures.var_count == 3);
    CHECK(forgotten_types(d).empty());
}

TEST_CASE("side conditions")
{
    Deriv v = d_var("x", T("'a"));
    CHECK_THROWS_AS(d_abs("x", v, T("'b")), DerivError);
    CHECK_THROWS_AS(d_app(v, v), DerivError);
    Deriv f = d_var("f", T("'a -> 'b"));
    CHECK_THROWS_AS(d_app(f, d_var("y", T("'c"))), DerivError);
    CHECK_THROWS_AS(d_inter(v, d_var("y", T("'a"))), DerivError);
    CHECK_THROWS_AS(d_subst("x", v, d_var("y", T("'c"))), DerivError);
}

TEST_CASE("subsumption and optimality")
{
    // x : 'a ⊢ x : 'a, abstracted at 'a & 'b
    Deriv v = d_var("x", T("'a"));
    Deriv sub = d_abs("x", v, T("'a & 'b"));
    CHECK(has_subsumption(sub));
    CHECK_FALSE(is_optimal(sub));
    CHECK_THROWS_AS(forgotten_types(sub), DerivError);

    Deriv id = d_abs("x", v, T("'a"));
    CHECK(is_optimal(id));
    CHECK(tree_degree(id) == 0);

    CHECK_FALSE(is_optimal(d_inter(id, id)));
    CHECK_FALSE(is_optimal(d_omega(id->term)));
}

TEST_CASE("degrees of small optimal trees")
{
    // x : ('a -> 'a) -> 'b ⊢ x (\y. y) : 'b
    Deriv idy = d_abs("y", d_var("y", T("'a")), T("'a"));
    Deriv d = d_app(d_var("x", T("('a -> 'a) -> 'b")), idy);
    CHECK(is_optimal(d));
    CHECK(tree_degree(d) == 1);
    CHECK(d->n == 1);

    // (\x. y) z with z forgotten at 't
    Deriv lam = d_abs("x", d_var("y", T("'s")), T("'t"));
    Deriv e = d_app(lam, d_var("z", T("'t")));
    CHECK(is_optimal(e));
    CHECK(tree_degree(e) == 0);
    auto fg = forgotten_types(e);
    REQUIRE(fg.size() == 1);
    CHECK(print_type(fg[0]) == "'t");
}

TEST_CASE("split, lift_equiv and lift_subtype")
{
    Deriv a = d_var("x", T("'a")), b = d_var("x", T("'b")), c = d_var("x", T("'c"));
    Deriv abc = d_inter(a, d_inter(b, c));
    auto [l, r] = split_inter(abc);
    CHECK(print_type(l->type) == "'a");
    CHECK(print_type(r->type) == "'b & 'c");
    CHECK(l->n + r->n == abc->n);
    CHECK(l->inters + r->inters + 1 == abc->inters);
    CHECK_THROWS_AS(split_inter(a), DerivError);

    Deriv re = lift_equiv(abc, T("'c & 'a & 'b"));
    CHECK(print_type(re->type) == "'c & 'a & 'b");
    CHECK(ctx_equiv(re->ctx, abc->ctx));
    CHECK(measures(re).app_count == measures(abc).app_count);
    CHECK(re->inters == abc->inters);
    CHECK_THROWS_AS(lift_equiv(abc, T("'a & 'b")), DerivError);

    Deriv ab = lift_subtype(abc, T("'b & 'a"));
    CHECK(print_type(ab->type) == "'b & 'a");
    CHECK(ctx_subtype(abc->ctx, ab->ctx));
    Deriv w = lift_subtype(abc, omega());
    CHECK(w->rule == Rule::Omega);
    CHECK(w->n == 0);
}

TEST_CASE("json round trip and corrupted input")
{
    Deriv d = fxx();
    auto j = deriv_to_json(d);
    Deriv back = deriv_from_json(j);
    CHECK(deriv_to_json(back) == j);

    auto bad = j;
    bad["premises"][0]["conclusion"]["type"] = "'z";
    CHECK_THROWS_AS(deriv_from_json(bad), DerivError);
    try {
        deriv_from_json(bad);
    } catch (const DerivError& e) {
        CHECK(e.path == Pos{0});
    }
}

TEST_CASE("rebind along an alpha variant")
{
    Deriv d = fxx();
    Term t = parse_term("\\g. \\z. g z z");
    Deriv r = rebind(d, t);
    CHECK(term_eq(r->term, t));
    CHECK(type_eq(r->type, d->type));
    CHECK(r->n == d->n);
}

TEST_CASE("explicit substitution typing and transport")
{
    // x[x := a][y := b] with y forgotten
    Deriv body = d_var("x", T("'p"));
    Deriv s1 = d_subst("x", body, d_var("a", T("'p")));
    Deriv s2 = d_subst("y", s1, d_var("b", T("'q")));
    auto j = check_derivation(s2);
    CHECK(print_ctx(j.ctx) == "a: 'p, b: 'q");
    auto fg = forgotten_types(s2);
    REQUIRE(fg.size() == 1);
    CHECK(print_type(fg[0]) == "'q");

    Term swapped = parse_term_raw("x[y := b][x := a]");
    Deriv t = transport(s2, swapped);
    CHECK(term_eq(t->term, swapped));
    CHECK(ctx_equiv(t->ctx, s2->ctx));
    CHECK(t->n == s2->n);
}

TEST_CASE("weakening and contraction")
{
    // C[x < y, z] (y z) with y : 'a -> 'b, z : 'a
    Deriv yz = d_app(d_var("y", T("'a -> 'b")), d_var("z", T("'a")));
    Deriv c = d_con("x", "y", "z", yz);
    CHECK(print_type(ctx_get(c->ctx, "x")) == "('a -> 'b) & 'a");
    Deriv w = d_weak("v", T("'c"), c);
    auto j = check_derivation(w);
    CHECK(print_ctx(j.ctx) == "v: 'c, x: ('a -> 'b) & 'a");
    Deriv back = deriv_from_json(deriv_to_json(w));
    CHECK(ctx_equiv(back->ctx, w->ctx));

    Deriv t = transport(d_weak("u", T("'d"), w), parse_term_raw("W[v] W[u] C[x < z, y] y z"));
    CHECK(ctx_equiv(t->ctx, ctx_set(w->ctx, "u", T("'d"))));
}
