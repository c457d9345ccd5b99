#include "doctest.h"
#include "isect/reduction.hpp"

#include <functional>

using namespace isect;

static Term P(const char* s) { return parse_term(s); }

// closed pure terms up to the given node count, binders named by depth
static std::vector<Term> closed_terms(int max_size)
{
    std::function<std::vector<Term>(int, int)> gen = [&](int size, int depth) {
        std::vector<Term> out;
        if (size == 1)
            for (int k = 0; k < depth; ++k) out.push_back(var("v" + std::to_string(k)));
        if (size >= 2)
            for (auto& b : gen(size - 1, depth + 1)) out.push_back(abs("v" + std::to_string(depth), b));
        for (int l = 1; l + 1 < size; ++l)
            for (auto& f : gen(l, depth))
                for (auto& a : gen(size - 1 - l, depth)) out.push_back(app(f, a));
        return out;
    };
    std::vector<Term> all;
    for (int s = 1; s <= max_size; ++s)
        for (auto& t : gen(s, 0)) all.push_back(barendregt(t));
    return all;
}

static bool among(const Term& t, const std::vector<Step>& steps)
{
    for (auto& s : steps)
        if (alpha_eq(s.after, t)) return true;
    return false;
}

static long count_rule(const Trace& t, const std::string& r)
{
    long n = 0;
    for (auto& s : t) n += s.rule == r;
    return n;
}

TEST_CASE("beta normalization of a duplicating redex")
{
    auto [nf, tr] = normalize(P("(\\x. x x) (\\y. y)"), Relation::Beta, Strategy::Leftmost, 100);
    CHECK(tr.size() == 2);
    CHECK(alpha_eq(nf, P("\\y. y")));
    CHECK(tr[0].pos.empty());

    auto [nf2, tr2] = normalize(P("(\\x. x x) (\\y. y)"), Relation::Beta, Strategy::Perpetual, 100);
    CHECK(tr2.size() == 2);
    CHECK(alpha_eq(nf2, nf));
}

TEST_CASE("omega runs out of fuel")
{
    Term om = P("(\\x. x x) (\\x. x x)");
    for (auto s : {Strategy::Leftmost, Strategy::Perpetual, Strategy::Safe}) {
        try {
            normalize(om, Relation::Beta, s, 7);
            FAIL("expected FuelExhausted");
        } catch (const FuelExhausted& e) {
            CHECK(e.partial.size() == 7);
        }
    }
    CHECK_THROWS_AS(normalize(om, Relation::BS, Strategy::Leftmost, 20), FuelExhausted);
    CHECK_THROWS_AS(normalize(om, Relation::BS, Strategy::Safe, 20), std::invalid_argument);
}

TEST_CASE("beta redex positions")
{
    auto steps = beta_steps(P("(\\x. x) ((\\y. y) z)"));
    REQUIRE(steps.size() == 2);
    CHECK(steps[0].pos == Pos{});
    CHECK(steps[1].pos == Pos{1});
    CHECK(alpha_eq(steps[1].after, P("(\\x. x) z")));
}

TEST_CASE("perpetual and restricted steps are beta steps")
{
    int safe_seen = 0;
    for (auto& t : closed_terms(7)) {
        auto all = beta_steps(t);
        auto p = perpetual_step(t);
        auto s = safe_step(t);
        CHECK(p.has_value() == !all.empty());
        CHECK(s.has_value() == !all.empty());
        if (p) CHECK(among(p->after, all));
        if (s) {
            ++safe_seen;
            CHECK(among(s->after, all));
            REQUIRE(subterm(t, s->pos)->kind == Kind::App);
            CHECK(subterm(t, s->pos)->a->kind == Kind::Abs);
        }
    }
    CHECK(safe_seen > 50);
}

TEST_CASE("restricted step witnesses")
{
    // erasing a normal argument records its free variables
    auto s = safe_step(P("\\a. (\\x. \\y. y) (a a)"));
    REQUIRE(s);
    CHECK(s->w->kind == SafeKind::LamPer);
    CHECK(s->w->child->kind == SafeKind::Erase);
    CHECK(s->e.empty());
    CHECK(s->w->child->e == std::set<std::string>{"a"});

    // non-normal erased argument is reduced first
    s = safe_step(P("(\\x. \\y. y) ((\\z. z) w)"));
    REQUIRE(s);
    CHECK(s->w->kind == SafeKind::ArgInside);
    CHECK(s->pos == Pos{1});

    // accumulator head joins the set
    s = safe_step(P("f ((\\x. \\y. y) g)"));
    REQUIRE(s);
    CHECK(s->w->kind == SafeKind::AccArg);
    CHECK(s->e == std::set<std::string>{"f", "g"});
}

TEST_CASE("lambda-S normalization")
{
    auto [nf, tr] = normalize(P("(\\x. x x) (\\y. y)"), Relation::BS, Strategy::Leftmost, 1000);
    CHECK(alpha_eq(nf, P("\\y. y")));
    CHECK(count_rule(tr, "B") == 2);
    CHECK(tr.front().rule == "B");

    auto [nf2, tr2] = normalize(P("(\\x. y) z"), Relation::BSW, Strategy::Leftmost, 100);
    CHECK(alpha_eq(nf2, P("y")));
    CHECK(count_rule(tr2, "W") == 1);

    // without W the garbage substitution stays
    auto [nf3, tr3] = normalize(P("(\\x. y) z"), Relation::BS, Strategy::Leftmost, 100);
    CHECK(nf3->kind == Kind::ESub);
}

TEST_CASE("lambda-S rules on substitution chains")
{
    auto rules = [](const char* t) {
        std::set<std::string> out;
        for (auto& s : ls_steps(parse_term_raw(t))) out.insert(s.rule);
        return out;
    };
    CHECK(rules("(x x)[x := a]").count("S-app-both"));
    CHECK(rules("(y x)[x := a]").count("S-app-right"));
    CHECK(rules("(x y)[x := a]").count("S-app-left"));
    CHECK(rules("(\\y. x)[x := a]").count("S-abs"));
    CHECK(rules("(x y)[y := x][x := a]").count("S-sub-both"));
    CHECK(rules("y[y := x][x := a]").count("S-sub-right"));
    // the inner substitution is reachable through a commuting outer one
    CHECK(rules("x[x := a][y := b]").count("SR"));
}

TEST_CASE("lambda-S canonical form")
{
    Term a = parse_term_raw("(x y)[x := a][y := b]");
    Term b = parse_term_raw("(x y)[y := b][x := a]");
    CHECK(term_eq(ls_canon(a), ls_canon(b)));
    CHECK(term_eq(ls_canon(ls_canon(a)), ls_canon(a)));

    // dependent substitutions keep their order
    Term c = parse_term_raw("y[y := x][x := a]");
    CHECK(term_eq(ls_canon(c), c));

    // alpha-variants canonicalize to alpha-equal terms
    Term d = parse_term_raw("(p q)[p := a][q := b]");
    CHECK(alpha_eq(ls_canon(d), ls_canon(b)));
}

TEST_CASE("substitution steps decrease the S,W measure")
{
    int checked = 0;
    for (auto& t : closed_terms(8)) {
        Term cur = ls_canon(t);
        for (int k = 0; k < 25; ++k) {
            auto steps = ls_steps(cur);
            if (steps.empty()) break;
            for (auto& s : steps) {
                CHECK(sw_measure(s.after) == sw_measure(s.raw));
                if (s.rule == "B") continue;
                ++checked;
                CHECK(sw_measure(s.after) < sw_measure(s.before));
            }
            cur = steps[static_cast<std::size_t>(k) % steps.size()].after;
        }
    }
    CHECK(checked >= 200);
}

TEST_CASE("measure values")
{
    auto m = sw_measure(parse_term_raw("(x x)[x := y]"));
    CHECK(m.s == 4);
    CHECK(m.i == 30);
    CHECK(sw_m("x", parse_term_raw("x x")) == 2);
    CHECK(sw_m("z", parse_term_raw("x x")) == 1);
    CHECK(sw_m("a", parse_term_raw("(y y)[y := a a]")) == 6);
}

TEST_CASE("lambda-lxr rules")
{
    auto rules = [](const char* t) {
        std::set<std::string> out;
        for (auto& s : lxr_steps(parse_term_raw(t))) out.insert(s.rule);
        return out;
    };
    CHECK(rules("(\\x. x) a").count("B"));
    CHECK(rules("x[x := a]").count("SR"));
    CHECK(rules("(x y)[x := a]").count("SP-app1"));
    CHECK(rules("(y x)[x := a]").count("SP-app2"));
    CHECK(rules("(W[x] y)[x := a]").count("W"));
    CHECK(rules("(W[v] x)[x := a]").count("SP-weak"));
    CHECK(rules("(C[x < y, z] y z)[x := a]").count("D"));
    CHECK(rules("\\x. W[y] x").count("WAbs"));
    CHECK(rules("(W[y] f) x").count("WApp1"));
    CHECK(rules("C[w < y, z] W[y] z").count("Merge"));
    CHECK(rules("C[w < y, z] W[v] (y z)").count("Cross"));
    CHECK(rules("C[w < y, z] \\v. y z v").count("CAbs"));
    CHECK(rules("C[w < y, z] (y z) v").count("CApp1"));
    CHECK(rules("y[y := x][x := a]").count("ACC4"));
    CHECK(rules("y[y := W[v] a]").count("WSubs"));
}

TEST_CASE("lambda-lxr normalization keeps linearity")
{
    Term t = parse_term_raw("(\\x. C[x < y, z] y z) (\\w. w)");
    auto [nf, tr] = normalize(t, Relation::Lxr, Strategy::Leftmost, 1000);
    CHECK(alpha_eq(nf, P("\\w. w")));
    CHECK(count_rule(tr, "B") == 2);
    for (auto& s : tr) CHECK(is_linear(s.after));

    Term dup = parse_term_raw("(C[x < y, z] y z)[x := f a]");
    auto [nf2, tr2] = normalize(dup, Relation::Lxr, Strategy::Leftmost, 1000);
    CHECK(is_linear(nf2));
    CHECK(app_count(nf2) == 3);
    CHECK(free_vars(nf2) == std::vector<std::string>{"a", "f"});
}

TEST_CASE("trace serialization")
{
    auto [nf, tr] = normalize(P("(\\x. x) y"), Relation::Beta, Strategy::Leftmost, 10);
    CHECK(trace_jsonl(tr) == "{\"after\":\"y\",\"before\":\"(\\\\x. x) y\",\"pos\":[],\"rule\":\"Beta\"}\n");
}
