#include "doctest.h"
#include "isect/oracle.hpp"

#include <functional>

using namespace isect;

static Term P(const char* s) { return parse_term(s); }
static Type T(const char* s) { return parse_type(s); }

static std::vector<Term> closed_terms(int max_size, int free = 0)
{
    std::function<std::vector<Term>(int, int)> gen = [&](int size, int depth) {
        std::vector<Term> out;
        if (size == 1) {
            for (int k = 0; k < depth; ++k) out.push_back(var("v" + std::to_string(k)));
            for (int k = 0; k < free; ++k) out.push_back(var(std::string(1, static_cast<char>('a' + k))));
        }
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

TEST_CASE("longest beta")
{
    CHECK(longest_beta(P("\\x. x")).length == 0);
    auto l = longest_beta(P("(\\x. x x)(\\y. y)"));
    CHECK(l.length == 2);
    CHECK(l.nodes == 3);
    CHECK(l.witness.size() == 2);

    auto k = longest_beta(P("(\\x. x x)(\\y. a y y)"));
    CHECK(k.length == 2);
    CHECK(alpha_eq(k.witness.back().after, P("a (\\y. a y y) (\\y. a y y)")));

    // erasing a redex keeps the longer path through it
    CHECK(longest_beta(P("(\\x. y)((\\z. z) w)")).length == 2);

    CHECK_THROWS_AS(longest_beta(P("(\\x. x x)(\\x. x x)")), FuelExhausted);
    CHECK_THROWS_AS(longest_beta(P("(\\x. x x x)(\\x. x x x)"), 50), FuelExhausted);
}

TEST_CASE("longest beta bounds every leftmost normalization")
{
    int checked = 0;
    for (auto& t : closed_terms(8)) {
        Longest l;
        try {
            l = longest_beta(t, 2000);
        } catch (const FuelExhausted&) {
            continue;
        }
        auto [nf, tr] = normalize(t, Relation::Beta, Strategy::Leftmost, 10000);
        CHECK(static_cast<long>(tr.size()) <= l.length);
        // witness replays as a beta sequence ending in normal form
        Term cur = t;
        for (auto& s : l.witness) {
            CHECK(alpha_eq(s.before, cur));
            cur = s.after;
        }
        CHECK(is_beta_normal(cur));
        ++checked;
    }
    CHECK(checked > 500);
}

TEST_CASE("max B over B,S")
{
    auto a = max_B_ls(P("\\y. y"));
    CHECK(a.n1 == 0);
    CHECK(a.n2 == 0);
    auto b = max_B_ls(P("(\\x. x x)(\\y. y)"));
    CHECK(b.n1 == 2);
    CHECK(b.n2 == 0);
    auto c = max_B_ls(P("(\\x. y) z"));
    CHECK(c.n1 == 1);
    CHECK(c.n2 == 0);
    CHECK(alpha_eq(c.normal_form, P("y[x := z]")));
}

TEST_CASE("duplications and replacements")
{
    auto traces = all_maximal_traces(P("(\\x. x x)(\\y. a y y)"));
    CHECK(traces.size() >= 1);
    for (auto& t : traces) CHECK(count_duplications(t) == 2);

    for (auto& t : all_maximal_traces(P("(\\x. y) z"))) CHECK(count_duplications(t) == 0);

    auto ls = all_maximal_traces(esub(app(var("x"), var("x")), "x", P("\\y. y")));
    REQUIRE(!ls.empty());
    auto [nf, tr] = normalize(P("(\\x. x x)(\\y. y)"), Relation::BS, Strategy::Leftmost, 100);
    CHECK(alpha_eq(nf, P("\\y. y")));
    CHECK(count_replacements(tr) == 3);

    // beta: two occurrences substituted, then one
    auto [nf2, tb] = normalize(P("(\\x. x x)(\\y. y)"), Relation::Beta, Strategy::Leftmost, 100);
    CHECK(count_replacements(tb) == 3);
    CHECK(count_duplications(tb) == 1);
}

TEST_CASE("duplications never exceed intersections of the principal derivation")
{
    int checked = 0;
    for (auto& t : closed_terms(7, 1)) {
        std::vector<Trace> traces;
        try {
            longest_beta(t, 500);
            traces = all_maximal_traces(t, 200);
        } catch (const FuelExhausted&) {
            continue;
        }
        auto r = infer_principal(t, Fragment::PureLambda);
        long inters = measures(r.deriv).inter_count;
        for (auto& tr : traces) CHECK(count_duplications(tr) <= inters);
        ++checked;
    }
    CHECK(checked > 500);
}

TEST_CASE("typing enumeration")
{
    auto xs = enum_typings(P("x"));
    REQUIRE(xs.size() == 1);
    CHECK(print_type(xs[0]->type) == "'a");

    auto ids = enum_typings(P("\\x. x"));
    REQUIRE(!ids.empty());
    for (auto& d : ids) CHECK_NOTHROW(check_derivation(d));

    EnumBounds b;
    b.max_height = 5;
    b.max_atoms = 3;
    auto ds = enum_typings(P("(\\x. x x)(\\y. a y y)"), b);
    REQUIRE(!ds.empty());
    long least = 1000;
    for (auto& d : ds) {
        CHECK_NOTHROW(check_derivation(d));
        least = std::min<long>(least, measures(d).inter_count);
    }
    CHECK(least == 3);

    // every enumerated derivation bounds the longest reduction from above
    for (auto& t : closed_terms(6, 1)) {
        long longest;
        try {
            longest = longest_beta(t, 500).length;
        } catch (const FuelExhausted&) {
            continue;
        }
        for (auto& d : enum_typings(t)) {
            CHECK_NOTHROW(check_derivation(d));
            CHECK(longest <= measures(d).app_count);
        }
    }
}

TEST_CASE("enumeration budget")
{
    EnumBounds b;
    b.max_nodes = 10;
    CHECK_THROWS_AS(enum_typings(P("(\\x. x x)(\\y. a y y)"), b), EnumBudgetExceeded);
}

TEST_CASE("derivability")
{
    Context g = ctx_set({}, "a", T("'t"));
    CHECK(derivable(P("\\z. a"), g, T("'s -> 't"), {}));
    CHECK_FALSE(derivable(P("\\z. (\\y. a)(z z)"), g, T("'s -> 't"), {}));
    CHECK(derivable(P("\\x. x"), {}, T("'s -> 's"), {}));
    CHECK_FALSE(derivable(P("\\x. x"), {}, T("'s -> 't"), {}));
    CHECK(derivable(P("\\x. x x"), {}, T("(('s -> 't) & 's) -> 't"), {}));
}

TEST_CASE("predict and verify")
{
    auto id = verify(P("\\x. x"), Fragment::PureLambda);
    CHECK(id.n == 0);
    CHECK(id.d == 0);
    CHECK(id.longest == 0);
    CHECK(id.agree == true);

    auto dd = verify(P("(\\x. x x)(\\y. y)"), Fragment::PureLambda);
    CHECK(dd.n == 2);
    CHECK(dd.d == 0);
    CHECK(dd.longest == 2);
    CHECK(dd.agree == true);

    auto ls = verify(P("(\\x. x x)(\\y. y)"), Fragment::LambdaS);
    CHECK(ls.n == 2);
    CHECK(ls.n1 == 2);
    CHECK(ls.n2 == 0);
    CHECK(ls.agree == true);

    auto p = predict(P("(\\x. x x)(\\y. y)"), Fragment::PureLambda);
    CHECK_FALSE(p.agree.has_value());
    auto j = report_json(p, false);
    CHECK(j["runtime_ms"].is_null());
    CHECK(j["agree"].is_null());
    CHECK(j["calculus"] == "lambda");
    CHECK(report_json(p, true)["runtime_ms"].is_number());

    CHECK(parse_calculus("ls") == Fragment::LambdaS);
    CHECK_FALSE(parse_calculus("sk").has_value());
}

TEST_CASE("corpora")
{
    auto a = lambda_corpus(7, 30);
    auto b = lambda_corpus(7, 30);
    REQUIRE(a.size() == 30);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(term_eq(a[i], b[i]));
        CHECK(a[i]->fv.empty());
        CHECK(a[i]->size <= 12);
        CHECK(check_fragment(a[i], Fragment::PureLambda));
    }
    auto c = lambda_corpus(8, 30);
    bool differs = false;
    for (std::size_t i = 0; i < c.size(); ++i) differs = differs || !alpha_eq(a[i], c[i]);
    CHECK(differs);

    auto s = ls_corpus(7, 30);
    REQUIRE(s.size() == 30);
    bool has_sub = false;
    for (auto& t : s) {
        CHECK(t->fv.empty());
        CHECK(t->size <= 10);
        CHECK(check_fragment(t, Fragment::LambdaS));
        has_sub = has_sub || !check_fragment(t, Fragment::PureLambda);
    }
    CHECK(has_sub);
}

TEST_CASE("parallel map keeps order")
{
    auto v = parallel_map<int>(100, 4, [](std::size_t i) { return static_cast<int>(i * i); });
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == static_cast<int>(i * i));
    CHECK_THROWS(parallel_map<int>(10, 3, [](std::size_t i) -> int {
        if (i == 5) throw std::runtime_error("x");
        return 0;
    }));
}
