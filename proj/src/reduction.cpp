#include "isect/reduction.hpp"

#include "json.hpp"

#include <algorithm>
#include <array>
#include <functional>

namespace isect {

using boost::multiprecision::cpp_int;

namespace {

const std::vector<std::string>& rule_order()
{
    static const std::vector<std::string> order = {
        "Beta",    "B",     "SR",    "S-app-both", "S-app-right", "S-app-left", "S-abs", "S-sub-both",
        "S-sub-right", "W", "SP-app1", "SP-app2", "SP-abs", "SP-weak", "SP-con", "D", "ACC4", "WAbs",
        "WApp1",   "WApp2", "WSubs", "Merge",      "Cross",       "CAbs",       "CApp1", "CApp2", "CSubs"};
    return order;
}

int rule_rank(const std::string& r)
{
    auto& o = rule_order();
    return static_cast<int>(std::find(o.begin(), o.end(), r) - o.begin());
}

Pos extend(Pos p, std::initializer_list<int> more)
{
    p.insert(p.end(), more);
    return p;
}

Pos zeros(Pos p, std::size_t k)
{
    p.insert(p.end(), k, 0);
    return p;
}

// WRAPPER RUNS
// A run is a maximal nest of ESub, Weak or Con nodes of one kind; el is innermost first.

bool is_run_kind(Kind k) { return k == Kind::ESub || k == Kind::Weak || k == Kind::Con; }

struct Run {
    Kind kind;
    std::vector<Term> el;
    Term core;
};

Run peel(const Term& t)
{
    Run r{t->kind, {}, t};
    if (!is_run_kind(t->kind)) return r;
    std::vector<Term> outer;
    Term cur = t;
    while (cur->kind == t->kind) {
        outer.push_back(cur);
        cur = cur->a;
    }
    r.el.assign(outer.rbegin(), outer.rend());
    r.core = cur;
    return r;
}

Term put(const Term& e, const Term& body)
{
    switch (e->kind) {
    case Kind::ESub:
        return esub(body, e->name, e->b);
    case Kind::Weak:
        return weak(e->name, body);
    case Kind::Con:
        return con(e->name, e->y, e->z, body);
    default:
        throw std::logic_error("put: not a wrapper");
    }
}

Term wrap(const std::vector<Term>& el, Term core)
{
    for (auto& e : el) core = put(e, core);
    return core;
}

// carrier for a substitution element; only name and argument are read
Term sub_el(const std::string& x, const Term& n) { return esub(var(x), x, n); }

bool commute(const Term& inner, const Term& outer)
{
    switch (inner->kind) {
    case Kind::ESub:
        return !is_free(inner->b, outer->name) && !is_free(outer->b, inner->name);
    case Kind::Weak:
        return true;
    case Kind::Con:
        return inner->name != outer->y && inner->name != outer->z && outer->name != inner->y && outer->name != inner->z;
    default:
        return false;
    }
}

std::vector<Term> without_index(const std::vector<Term>& el, std::size_t j)
{
    std::vector<Term> out;
    for (std::size_t i = 0; i < el.size(); ++i)
        if (i != j) out.push_back(el[i]);
    return out;
}

// orders with element j innermost
std::vector<std::vector<Term>> bottom_choices(const std::vector<Term>& el)
{
    std::vector<std::vector<Term>> out;
    for (std::size_t j = 0; j < el.size(); ++j) {
        bool ok = true;
        for (std::size_t i = 0; i < j && ok; ++i) ok = commute(el[i], el[j]);
        if (!ok) continue;
        std::vector<Term> o = {el[j]};
        for (auto& e : without_index(el, j)) o.push_back(e);
        out.push_back(o);
    }
    return out;
}

// orders with element j outermost
std::vector<std::vector<Term>> top_choices(const std::vector<Term>& el)
{
    std::vector<std::vector<Term>> out;
    for (std::size_t j = 0; j < el.size(); ++j) {
        bool ok = true;
        for (std::size_t k = j + 1; k < el.size() && ok; ++k) ok = commute(el[j], el[k]);
        if (!ok) continue;
        auto o = without_index(el, j);
        o.push_back(el[j]);
        out.push_back(o);
    }
    return out;
}

// Order in which el[i] sits directly inside el[j] (i < j): elements in between
// that must stay outside i move past j, the others move inside i.
struct Adjacent {
    std::vector<Term> below;   // el[0..i) and the in-between elements moved inside
    std::vector<Term> above;   // in-between elements moved outside, then el(j..]
};

std::optional<Adjacent> adjacent(const std::vector<Term>& el, std::size_t i, std::size_t j)
{
    std::vector<std::size_t> after_j;
    Adjacent a;
    for (std::size_t k = 0; k < i; ++k) a.below.push_back(el[k]);
    for (std::size_t k = i + 1; k < j; ++k) {
        bool must = !commute(el[i], el[k]);
        for (std::size_t q : after_j) must = must || !commute(el[q], el[k]);
        if (must) {
            if (!commute(el[k], el[j])) return std::nullopt;
            after_j.push_back(k);
        } else {
            a.below.push_back(el[k]);
        }
    }
    for (std::size_t q : after_j) a.above.push_back(el[q]);
    for (std::size_t k = j + 1; k < el.size(); ++k) a.above.push_back(el[k]);
    return a;
}

template <class Canon>
struct Collector {
    const Term& root;
    Canon canon;
    std::vector<Step> out;

    void add(const std::string& rule, const Pos& p, const Term& rep, const Term& reduct, std::size_t keep = 0)
    {
        Step s;
        s.rule = rule;
        s.pos = p;
        s.before = root;
        s.redex = p.empty() ? rep : replace_at(root, p, rep);
        s.raw = p.empty() ? reduct : replace_at(root, p, reduct);
        s.after = canon(barendregt(s.raw));
        s.keep = keep;
        out.push_back(std::move(s));
    }

    std::vector<Step> finish()
    {
        std::stable_sort(out.begin(), out.end(), [](const Step& a, const Step& b) {
            if (a.pos != b.pos) return a.pos < b.pos;
            return rule_rank(a.rule) < rule_rank(b.rule);
        });
        std::set<std::string> seen;
        std::vector<Step> uniq;
        for (auto& s : out)
            if (seen.insert(s.rule + "@" + pos_string(s.pos) + "@" + alpha_key(s.after)).second) uniq.push_back(s);
        return uniq;
    }
};

// masked de Bruijn key: names in hidden print as '?'
void mkey_rec(const Term& t, std::vector<std::string>& scope, const std::set<std::string>& hidden, std::string& out)
{
    auto ref = [&](const std::string& x) {
        for (std::size_t k = scope.size(); k-- > 0;)
            if (scope[k] == x) {
                out += '#' + std::to_string(scope.size() - 1 - k);
                return;
            }
        out += hidden.count(x) ? std::string("?") : x;
    };
    switch (t->kind) {
    case Kind::Var:
        ref(t->name);
        return;
    case Kind::Abs:
        out += "(\\ ";
        scope.push_back(t->name);
        mkey_rec(t->a, scope, hidden, out);
        scope.pop_back();
        out += ')';
        return;
    case Kind::App:
        out += '(';
        mkey_rec(t->a, scope, hidden, out);
        out += ' ';
        mkey_rec(t->b, scope, hidden, out);
        out += ')';
        return;
    case Kind::ESub:
        out += "([";
        mkey_rec(t->b, scope, hidden, out);
        out += "] ";
        scope.push_back(t->name);
        mkey_rec(t->a, scope, hidden, out);
        scope.pop_back();
        out += ')';
        return;
    default:
        out += alpha_key_in(t, scope);
        return;
    }
}

std::string mkey(const Term& t, std::vector<std::string>& scope, const std::set<std::string>& hidden)
{
    std::string out;
    mkey_rec(t, scope, hidden, out);
    return out;
}

// greedy innermost-first placement respecting non-commuting pairs, smallest key first
std::vector<Term> order_run(const std::vector<Term>& el, const std::vector<std::string>& keys)
{
    std::size_t n = el.size();
    std::vector<bool> placed(n, false);
    std::vector<Term> out;
    while (out.size() < n) {
        std::size_t best = n;
        for (std::size_t j = 0; j < n; ++j) {
            if (placed[j]) continue;
            bool ready = true;
            for (std::size_t k = 0; k < j && ready; ++k)
                if (!placed[k] && !commute(el[k], el[j])) ready = false;
            if (!ready) continue;
            if (best == n || keys[j] < keys[best]) best = j;
        }
        placed[best] = true;
        out.push_back(el[best]);
    }
    return out;
}

Term ls_canon_rec(const Term& t, std::vector<std::string>& scope, std::set<std::string>& hidden)
{
    switch (t->kind) {
    case Kind::Var:
        return t;
    case Kind::Abs: {
        scope.push_back(t->name);
        Term b = ls_canon_rec(t->a, scope, hidden);
        scope.pop_back();
        return b == t->a ? t : abs(t->name, b);
    }
    case Kind::App: {
        Term a = ls_canon_rec(t->a, scope, hidden), b = ls_canon_rec(t->b, scope, hidden);
        return a == t->a && b == t->b ? t : app(a, b);
    }
    case Kind::ESub: {
        Run r = peel(t);
        std::vector<std::string> added;
        for (auto& e : r.el)
            if (hidden.insert(e->name).second) added.push_back(e->name);
        std::vector<Term> el;
        for (auto& e : r.el) el.push_back(sub_el(e->name, ls_canon_rec(e->b, scope, hidden)));
        Term core = ls_canon_rec(r.core, scope, hidden);
        std::vector<std::string> keys;
        for (auto& e : el) {
            hidden.erase(e->name);
            keys.push_back(mkey(e->b, scope, hidden) + "|" + mkey(abs(e->name, core), scope, hidden));
            hidden.insert(e->name);
        }
        for (auto& x : added) hidden.erase(x);
        return wrap(order_run(el, keys), core);
    }
    default:
        throw FragmentError("ls_canon: weakening or contraction in a lambda-S term");
    }
}

}  // namespace

Term ls_canon(const Term& m)
{
    std::vector<std::string> scope;
    std::set<std::string> hidden;
    return ls_canon_rec(m, scope, hidden);
}

namespace {

Term lxr_canon_rec(const Term& t)
{
    switch (t->kind) {
    case Kind::Var:
        return t;
    case Kind::Abs:
        return abs(t->name, lxr_canon_rec(t->a));
    case Kind::App:
        return app(lxr_canon_rec(t->a), lxr_canon_rec(t->b));
    default:
        break;
    }
    Run r = peel(t);
    Term core = lxr_canon_rec(r.core);
    std::vector<Term> el;
    std::vector<std::string> keys;
    for (auto& e : r.el) {
        if (e->kind == Kind::ESub) {
            el.push_back(sub_el(e->name, lxr_canon_rec(e->b)));
            keys.push_back(e->name);
        } else if (e->kind == Kind::Weak) {
            el.push_back(e);
            keys.push_back(e->name);
        } else {
            auto [y, z] = std::minmax(e->y, e->z);
            el.push_back(con(e->name, y, z, var(y)));
            keys.push_back(e->name + "<" + y + "," + z);
        }
    }
    return wrap(order_run(el, keys), core);
}

}  // namespace

Term lxr_canon(const Term& m) { return lxr_canon_rec(m); }

// BETA

namespace {

Step beta_at(const Term& m, const Pos& p)
{
    Term r = subterm(m, p);
    Step s;
    s.rule = "Beta";
    s.pos = p;
    s.before = m;
    s.redex = m;
    Term reduct = capture_subst(r->a->a, r->a->name, r->b);
    s.raw = p.empty() ? reduct : replace_at(m, p, reduct);
    s.after = barendregt(s.raw);
    return s;
}

void beta_rec(const Term& t, Pos& p, std::vector<Pos>& out)
{
    if (t->kind == Kind::App && t->a->kind == Kind::Abs) out.push_back(p);
    if (t->a) {
        p.push_back(0);
        beta_rec(t->a, p, out);
        p.pop_back();
    }
    if (t->b) {
        p.push_back(1);
        beta_rec(t->b, p, out);
        p.pop_back();
    }
}

}  // namespace

std::vector<Step> beta_steps(const Term& m)
{
    require_fragment(m, Fragment::PureLambda, "beta_steps");
    std::vector<Pos> ps;
    Pos p;
    beta_rec(m, p, ps);
    std::vector<Step> out;
    for (auto& q : ps) out.push_back(beta_at(m, q));
    return out;
}

// LAMBDA-S

namespace {

using LsCollector = Collector<Term (*)(const Term&)>;

void ls_run(const Run& r, const Pos& p, LsCollector& c, bool with_w)
{
    const Term& core = r.core;
    for (auto& order : bottom_choices(r.el)) {
        const Term& e = order[0];
        const std::string& x = e->name;
        const Term& n = e->b;
        std::vector<Term> rest(order.begin() + 1, order.end());
        Term rep = wrap(order, core);
        auto emit = [&](const char* rule, const Term& reduct) { c.add(rule, p, rep, wrap(rest, reduct), rest.size()); };
        switch (core->kind) {
        case Kind::Var:
            if (core->name == x)
                emit("SR", n);
            else if (with_w)
                emit("W", core);
            break;
        case Kind::App: {
            bool in1 = is_free(core->a, x), in2 = is_free(core->b, x);
            if (in1 && in2)
                emit("S-app-both", app(esub(core->a, x, n), esub(core->b, x, n)));
            else if (!in1 && in2)
                emit("S-app-right", app(core->a, esub(core->b, x, n)));
            if (!in2) emit("S-app-left", app(esub(core->a, x, n), core->b));
            break;
        }
        case Kind::Abs:
            if (core->name != x && !is_free(n, core->name)) emit("S-abs", abs(core->name, esub(core->a, x, n)));
            break;
        default:
            break;
        }
    }
    for (std::size_t j = 1; j < r.el.size(); ++j)
        for (std::size_t i = 0; i < j; ++i) {
            const Term& ei = r.el[i];
            const Term& ej = r.el[j];
            const std::string& y = ei->name;
            const std::string& x = ej->name;
            const Term& m2 = ei->b;
            const Term& n = ej->b;
            if (!is_free(m2, x) || is_free(n, y)) continue;
            auto adj = adjacent(r.el, i, j);
            if (!adj) continue;
            Term m1 = wrap(adj->below, core);
            std::vector<Term> rep_el = adj->below;
            rep_el.push_back(ei);
            rep_el.push_back(ej);
            rep_el.insert(rep_el.end(), adj->above.begin(), adj->above.end());
            Term rep = wrap(rep_el, core);
            Term inner = esub(m2, x, n);
            if (is_free(m1, x))
                c.add("S-sub-both", p, rep, wrap(adj->above, esub(esub(m1, x, n), y, inner)), adj->above.size());
            else
                c.add("S-sub-right", p, rep, wrap(adj->above, esub(m1, y, inner)), adj->above.size());
        }
}

void ls_visit(const Term& t, const Pos& p, LsCollector& c, bool with_w)
{
    switch (t->kind) {
    case Kind::Var:
        return;
    case Kind::Abs:
        ls_visit(t->a, extend(p, {0}), c, with_w);
        return;
    case Kind::App:
        if (t->a->kind == Kind::Abs) c.add("B", p, t, esub(t->a->a, t->a->name, t->b));
        ls_visit(t->a, extend(p, {0}), c, with_w);
        ls_visit(t->b, extend(p, {1}), c, with_w);
        return;
    case Kind::ESub: {
        Run r = peel(t);
        ls_run(r, p, c, with_w);
        std::size_t n = r.el.size();
        for (std::size_t k = 0; k < n; ++k) ls_visit(r.el[k]->b, extend(zeros(p, n - 1 - k), {1}), c, with_w);
        ls_visit(r.core, zeros(p, n), c, with_w);
        return;
    }
    default:
        throw FragmentError("ls_steps: weakening or contraction in a lambda-S term");
    }
}

}  // namespace

std::vector<Step> ls_steps(const Term& m, bool with_w)
{
    require_fragment(m, Fragment::LambdaS, "ls_steps");
    LsCollector c{m, &ls_canon, {}};
    ls_visit(m, {}, c, with_w);
    return c.finish();
}

// LAMBDA-LXR

namespace {

using LxrCollector = Collector<Term (*)(const Term&)>;

struct LxrCx {
    LxrCollector& c;
    std::set<std::string> avoid;

    std::string fresh(const std::string& base)
    {
        std::string f = fresh_name(base, avoid);
        avoid.insert(f);
        return f;
    }
};

Term weaken_all(const std::vector<std::string>& xs, Term body)
{
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) body = weak(*it, body);
    return body;
}

// substitution element at the bottom of an ESub run meeting its core
void lxr_sub_core(const Term& e, const Term& core, const std::function<void(const char*, const Term&, const Term&)>& emit,
                  LxrCx& cx)
{
    const std::string& x = e->name;
    const Term& n = e->b;
    switch (core->kind) {
    case Kind::Var:
        if (core->name == x) emit("SR", core, n);
        return;
    case Kind::App:
        if (is_free(core->a, x)) emit("SP-app1", core, app(esub(core->a, x, n), core->b));
        if (is_free(core->b, x)) emit("SP-app2", core, app(core->a, esub(core->b, x, n)));
        return;
    case Kind::Abs:
        if (core->name != x && !is_free(n, core->name)) emit("SP-abs", core, abs(core->name, esub(core->a, x, n)));
        return;
    case Kind::Weak: {
        Run w = peel(core);
        for (auto& order : top_choices(w.el)) {
            const Term& top = order.back();
            Term inner = wrap(std::vector<Term>(order.begin(), order.end() - 1), w.core);
            Term rep = wrap(order, w.core);
            if (top->name != x)
                emit("SP-weak", rep, weak(top->name, esub(inner, x, n)));
            else
                emit("W", rep, weaken_all(free_vars(n), inner));
        }
        return;
    }
    case Kind::Con: {
        Run cr = peel(core);
        for (auto& order : top_choices(cr.el)) {
            const Term& top = order.back();
            Term inner = wrap(std::vector<Term>(order.begin(), order.end() - 1), cr.core);
            Term rep = wrap(order, cr.core);
            if (top->name != x) {
                if (!is_free(n, top->name) && !is_free(n, top->y) && !is_free(n, top->z))
                    emit("SP-con", rep, con(top->name, top->y, top->z, esub(inner, x, n)));
            } else {
                // duplicate n into fresh copies of its free variables
                const auto& xs = free_vars(n);
                Term n1 = n, n2 = n;
                std::vector<std::array<std::string, 3>> cons;
                for (auto& v : xs) {
                    std::string v1 = cx.fresh(v), v2 = cx.fresh(v);
                    n1 = rename_free(n1, v, v1);
                    n2 = rename_free(n2, v, v2);
                    cons.push_back({v, v1, v2});
                }
                Term body = esub(esub(inner, top->y, n1), top->z, n2);
                for (auto it = cons.rbegin(); it != cons.rend(); ++it) body = con((*it)[0], (*it)[1], (*it)[2], body);
                emit("D", rep, body);
            }
        }
        return;
    }
    default:
        return;
    }
}

// contraction at the bottom of a Con run meeting its core
void lxr_con_core(const Term& e, const Term& core, const std::function<void(const char*, const Term&, const Term&)>& emit)
{
    const std::string &w = e->name, &y = e->y, &z = e->z;
    switch (core->kind) {
    case Kind::Weak: {
        Run wr = peel(core);
        for (auto& order : top_choices(wr.el)) {
            const Term& top = order.back();
            Term inner = wrap(std::vector<Term>(order.begin(), order.end() - 1), wr.core);
            Term rep = wrap(order, wr.core);
            if (top->name == y)
                emit("Merge", rep, rename_free(inner, z, w));
            else if (top->name == z)
                emit("Merge", rep, rename_free(inner, y, w));
            else
                emit("Cross", rep, weak(top->name, con(w, y, z, inner)));
        }
        return;
    }
    case Kind::Abs:
        emit("CAbs", core, abs(core->name, con(w, y, z, core->a)));
        return;
    case Kind::App:
        if (is_free(core->a, y) && is_free(core->a, z)) emit("CApp1", core, app(con(w, y, z, core->a), core->b));
        if (is_free(core->b, y) && is_free(core->b, z)) emit("CApp2", core, app(core->a, con(w, y, z, core->b)));
        return;
    case Kind::ESub: {
        Run sr = peel(core);
        for (auto& order : top_choices(sr.el)) {
            const Term& top = order.back();
            if (!is_free(top->b, y) || !is_free(top->b, z)) continue;
            Term inner = wrap(std::vector<Term>(order.begin(), order.end() - 1), sr.core);
            emit("CSubs", wrap(order, sr.core), esub(inner, top->name, con(w, y, z, top->b)));
        }
        return;
    }
    default:
        return;
    }
}

// a weakening at the top of t, for rules where t is a child
void weak_tops(const Term& t, const std::function<void(const Term& rep, const Term& top, const Term& inner)>& f)
{
    if (t->kind != Kind::Weak) return;
    Run w = peel(t);
    for (auto& order : top_choices(w.el))
        f(wrap(order, w.core), order.back(), wrap(std::vector<Term>(order.begin(), order.end() - 1), w.core));
}

void lxr_visit(const Term& t, const Pos& p, LxrCx& cx)
{
    LxrCollector& c = cx.c;
    switch (t->kind) {
    case Kind::Var:
        return;
    case Kind::Abs:
        weak_tops(t->a, [&](const Term& rep, const Term& top, const Term& inner) {
            if (top->name != t->name) c.add("WAbs", p, abs(t->name, rep), weak(top->name, abs(t->name, inner)));
        });
        lxr_visit(t->a, extend(p, {0}), cx);
        return;
    case Kind::App:
        if (t->a->kind == Kind::Abs) c.add("B", p, t, esub(t->a->a, t->a->name, t->b));
        weak_tops(t->a, [&](const Term& rep, const Term& top, const Term& inner) {
            c.add("WApp1", p, app(rep, t->b), weak(top->name, app(inner, t->b)));
        });
        weak_tops(t->b, [&](const Term& rep, const Term& top, const Term& inner) {
            c.add("WApp2", p, app(t->a, rep), weak(top->name, app(t->a, inner)));
        });
        lxr_visit(t->a, extend(p, {0}), cx);
        lxr_visit(t->b, extend(p, {1}), cx);
        return;
    default:
        break;
    }
    Run r = peel(t);
    std::size_t n = r.el.size();
    if (r.kind == Kind::ESub) {
        for (auto& order : bottom_choices(r.el)) {
            std::vector<Term> rest(order.begin() + 1, order.end());
            const Term& e = order[0];
            lxr_sub_core(e, r.core,
                         [&](const char* rule, const Term& core_rep, const Term& reduct) {
                             std::vector<Term> rep_el = order;
                             c.add(rule, p, wrap(rep_el, core_rep), wrap(rest, reduct), rest.size());
                         },
                         cx);
        }
        for (std::size_t j = 1; j < n; ++j)
            for (std::size_t i = 0; i < j; ++i) {
                const Term &ei = r.el[i], &ej = r.el[j];
                if (!is_free(ei->b, ej->name)) continue;
                auto adj = adjacent(r.el, i, j);
                if (!adj) continue;
                std::vector<Term> rep_el = adj->below;
                rep_el.push_back(ei);
                rep_el.push_back(ej);
                rep_el.insert(rep_el.end(), adj->above.begin(), adj->above.end());
                Term m1 = wrap(adj->below, r.core);
                c.add("ACC4", p, wrap(rep_el, r.core), wrap(adj->above, esub(m1, ei->name, esub(ei->b, ej->name, ej->b))),
                      adj->above.size());
            }
        // WSubs at each element, in place
        for (std::size_t k = 0; k < n; ++k) {
            Pos q = zeros(p, n - 1 - k);
            const Term& node = subterm(t, Pos(q.begin() + static_cast<long>(p.size()), q.end()));
            weak_tops(node->b, [&](const Term& rep, const Term& top, const Term& inner) {
                c.add("WSubs", q, esub(node->a, node->name, rep), weak(top->name, esub(node->a, node->name, inner)));
            });
        }
    } else if (r.kind == Kind::Con) {
        for (auto& order : bottom_choices(r.el)) {
            std::vector<Term> rest(order.begin() + 1, order.end());
            lxr_con_core(order[0], r.core, [&](const char* rule, const Term& core_rep, const Term& reduct) {
                c.add(rule, p, wrap(order, core_rep), wrap(rest, reduct), rest.size());
            });
        }
    }
    for (std::size_t k = 0; k < n; ++k)
        if (r.el[k]->kind == Kind::ESub) lxr_visit(r.el[k]->b, extend(zeros(p, n - 1 - k), {1}), cx);
    lxr_visit(r.core, zeros(p, n), cx);
}

}  // namespace

std::vector<Step> lxr_steps(const Term& m)
{
    require_fragment(m, Fragment::LambdaLxr, "lxr_steps");
    LxrCollector c{m, &lxr_canon, {}};
    LxrCx cx{c, all_names(m)};
    lxr_visit(m, {}, cx);
    auto out = c.finish();
    for (auto& s : out)
        if (!is_linear(s.after))
            throw std::logic_error("lxr_steps: rule " + s.rule + " produced a non-linear term " + print_term(s.after));
    return out;
}

// RESTRICTED AND PERPETUAL STRATEGIES

namespace {

Witness safe_rec(const Term& t)
{
    auto node = [&](SafeKind k, Term after, std::set<std::string> e, std::string x, Witness child) {
        return std::make_shared<const SafeWitness>(SafeWitness{k, t, std::move(after), std::move(e), std::move(x), std::move(child)});
    };
    if (t->kind == Kind::Abs) {
        Witness w = safe_rec(t->a);
        if (!w) return nullptr;
        auto e = w->e;
        e.erase(t->name);
        return node(SafeKind::LamPer, abs(t->name, w->after), e, t->name, w);
    }
    if (t->kind != Kind::App) return nullptr;
    const Term &f = t->a, &a = t->b;
    if (f->kind == Kind::Abs) {
        if (is_free(f->a, f->name)) return node(SafeKind::Contract, capture_subst(f->a, f->name, a), {}, f->name, nullptr);
        if (is_beta_normal(a)) {
            const auto& fv = free_vars(a);
            return node(SafeKind::Erase, f->a, std::set<std::string>(fv.begin(), fv.end()), f->name, nullptr);
        }
        Witness w = safe_rec(a);
        return node(SafeKind::ArgInside, app(f, w->after), w->e, f->name, w);
    }
    if (!is_beta_normal(f)) {
        Witness w = safe_rec(f);
        return node(SafeKind::AppLeft, app(w->after, a), w->e, "", w);
    }
    std::string head;
    is_accumulator(f, &head);
    Witness w = safe_rec(a);
    if (!w) return nullptr;
    auto e = w->e;
    e.insert(head);
    return node(SafeKind::AccArg, app(f, w->after), e, head, w);
}

std::optional<Pos> perp_rec(const Term& t, const Pos& p)
{
    if (t->kind == Kind::Abs) return perp_rec(t->a, extend(p, {0}));
    if (t->kind != Kind::App) return std::nullopt;
    std::vector<Term> args;
    Term h = t;
    while (h->kind == Kind::App) {
        args.push_back(h->b);
        h = h->a;
    }
    std::reverse(args.begin(), args.end());
    std::size_t k = args.size();
    auto arg_pos = [&](std::size_t i) { return extend(zeros(p, k - 1 - i), {1}); };
    if (h->kind == Kind::Abs) {
        if (is_free(h->a, h->name) || is_beta_normal(args[0])) return zeros(p, k - 1);
        return perp_rec(args[0], arg_pos(0));
    }
    for (std::size_t i = 0; i < k; ++i)
        if (!is_beta_normal(args[i])) return perp_rec(args[i], arg_pos(i));
    return std::nullopt;
}

}  // namespace

std::optional<SafeStep> safe_step(const Term& m)
{
    require_fragment(m, Fragment::PureLambda, "safe_step");
    Witness w = safe_rec(m);
    if (!w) return std::nullopt;
    SafeStep s;
    s.e = w->e;
    s.w = w;
    s.raw = w->after;
    s.after = barendregt(s.raw);
    for (Witness c = w; c; c = c->child) {
        if (c->kind == SafeKind::LamPer || c->kind == SafeKind::AppLeft) s.pos.push_back(0);
        if (c->kind == SafeKind::ArgInside || c->kind == SafeKind::AccArg) s.pos.push_back(1);
    }
    return s;
}

std::optional<Step> perpetual_step(const Term& m)
{
    require_fragment(m, Fragment::PureLambda, "perpetual_step");
    auto p = perp_rec(m, {});
    if (!p) return std::nullopt;
    return beta_at(m, *p);
}

// S,W MEASURE

cpp_int sw_m(const std::string& x, const Term& m)
{
    if (!is_free(m, x)) return 1;
    switch (m->kind) {
    case Kind::Var:
        return 1;
    case Kind::Abs:
        return sw_m(x, m->a);
    case Kind::App: {
        bool in1 = is_free(m->a, x), in2 = is_free(m->b, x);
        if (in1 && in2) return sw_m(x, m->a) + sw_m(x, m->b);
        return in1 ? sw_m(x, m->a) : sw_m(x, m->b);
    }
    case Kind::ESub: {
        bool inm = is_free(m->a, x), inn = is_free(m->b, x);
        if (!inn) return sw_m(x, m->a);
        cpp_int dup = sw_m(m->name, m->a) * (sw_m(x, m->b) + 1);
        return inm ? sw_m(x, m->a) + dup : dup;
    }
    default:
        throw FragmentError("sw_measure: weakening or contraction in a lambda-S term");
    }
}

namespace {

cpp_int sw_s(const Term& m)
{
    switch (m->kind) {
    case Kind::Var:
        return 1;
    case Kind::Abs:
        return sw_s(m->a);
    case Kind::App:
        return sw_s(m->a) + sw_s(m->b);
    case Kind::ESub:
        return sw_s(m->a) + sw_m(m->name, m->a) * sw_s(m->b);
    default:
        throw FragmentError("sw_measure: weakening or contraction in a lambda-S term");
    }
}

cpp_int sw_i(const Term& m)
{
    switch (m->kind) {
    case Kind::Var:
        return 2;
    case Kind::Abs:
        return 2 * sw_i(m->a) + 2;
    case Kind::App:
        return 2 * sw_i(m->a) + 2 * sw_i(m->b) + 2;
    case Kind::ESub:
        return sw_i(m->a) * (sw_i(m->b) + 1);
    default:
        throw FragmentError("sw_measure: weakening or contraction in a lambda-S term");
    }
}

}  // namespace

SWMeasure sw_measure(const Term& m)
{
    require_fragment(m, Fragment::LambdaS, "sw_measure");
    return {sw_s(m), sw_i(m)};
}

// DRIVER

const char* relation_name(Relation r)
{
    switch (r) {
    case Relation::Beta: return "beta";
    case Relation::BS: return "bs";
    case Relation::BSW: return "bsw";
    case Relation::Lxr: return "lxr";
    }
    return "?";
}

const char* strategy_name(Strategy s)
{
    switch (s) {
    case Strategy::Perpetual: return "perpetual";
    case Strategy::Leftmost: return "leftmost";
    case Strategy::Safe: return "safe";
    }
    return "?";
}

std::optional<Step> choose_step(const Term& m, Relation r, Strategy s)
{
    if (r != Relation::Beta && s != Strategy::Leftmost)
        throw std::invalid_argument(std::string("strategy ") + strategy_name(s) + " is only defined for beta");
    switch (r) {
    case Relation::Beta:
        if (s == Strategy::Perpetual) return perpetual_step(m);
        if (s == Strategy::Safe) {
            auto st = safe_step(m);
            if (!st) return std::nullopt;
            return Step{"Beta", st->pos, m, m, st->raw, st->after};
        } else {
            auto steps = beta_steps(m);
            if (steps.empty()) return std::nullopt;
            return steps.front();
        }
    case Relation::BS:
    case Relation::BSW: {
        auto steps = ls_steps(m, r == Relation::BSW);
        if (steps.empty()) return std::nullopt;
        return steps.front();
    }
    case Relation::Lxr: {
        auto steps = lxr_steps(m);
        if (steps.empty()) return std::nullopt;
        return steps.front();
    }
    }
    return std::nullopt;
}

std::pair<Term, Trace> normalize(const Term& m, Relation r, Strategy s, long fuel)
{
    Term cur = m;
    if (r == Relation::BS || r == Relation::BSW) cur = ls_canon(cur);
    if (r == Relation::Lxr) cur = lxr_canon(cur);
    Trace t;
    for (;;) {
        auto st = choose_step(cur, r, s);
        if (!st) return {cur, t};
        if (static_cast<long>(t.size()) >= fuel)
            throw FuelExhausted("fuel exhausted after " + std::to_string(t.size()) + " steps from " + print_term(m), t);
        t.push_back({st->rule, st->pos, cur, st->after});
        cur = st->after;
    }
}

std::string trace_jsonl(const Trace& t)
{
    std::string out;
    for (auto& s : t) {
        nlohmann::json j = {{"rule", s.rule}, {"pos", s.pos}, {"before", print_term(s.before)}, {"after", print_term(s.after)}};
        out += j.dump() + "\n";
    }
    return out;
}

}  // namespace isect
