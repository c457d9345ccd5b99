#include "isect/derivations.hpp"

#include <algorithm>

namespace isect {

const char* rule_name(Rule r)
{
    switch (r) {
    case Rule::Var: return "Var";
    case Rule::Abs: return "Abs";
    case Rule::App: return "App";
    case Rule::Inter: return "Inter";
    case Rule::Omega: return "Omega";
    case Rule::Subst: return "Subst";
    case Rule::Contraction: return "Contraction";
    case Rule::Weakening: return "Weakening";
    }
    return "?";
}

DerivError::DerivError(const std::string& msg, Pos p)
    : std::runtime_error(p.empty() ? msg : msg + " (at node " + pos_string(p) + ")"), path(std::move(p))
{
}

namespace {

std::shared_ptr<DNode> make(Rule r, std::vector<Deriv> prem, Context ctx, Term term, Type type)
{
    auto n = std::make_shared<DNode>();
    n->rule = r;
    n->ctx = std::move(ctx);
    n->term = std::move(term);
    n->type = std::move(type);
    for (auto& p : prem) {
        n->n += p->n;
        n->vars += p->vars;
        n->inters += p->inters;
    }
    if (r == Rule::App) n->n += 1;
    if (r == Rule::Var) n->vars += 1;
    if (r == Rule::Inter) n->inters += 1;
    n->prem = std::move(prem);
    return n;
}

void need_f(const Deriv& d, const char* rule)
{
    if (!is_f(d->type))
        throw DerivError(std::string(rule) + ": premise must conclude an F-type, got " + print_type(d->type));
}

}  // namespace

Deriv d_var(const std::string& x, const Type& f)
{
    if (!is_f(f)) throw DerivError("Var: type must be an F-type, got " + print_type(f));
    return make(Rule::Var, {}, Context{{x, f}}, var(x), f);
}

Deriv d_abs(const std::string& x, const Deriv& body, const Type& a)
{
    need_f(body, "Abs");
    if (is_omega(a)) throw DerivError("Abs: domain must be an A-type");
    Type u = ctx_get(body->ctx, x);
    if (!subtype(a, u))
        throw DerivError("Abs: side condition A included in U fails for A = " + print_type(a) + ", U = " + print_type(u));
    auto n = make(Rule::Abs, {body}, ctx_without(body->ctx, x), abs(x, body->term), arrow(a, body->type));
    n->u = u;
    n->a = a;
    return n;
}

Deriv d_app(const Deriv& f, const Deriv& arg)
{
    if (f->type->kind != TKind::Arrow) throw DerivError("App: function premise is not an arrow: " + print_type(f->type));
    if (!equiv(arg->type, f->type->l) || is_omega(arg->type))
        throw DerivError("App: argument type " + print_type(arg->type) + " does not match domain " +
                         print_type(f->type->l));
    return make(Rule::App, {f, arg}, ctx_inter(f->ctx, arg->ctx), app(f->term, arg->term), f->type->r);
}

Deriv d_inter(const Deriv& l, const Deriv& r)
{
    if (!term_eq(l->term, r->term)) throw DerivError("Inter: premises type different terms");
    if (is_omega(l->type) || is_omega(r->type)) throw DerivError("Inter: premise concludes omega");
    return make(Rule::Inter, {l, r}, ctx_inter(l->ctx, r->ctx), l->term, inter_raw(l->type, r->type));
}

Deriv d_omega(const Term& m) { return make(Rule::Omega, {}, Context{}, m, omega()); }

Deriv d_subst(const std::string& x, const Deriv& body, const Deriv& arg)
{
    need_f(body, "Subst");
    if (is_omega(arg->type)) throw DerivError("Subst: argument must have an A-type");
    Type u = ctx_get(body->ctx, x);
    if (!is_omega(u) && !equiv(u, arg->type))
        throw DerivError("Subst: U = " + print_type(u) + " is neither omega nor the argument type " +
                         print_type(arg->type));
    auto n = make(Rule::Subst, {body, arg}, ctx_inter(arg->ctx, ctx_without(body->ctx, x)),
                  esub(body->term, x, arg->term), body->type);
    n->u = u;
    n->a = arg->type;
    return n;
}

Deriv d_con(const std::string& x, const std::string& y, const std::string& z, const Deriv& body)
{
    need_f(body, "Contraction");
    if (x == y || x == z || y == z) throw DerivError("Contraction: variables must be distinct");
    Type u = ctx_get(body->ctx, x), v1 = ctx_get(body->ctx, y), v2 = ctx_get(body->ctx, z);
    Context c = ctx_without(ctx_without(body->ctx, y), z);
    c = ctx_set(c, x, inter(u, inter(v1, v2)));
    auto n = make(Rule::Contraction, {body}, c, con(x, y, z, body->term), body->type);
    n->u = u;
    n->v1 = v1;
    n->v2 = v2;
    return n;
}

Deriv d_weak(const std::string& x, const Type& a, const Deriv& body)
{
    need_f(body, "Weakening");
    if (is_omega(a)) throw DerivError("Weakening: added type must be an A-type");
    Type u = ctx_get(body->ctx, x);
    auto n = make(Rule::Weakening, {body}, ctx_set(body->ctx, x, inter(u, a)), weak(x, body->term), body->type);
    n->u = u;
    n->a = a;
    return n;
}

Deriv d_inter_of(const std::vector<Deriv>& ds, const Term& m)
{
    if (ds.empty()) return d_omega(m);
    Deriv d = ds[0];
    for (std::size_t i = 1; i < ds.size(); ++i) d = d_inter(d, ds[i]);
    return d;
}

std::vector<Deriv> d_leaves(const Deriv& d)
{
    if (d->rule == Rule::Omega) return {};
    if (d->rule != Rule::Inter) return {d};
    auto l = d_leaves(d->prem[0]);
    auto r = d_leaves(d->prem[1]);
    l.insert(l.end(), r.begin(), r.end());
    return l;
}

Measures measures(const Deriv& d) { return {d->n, d->vars, d->inters}; }

// CHECKING

namespace {

std::string show(const Context& c, const Term& t, const Type& u)
{
    return print_ctx(c) + " |- " + print_term(t) + " : " + print_type(u);
}

// rebuild the node from its premises through the constructors
Deriv recompute(const Deriv& d)
{
    auto arity = [&](std::size_t k) {
        if (d->prem.size() != k)
            throw DerivError(std::string(rule_name(d->rule)) + ": expected " + std::to_string(k) + " premises");
    };
    auto kind = [&](Kind k) {
        if (d->term->kind != k) throw DerivError(std::string(rule_name(d->rule)) + ": subject has the wrong shape");
    };
    switch (d->rule) {
    case Rule::Var:
        arity(0);
        kind(Kind::Var);
        return d_var(d->term->name, d->type);
    case Rule::Abs:
        arity(1);
        kind(Kind::Abs);
        if (d->type->kind != TKind::Arrow) throw DerivError("Abs: conclusion is not an arrow");
        return d_abs(d->term->name, d->prem[0], d->type->l);
    case Rule::App:
        arity(2);
        return d_app(d->prem[0], d->prem[1]);
    case Rule::Inter:
        arity(2);
        return d_inter(d->prem[0], d->prem[1]);
    case Rule::Omega:
        arity(0);
        return d_omega(d->term);
    case Rule::Subst:
        arity(2);
        kind(Kind::ESub);
        return d_subst(d->term->name, d->prem[0], d->prem[1]);
    case Rule::Contraction:
        arity(1);
        kind(Kind::Con);
        return d_con(d->term->name, d->term->y, d->term->z, d->prem[0]);
    case Rule::Weakening:
        arity(1);
        kind(Kind::Weak);
        if (!d->a) throw DerivError("Weakening: missing added type");
        return d_weak(d->term->name, d->a, d->prem[0]);
    }
    throw DerivError("unknown rule");
}

void check_rec(const Deriv& d, Pos& path)
{
    for (std::size_t i = 0; i < d->prem.size(); ++i) {
        path.push_back(static_cast<int>(i));
        check_rec(d->prem[i], path);
        path.pop_back();
    }
    Deriv r;
    try {
        r = recompute(d);
    } catch (const DerivError& e) {
        throw DerivError(e.what(), path);
    }
    if (!term_eq(r->term, d->term))
        throw DerivError(std::string(rule_name(d->rule)) + ": subject " + print_term(d->term) +
                             " does not match premises, expected " + print_term(r->term),
                         path);
    if (!type_eq(r->type, d->type))
        throw DerivError(std::string(rule_name(d->rule)) + ": conclusion type " + print_type(d->type) + ", expected " +
                             print_type(r->type),
                         path);
    if (!ctx_equiv(r->ctx, d->ctx))
        throw DerivError(std::string(rule_name(d->rule)) + ": context {" + print_ctx(d->ctx) + "}, expected {" +
                             print_ctx(r->ctx) + "}",
                         path);
    auto same = [](const Type& stored, const Type& computed) { return !stored || equiv(stored, computed); };
    if (!same(d->u, r->u) || !same(d->v1, r->v1) || !same(d->v2, r->v2) || (d->rule == Rule::Subst && !same(d->a, r->a)))
        throw DerivError(std::string(rule_name(d->rule)) + ": rule data disagrees with premises", path);
}

}  // namespace

Judgement check_derivation(const Deriv& d)
{
    Pos path;
    check_rec(d, path);
    return {d->ctx, d->term, d->type, measures(d)};
}

// OPTIMALITY

namespace {

bool subsumes(const Deriv& d)
{
    return d->rule == Rule::Abs && !is_omega(d->u) && !equiv(d->a, d->u);
}

void forgotten_rec(const Deriv& d, std::vector<Type>& out)
{
    if (subsumes(d)) throw DerivError("forgotten types: derivation uses subsumption at " + show(d->ctx, d->term, d->type));
    if ((d->rule == Rule::Abs || d->rule == Rule::Subst) && is_omega(d->u)) out.push_back(d->a);
    for (auto& p : d->prem) forgotten_rec(p, out);
}

}  // namespace

bool has_subsumption(const Deriv& d)
{
    if (subsumes(d)) return true;
    for (auto& p : d->prem)
        if (has_subsumption(p)) return true;
    return false;
}

std::vector<Type> forgotten_types(const Deriv& d)
{
    std::vector<Type> out;
    forgotten_rec(d, out);
    return out;
}

bool is_optimal(const Deriv& d)
{
    if (has_subsumption(d)) return false;
    if (!is_plus(d->type)) return false;
    for (auto& [x, u] : d->ctx)
        if (!is_mm(u)) return false;
    for (auto& f : forgotten_types(d))
        if (!is_plus(f)) return false;
    return true;
}

int tree_degree(const Deriv& d)
{
    if (!is_optimal(d)) throw DerivError("degree: derivation is not optimal");
    int deg = degree(d->type, Polarity::Plus);
    for (auto& [x, u] : d->ctx) deg += degree(u, Polarity::MinusMinus);
    for (auto& f : forgotten_types(d)) deg += degree(f, Polarity::Plus);
    return deg;
}

// SURGERY

std::pair<Deriv, Deriv> split_inter(const Deriv& d)
{
    if (d->rule != Rule::Inter) throw DerivError("split: conclusion is not an intersection: " + print_type(d->type));
    return {d->prem[0], d->prem[1]};
}

namespace {

Deriv shape_from(const Type& v, std::vector<Deriv>& pool, std::vector<bool>& used, const Term& m)
{
    switch (v->kind) {
    case TKind::Omega:
        return d_omega(m);
    case TKind::Inter:
        return d_inter(shape_from(v->l, pool, used, m), shape_from(v->r, pool, used, m));
    default:
        for (std::size_t i = 0; i < pool.size(); ++i)
            if (!used[i] && type_eq(pool[i]->type, v)) {
                used[i] = true;
                return pool[i];
            }
        throw DerivError("no component of type " + print_type(v));
    }
}

}  // namespace

Deriv lift_equiv(const Deriv& d, const Type& v)
{
    if (!equiv(d->type, v)) throw DerivError("lift: " + print_type(d->type) + " is not equivalent to " + print_type(v));
    auto pool = d_leaves(d);
    std::vector<bool> used(pool.size(), false);
    return shape_from(v, pool, used, d->term);
}

Deriv lift_subtype(const Deriv& d, const Type& v)
{
    if (!subtype(d->type, v)) throw DerivError("lift: " + print_type(d->type) + " is not a subtype of " + print_type(v));
    auto pool = d_leaves(d);
    std::vector<bool> used(pool.size(), false);
    return shape_from(v, pool, used, d->term);
}

Deriv rebind(const Deriv& d, const Term& t)
{
    auto expect = [&](Kind k) {
        if (t->kind != k)
            throw DerivError("rebind: " + print_term(t) + " does not have the shape of " + print_term(d->term));
    };
    switch (d->rule) {
    case Rule::Omega:
        return d_omega(t);
    case Rule::Inter:
        return d_inter(rebind(d->prem[0], t), rebind(d->prem[1], t));
    case Rule::Var:
        expect(Kind::Var);
        return d_var(t->name, d->type);
    case Rule::Abs:
        expect(Kind::Abs);
        return d_abs(t->name, rebind(d->prem[0], t->a), d->a);
    case Rule::App:
        expect(Kind::App);
        return d_app(rebind(d->prem[0], t->a), rebind(d->prem[1], t->b));
    case Rule::Subst:
        expect(Kind::ESub);
        return d_subst(t->name, rebind(d->prem[0], t->a), rebind(d->prem[1], t->b));
    case Rule::Contraction:
        expect(Kind::Con);
        return d_con(t->name, t->y, t->z, rebind(d->prem[0], t->a));
    case Rule::Weakening:
        expect(Kind::Weak);
        return d_weak(t->name, d->a, rebind(d->prem[0], t->a));
    }
    throw DerivError("rebind: unknown rule");
}

namespace {

bool is_wrapper_rule(Rule r) { return r == Rule::Subst || r == Rule::Contraction || r == Rule::Weakening; }
bool is_wrapper_kind(Kind k) { return k == Kind::ESub || k == Kind::Con || k == Kind::Weak; }

}  // namespace

Deriv transport(const Deriv& d, const Term& t)
{
    if (d->rule == Rule::Omega) return d_omega(t);
    if (d->rule == Rule::Inter) return d_inter(transport(d->prem[0], t), transport(d->prem[1], t));

    if (is_wrapper_rule(d->rule) || is_wrapper_kind(t->kind)) {
        std::vector<Deriv> chain;
        Deriv core = d;
        while (is_wrapper_rule(core->rule)) {
            chain.push_back(core);
            core = core->prem[0];
        }
        std::vector<Term> tchain;
        Term tcore = t;
        while (is_wrapper_kind(tcore->kind)) {
            tchain.push_back(tcore);
            tcore = tcore->a;
        }
        std::vector<bool> used(chain.size(), false);
        auto find = [&](Rule r, const std::string& name) -> Deriv {
            for (std::size_t i = 0; i < chain.size(); ++i)
                if (!used[i] && chain[i]->rule == r && chain[i]->term->name == name) {
                    used[i] = true;
                    return chain[i];
                }
            throw DerivError("transport: no matching wrapper for " + name + " in " + print_term(d->term));
        };
        Deriv cur = transport(core, tcore);
        for (auto it = tchain.rbegin(); it != tchain.rend(); ++it) {
            const Term& w = *it;
            if (w->kind == Kind::ESub) {
                Deriv s = find(Rule::Subst, w->name);
                cur = d_subst(w->name, cur, transport(s->prem[1], w->b));
            } else if (w->kind == Kind::Weak) {
                Deriv s = find(Rule::Weakening, w->name);
                cur = d_weak(w->name, s->a, cur);
            } else {
                cur = d_con(w->name, w->y, w->z, cur);
            }
        }
        return cur;
    }

    auto expect = [&](Kind k) {
        if (t->kind != k)
            throw DerivError("transport: " + print_term(t) + " does not have the shape of " + print_term(d->term));
    };
    switch (d->rule) {
    case Rule::Var:
        expect(Kind::Var);
        return d_var(t->name, d->type);
    case Rule::Abs:
        expect(Kind::Abs);
        return d_abs(t->name, transport(d->prem[0], t->a), d->a);
    case Rule::App:
        expect(Kind::App);
        return d_app(transport(d->prem[0], t->a), transport(d->prem[1], t->b));
    default:
        break;
    }
    throw DerivError("transport: unexpected rule");
}

// SERIALIZATION

nlohmann::json deriv_to_json(const Deriv& d)
{
    nlohmann::json ctx = nlohmann::json::object();
    for (auto& [x, u] : d->ctx) ctx[x] = print_type(u);
    nlohmann::json data = nlohmann::json::object();
    if (d->u) data["u"] = print_type(d->u);
    if (d->a) data["a"] = print_type(d->a);
    if (d->v1) data["v1"] = print_type(d->v1);
    if (d->v2) data["v2"] = print_type(d->v2);
    nlohmann::json prem = nlohmann::json::array();
    for (auto& p : d->prem) prem.push_back(deriv_to_json(p));
    return {{"rule", rule_name(d->rule)},
            {"conclusion", {{"ctx", ctx}, {"term", print_term(d->term)}, {"type", print_type(d->type)}}},
            {"data", data},
            {"premises", prem}};
}

namespace {

Rule rule_from(const std::string& s)
{
    for (Rule r : {Rule::Var, Rule::Abs, Rule::App, Rule::Inter, Rule::Omega, Rule::Subst, Rule::Contraction,
                   Rule::Weakening})
        if (s == rule_name(r)) return r;
    throw DerivError("unknown rule '" + s + "'");
}

Deriv load(const nlohmann::json& j)
{
    std::vector<Deriv> prem;
    if (j.contains("premises"))
        for (auto& p : j.at("premises")) prem.push_back(load(p));
    const auto& c = j.at("conclusion");
    Context ctx;
    for (auto& [x, u] : c.at("ctx").items()) ctx = ctx_set(ctx, x, parse_type(u.get<std::string>()));
    auto n = make(rule_from(j.at("rule").get<std::string>()), std::move(prem), ctx,
                  parse_term_raw(c.at("term").get<std::string>()), parse_type(c.at("type").get<std::string>()));
    if (j.contains("data")) {
        const auto& data = j.at("data");
        auto field = [&](const char* k) { return data.contains(k) ? parse_type(data.at(k).get<std::string>()) : Type(); };
        n->u = field("u");
        n->a = field("a");
        n->v1 = field("v1");
        n->v2 = field("v2");
    }
    return n;
}

// through the constructors, so that rule data is always filled in
Deriv rebuild_all(const Deriv& d)
{
    auto copy = std::make_shared<DNode>(*d);
    for (auto& p : copy->prem) p = rebuild_all(p);
    return recompute(copy);
}

void print_rec(const Deriv& d, int depth, std::string& out)
{
    out += std::string(2 * depth, ' ') + rule_name(d->rule) + "  " + show(d->ctx, d->term, d->type) + "\n";
    for (auto& p : d->prem) print_rec(p, depth + 1, out);
}

}  // namespace

Deriv deriv_from_json(const nlohmann::json& j)
{
    Deriv d;
    try {
        d = load(j);
    } catch (const nlohmann::json::exception& e) {
        throw DerivError(std::string("malformed derivation: ") + e.what());
    }
    check_derivation(d);
    return rebuild_all(d);
}

std::string print_deriv(const Deriv& d)
{
    std::string out;
    print_rec(d, 0, out);
    return out;
}

}  // namespace isect
