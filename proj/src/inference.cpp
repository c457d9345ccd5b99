#include "isect/inference.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <iterator>

namespace isect {

namespace {

std::vector<Term> spine(const Term& m, Term& head)
{
    std::vector<Term> args;
    head = m;
    while (head->kind == Kind::App) {
        args.push_back(head->b);
        head = head->a;
    }
    std::reverse(args.begin(), args.end());
    return args;
}

Type arrow_chain(const std::vector<Deriv>& args, Type result)
{
    for (auto it = args.rbegin(); it != args.rend(); ++it) result = arrow((*it)->type, result);
    return result;
}

Deriv apply_all(Deriv f, const std::vector<Deriv>& args)
{
    for (auto& a : args) f = d_app(f, a);
    return f;
}

Deriv type_abs(const Term& m, const Deriv& body, AtomSupply& atoms)
{
    Type u = ctx_get(body->ctx, m->name);
    return d_abs(m->name, body, is_omega(u) ? atoms.fresh() : u);
}

// Pick, for each U in us, leaves of d whose types make up U. Omega entries get nullptr.
std::vector<Deriv> split_by(const Deriv& d, const std::vector<Type>& us, const Term& m)
{
    auto pool = d_leaves(d);
    std::vector<bool> used(pool.size(), false);
    std::vector<Deriv> out;
    for (auto& u : us) {
        if (is_omega(u)) {
            out.push_back(nullptr);
            continue;
        }
        std::vector<Deriv> group;
        for (auto& f : leaves(u)) {
            std::size_t k = 0;
            while (k < pool.size() && (used[k] || !type_eq(pool[k]->type, f))) ++k;
            if (k == pool.size())
                throw DerivError("no component of type " + print_type(f) + " in " + print_type(d->type));
            used[k] = true;
            group.push_back(pool[k]);
        }
        out.push_back(d_inter_of(group, m));
    }
    return out;
}

// Subst node after the body's use of x may have shrunk; unused argument parts are dropped.
Deriv make_subst(const std::string& x, const Deriv& body, const Deriv& arg)
{
    Type u = ctx_get(body->ctx, x);
    if (is_omega(u) || equiv(u, arg->type)) return d_subst(x, body, arg);
    return d_subst(x, body, split_by(arg, {u}, arg->term)[0]);
}

Deriv distribute(const Deriv& d, const std::function<Deriv(const Deriv&)>& f)
{
    auto ls = d_leaves(d);
    std::vector<Deriv> out;
    for (auto& l : ls) out.push_back(f(l));
    if (out.empty()) throw DerivError("cannot distribute over an omega derivation");
    return d_inter_of(out, out[0]->term);
}

Deriv need(const Deriv& d, Rule r, const char* what)
{
    if (d->rule != r)
        throw DerivError(std::string(what) + ": expected a " + rule_name(r) + " node, found " + rule_name(d->rule) +
                         " for " + print_term(d->term));
    return d;
}

// Apply f at every F-typed derivation of the subterm at p, rebuilding the path.
Deriv at_path(const Deriv& d, const Pos& p, std::size_t i, const std::function<Deriv(const Deriv&)>& f)
{
    if (d->rule == Rule::Inter) return d_inter(at_path(d->prem[0], p, i, f), at_path(d->prem[1], p, i, f));
    if (d->rule == Rule::Omega) throw DerivError("untyped subterm on the path to the redex");
    if (i == p.size()) return f(d);
    int c = p[i];
    switch (d->rule) {
    case Rule::Abs:
        return d_abs(d->term->name, at_path(d->prem[0], p, i + 1, f), d->a);
    case Rule::App:
        return c == 0 ? d_app(at_path(d->prem[0], p, i + 1, f), d->prem[1])
                      : d_app(d->prem[0], at_path(d->prem[1], p, i + 1, f));
    case Rule::Subst:
        return c == 0 ? make_subst(d->term->name, at_path(d->prem[0], p, i + 1, f), d->prem[1])
                      : d_subst(d->term->name, d->prem[0], at_path(d->prem[1], p, i + 1, f));
    case Rule::Weakening:
        return d_weak(d->term->name, d->a, at_path(d->prem[0], p, i + 1, f));
    case Rule::Contraction:
        return d_con(d->term->name, d->term->y, d->term->z, at_path(d->prem[0], p, i + 1, f));
    default:
        throw DerivError("at_path: position runs past a variable");
    }
}

// Peel keep wrappers from d (typing the redex) and t (the local reduct), apply f, rewrap.
Deriv under_kept(const Deriv& d, const Term& t, std::size_t keep, const std::function<Deriv(const Deriv&, const Term&)>& f)
{
    if (keep == 0) return f(d, t);
    Deriv body = under_kept(d->prem[0], t->a, keep - 1, f);
    switch (d->rule) {
    case Rule::Subst:
        return make_subst(d->term->name, body, d->prem[1]);
    case Rule::Weakening:
        return d_weak(d->term->name, d->a, body);
    case Rule::Contraction:
        return d_con(d->term->name, d->term->y, d->term->z, body);
    default:
        throw DerivError("expected a wrapper around the redex at " + print_term(d->term));
    }
}

// arg derivation whose leaves are all weakenings of v: {unweakened, added types}
std::pair<Deriv, Type> unweaken(const Deriv& d)
{
    std::vector<Deriv> inner;
    std::vector<Type> added;
    for (auto& l : d_leaves(d)) {
        need(l, Rule::Weakening, "unweaken");
        inner.push_back(l->prem[0]);
        added.push_back(l->a);
    }
    if (inner.empty()) throw DerivError("unweaken: omega derivation");
    Type a = added[0];
    for (std::size_t i = 1; i < added.size(); ++i) a = inter(a, added[i]);
    return {d_inter_of(inner, inner[0]->term), a};
}

// x[x:=..] pair rules: d = Subst(x, Subst(y, d1, d2), dN)
Deriv push_into_arg(const Deriv& d, bool keep_body_copy)
{
    const std::string& x = d->term->name;
    Deriv inner = need(d->prem[0], Rule::Subst, "substitution pair");
    const std::string& y = inner->term->name;
    Deriv d1 = inner->prem[0];
    auto l2 = d_leaves(inner->prem[1]);
    std::vector<Type> us;
    if (keep_body_copy) us.push_back(ctx_get(d1->ctx, x));
    for (auto& l : l2) us.push_back(ctx_get(l->ctx, x));
    auto groups = split_by(d->prem[1], us, d->prem[1]->term);
    std::vector<Deriv> args;
    for (std::size_t i = 0; i < l2.size(); ++i) {
        const Deriv& g = groups[i + (keep_body_copy ? 1 : 0)];
        args.push_back(g ? d_subst(x, l2[i], g) : d_subst(x, l2[i], d->prem[1]));
    }
    Deriv arg = d_inter_of(args, args[0]->term);
    Deriv body = keep_body_copy ? d_subst(x, d1, groups[0] ? groups[0] : d->prem[1]) : d1;
    return d_subst(y, body, arg);
}

Deriv forward_local(const std::string& rule, const Deriv& d, const Term& t)
{
    auto sub = [&]() { return need(d, Rule::Subst, rule.c_str()); };
    if (rule == "Beta") {
        need(d, Rule::App, "Beta");
        Deriv lam = need(d->prem[0], Rule::Abs, "Beta");
        return subst_typing_implicit(lam->prem[0], lam->term->name, d->prem[1]);
    }
    if (rule == "B") {
        need(d, Rule::App, "B");
        Deriv lam = need(d->prem[0], Rule::Abs, "B");
        return make_subst(lam->term->name, lam->prem[0], d->prem[1]);
    }
    if (rule == "SR") {
        Deriv s = sub();
        return split_by(s->prem[1], {s->type}, s->prem[1]->term)[0];
    }
    if (rule == "S-app-both") {
        Deriv s = sub();
        Deriv a = need(s->prem[0], Rule::App, "S-app-both");
        const std::string& x = s->term->name;
        auto g = split_by(s->prem[1], {ctx_get(a->prem[0]->ctx, x), ctx_get(a->prem[1]->ctx, x)}, s->prem[1]->term);
        return d_app(d_subst(x, a->prem[0], g[0]), subst_typing_explicit(a->prem[1], x, g[1]));
    }
    if (rule == "S-app-left" || rule == "SP-app1") {
        Deriv s = sub();
        Deriv a = need(s->prem[0], Rule::App, rule.c_str());
        return d_app(d_subst(s->term->name, a->prem[0], s->prem[1]), a->prem[1]);
    }
    if (rule == "S-app-right" || rule == "SP-app2") {
        Deriv s = sub();
        Deriv a = need(s->prem[0], Rule::App, rule.c_str());
        return d_app(a->prem[0], subst_typing_explicit(a->prem[1], s->term->name, s->prem[1]));
    }
    if (rule == "S-abs" || rule == "SP-abs") {
        Deriv s = sub();
        Deriv l = need(s->prem[0], Rule::Abs, rule.c_str());
        return d_abs(l->term->name, d_subst(s->term->name, l->prem[0], s->prem[1]), l->a);
    }
    if (rule == "S-sub-both") return push_into_arg(sub(), true);
    if (rule == "S-sub-right" || rule == "ACC4") return push_into_arg(sub(), false);
    if (rule == "W" && d->prem[0]->rule != Rule::Weakening) return sub()->prem[0];
    if (rule == "W") {
        Deriv s = sub();
        Deriv dm = s->prem[0]->prem[0];
        std::vector<Term> ws;
        Term cur = t;
        while (cur->kind == Kind::Weak) {
            ws.push_back(cur);
            cur = cur->a;
        }
        Deriv out = dm;
        for (auto it = ws.rbegin(); it != ws.rend(); ++it) {
            Type a = ctx_get(s->prem[1]->ctx, (*it)->name);
            if (is_omega(a)) throw DerivError("W: free variable " + (*it)->name + " of the argument is untyped");
            out = d_weak((*it)->name, a, out);
        }
        return out;
    }
    if (rule == "SP-weak") {
        Deriv s = sub();
        Deriv w = need(s->prem[0], Rule::Weakening, "SP-weak");
        return d_weak(w->term->name, w->a, d_subst(s->term->name, w->prem[0], s->prem[1]));
    }
    if (rule == "SP-con") {
        Deriv s = sub();
        Deriv c = need(s->prem[0], Rule::Contraction, "SP-con");
        return d_con(c->term->name, c->term->y, c->term->z, d_subst(s->term->name, c->prem[0], s->prem[1]));
    }
    if (rule == "D") {
        Deriv s = sub();
        Deriv c = need(s->prem[0], Rule::Contraction, "D");
        Deriv dm = c->prem[0];
        const std::string &y = c->term->y, &z = c->term->z;
        std::vector<Term> cons;
        Term body = t;
        while (body->kind == Kind::Con) {
            cons.push_back(body);
            body = body->a;
        }
        // body = M[y:=N1][z:=N2]
        const Term& n2 = body->b;
        const Term& n1 = body->a->b;
        auto g = split_by(s->prem[1], {ctx_get(dm->ctx, y), ctx_get(dm->ctx, z)}, s->prem[1]->term);
        if (!g[0] || !g[1]) throw DerivError("D: contracted copy is untyped");
        Deriv out = d_subst(z, d_subst(y, dm, rebind(g[0], n1)), rebind(g[1], n2));
        for (auto it = cons.rbegin(); it != cons.rend(); ++it) out = d_con((*it)->name, (*it)->y, (*it)->z, out);
        return out;
    }
    if (rule == "WAbs") {
        Deriv l = need(d, Rule::Abs, "WAbs");
        Deriv w = need(l->prem[0], Rule::Weakening, "WAbs");
        return d_weak(w->term->name, w->a, d_abs(l->term->name, w->prem[0], l->a));
    }
    if (rule == "WApp1") {
        Deriv a = need(d, Rule::App, "WApp1");
        Deriv w = need(a->prem[0], Rule::Weakening, "WApp1");
        return d_weak(w->term->name, w->a, d_app(w->prem[0], a->prem[1]));
    }
    if (rule == "WApp2") {
        Deriv a = need(d, Rule::App, "WApp2");
        auto [inner, added] = unweaken(a->prem[1]);
        return d_weak(d_leaves(a->prem[1])[0]->term->name, added, d_app(a->prem[0], inner));
    }
    if (rule == "WSubs") {
        Deriv s = sub();
        auto [inner, added] = unweaken(s->prem[1]);
        return d_weak(d_leaves(s->prem[1])[0]->term->name, added, make_subst(s->term->name, s->prem[0], inner));
    }
    auto con_node = [&]() { return need(d, Rule::Contraction, rule.c_str()); };
    if (rule == "Merge") {
        Deriv c = con_node();
        Deriv w = need(c->prem[0], Rule::Weakening, "Merge");
        return rebind(w->prem[0], t);
    }
    if (rule == "Cross") {
        Deriv c = con_node();
        Deriv w = need(c->prem[0], Rule::Weakening, "Cross");
        return d_weak(w->term->name, w->a, d_con(c->term->name, c->term->y, c->term->z, w->prem[0]));
    }
    auto recon = [&](const Deriv& c, const Deriv& body) {
        return distribute(body, [&](const Deriv& l) { return d_con(c->term->name, c->term->y, c->term->z, l); });
    };
    if (rule == "CAbs") {
        Deriv c = con_node();
        Deriv l = need(c->prem[0], Rule::Abs, "CAbs");
        return d_abs(l->term->name, recon(c, l->prem[0]), l->a);
    }
    if (rule == "CApp1") {
        Deriv c = con_node();
        Deriv a = need(c->prem[0], Rule::App, "CApp1");
        return d_app(recon(c, a->prem[0]), a->prem[1]);
    }
    if (rule == "CApp2") {
        Deriv c = con_node();
        Deriv a = need(c->prem[0], Rule::App, "CApp2");
        return d_app(a->prem[0], recon(c, a->prem[1]));
    }
    if (rule == "CSubs") {
        Deriv c = con_node();
        Deriv s = need(c->prem[0], Rule::Subst, "CSubs");
        return d_subst(s->term->name, s->prem[0], recon(c, s->prem[1]));
    }
    throw DerivError("no reduction transformer for rule " + rule);
}

}  // namespace

// NORMAL FORMS

Deriv type_normal_lambda(const Term& m, AtomSupply& atoms)
{
    require_fragment(m, Fragment::PureLambda, "type_normal_lambda");
    if (m->kind == Kind::Abs) return type_abs(m, type_normal_lambda(m->a, atoms), atoms);
    Term head;
    auto args = spine(m, head);
    if (head->kind != Kind::Var) throw DerivError("type_normal_lambda: " + print_term(m) + " is not normal");
    std::vector<Deriv> ds;
    for (auto& a : args) ds.push_back(type_normal_lambda(a, atoms));
    return apply_all(d_var(head->name, arrow_chain(ds, atoms.fresh())), ds);
}

namespace {

Deriv head_typed(const Term& h, const Type& ty, AtomSupply& atoms);

Deriv tnls(const Term& m, AtomSupply& atoms)
{
    if (m->kind == Kind::Abs) return type_abs(m, tnls(m->a, atoms), atoms);
    Term head;
    auto args = spine(m, head);
    if (head->kind == Kind::Abs) throw DerivError("type_normal_ls: B-redex in " + print_term(m));
    std::vector<Deriv> ds;
    for (auto& a : args) ds.push_back(tnls(a, atoms));
    Type result = atoms.fresh();
    return apply_all(head_typed(head, arrow_chain(ds, result), atoms), ds);
}

Deriv head_typed(const Term& h, const Type& ty, AtomSupply& atoms)
{
    if (h->kind == Kind::Var) return d_var(h->name, ty);
    if (h->kind != Kind::ESub || is_free(h->a, h->name) || (h->a->kind != Kind::Var && h->a->kind != Kind::ESub))
        throw DerivError("type_normal_ls: S-redex " + print_term(h));
    Deriv body = head_typed(h->a, ty, atoms);
    return d_subst(h->name, body, tnls(h->b, atoms));
}

}  // namespace

Deriv type_normal_ls(const Term& m, AtomSupply& atoms)
{
    require_fragment(m, Fragment::LambdaS, "type_normal_ls");
    return tnls(m, atoms);
}

Deriv retype_accumulator(const Deriv& d, const Type& g)
{
    if (!is_accumulator(d->term)) throw DerivError("retype_accumulator: " + print_term(d->term) + " is not an accumulator");
    if (d->rule == Rule::Var) return d_var(d->term->name, g);
    need(d, Rule::App, "retype_accumulator");
    const Deriv& arg = d->prem[1];
    return d_app(retype_accumulator(d->prem[0], arrow(arg->type, g)), arg);
}

// TYPING SUBSTITUTIONS

Deriv subst_typing_implicit(const Deriv& dm, const std::string& x, const Deriv& dn)
{
    auto pool = d_leaves(dn);
    std::vector<bool> used(pool.size(), false);
    std::function<Deriv(const Deriv&)> rec = [&](const Deriv& d) -> Deriv {
        switch (d->rule) {
        case Rule::Inter:
            return d_inter(rec(d->prem[0]), rec(d->prem[1]));
        case Rule::Var: {
            if (d->term->name != x) return d;
            for (std::size_t k = 0; k < pool.size(); ++k)
                if (!used[k] && type_eq(pool[k]->type, d->type)) {
                    used[k] = true;
                    return pool[k];
                }
            throw DerivError("subst_typing_implicit: no derivation of the argument at " + print_type(d->type));
        }
        case Rule::Abs:
            if (d->term->name == x) return d;
            return d_abs(d->term->name, rec(d->prem[0]), d->a);
        case Rule::App:
            return d_app(rec(d->prem[0]), rec(d->prem[1]));
        default:
            throw DerivError("subst_typing_implicit: pure derivation expected");
        }
    };
    if (dm->rule == Rule::Omega) return d_omega(capture_subst(dm->term, x, dn->term));
    Deriv out = rec(dm);
    if (std::find(used.begin(), used.end(), false) != used.end() && !is_omega(ctx_get(dm->ctx, x)))
        throw DerivError("subst_typing_implicit: argument type does not match the uses of " + x);
    return out;
}

Deriv subst_typing_explicit(const Deriv& dm, const std::string& x, const Deriv& dn)
{
    if (dm->rule == Rule::Omega) throw DerivError("subst_typing_explicit: the body must have an A-type");
    if (is_omega(ctx_get(dm->ctx, x))) throw DerivError("subst_typing_explicit: " + x + " must have an A-type");
    if (dm->rule != Rule::Inter) return d_subst(x, dm, dn);
    const Deriv &l = dm->prem[0], &r = dm->prem[1];
    auto g = split_by(dn, {ctx_get(l->ctx, x), ctx_get(r->ctx, x)}, dn->term);
    return d_inter(subst_typing_explicit(l, x, g[0]), subst_typing_explicit(r, x, g[1]));
}

std::pair<Deriv, Deriv> anti_subst(const Deriv& d, const Term& m, const std::string& x, const Term& n)
{
    std::vector<Deriv> found;
    std::function<Deriv(const Deriv&, const Term&)> rec = [&](const Deriv& e, const Term& t) -> Deriv {
        if (e->rule == Rule::Omega) return d_omega(t);
        if (e->rule == Rule::Inter) return d_inter(rec(e->prem[0], t), rec(e->prem[1], t));
        switch (t->kind) {
        case Kind::Var:
            if (t->name == x) {
                if (!alpha_eq(e->term, n)) throw DerivError("anti_subst: expected " + print_term(n) + " at " + x);
                found.push_back(e);
                return d_var(x, e->type);
            }
            need(e, Rule::Var, "anti_subst");
            return e;
        case Kind::Abs:
            need(e, Rule::Abs, "anti_subst");
            return d_abs(t->name, rec(e->prem[0], t->a), e->a);
        case Kind::App:
            need(e, Rule::App, "anti_subst");
            return d_app(rec(e->prem[0], t->a), rec(e->prem[1], t->b));
        default:
            throw DerivError("anti_subst: pure terms only");
        }
    };
    Deriv dm = rec(d, m);
    for (auto& f : found) f = rebind(f, n);
    return {d_inter_of(found, n), dm};
}

// SUBJECT REDUCTION AND EXPANSION

Deriv subject_reduce(const Deriv& d, const Step& s, Fragment f)
{
    bool ok = f == Fragment::PureLambda ? s.rule == "Beta" : s.rule != "Beta";
    if (!ok) throw DerivError("rule " + s.rule + " does not belong to this calculus");
    if (!alpha_eq(d->term, s.before)) throw DerivError("subject_reduce: derivation does not type " + print_term(s.before));
    if (d->rule == Rule::Omega) return d_omega(s.after);
    Deriv at = f == Fragment::PureLambda ? rebind(d, s.redex) : transport(rebind(d, s.before), s.redex);
    Term local = subterm(s.raw, s.pos);
    Deriv red = at_path(at, s.pos, 0, [&](const Deriv& e) {
        return under_kept(e, local, s.keep, [&](const Deriv& g, const Term& t) { return forward_local(s.rule, g, t); });
    });
    Deriv mid = rebind(red, barendregt(s.raw));
    return f == Fragment::PureLambda ? mid : transport(mid, s.after);
}

namespace {

Deriv backward_local(const std::string& rule, const Deriv& d, const Term& rep)
{
    if (rule == "B") {
        Deriv s = need(d, Rule::Subst, "B");
        return d_app(d_abs(s->term->name, s->prem[0], s->a), s->prem[1]);
    }
    // rep is the redex with the kept wrappers peeled: an ESub on the active element
    const std::string& x = rep->name;
    if (rule == "SR") return d_subst(x, d_var(x, d->type), d);
    // argument side: every component is a substitution of x
    auto unsub = [&](const Deriv& arg, std::vector<Deriv>& ns) {
        std::vector<Deriv> ms;
        for (auto& l : d_leaves(arg)) {
            need(l, Rule::Subst, rule.c_str());
            ms.push_back(l->prem[0]);
            ns.push_back(l->prem[1]);
        }
        return d_inter_of(ms, ms.at(0)->term);
    };
    if (rule == "S-app-both") {
        need(d, Rule::App, rule.c_str());
        Deriv l = need(d->prem[0], Rule::Subst, rule.c_str());
        std::vector<Deriv> ns = {l->prem[1]};
        Deriv m2 = unsub(d->prem[1], ns);
        return d_subst(x, d_app(l->prem[0], m2), d_inter_of(ns, rep->b));
    }
    if (rule == "S-app-right") {
        need(d, Rule::App, rule.c_str());
        std::vector<Deriv> ns;
        Deriv m2 = unsub(d->prem[1], ns);
        return d_subst(x, d_app(d->prem[0], m2), d_inter_of(ns, rep->b));
    }
    if (rule == "S-app-left") {
        need(d, Rule::App, rule.c_str());
        Deriv s = need(d->prem[0], Rule::Subst, rule.c_str());
        return d_subst(x, d_app(s->prem[0], d->prem[1]), s->prem[1]);
    }
    if (rule == "S-abs") {
        Deriv l = need(d, Rule::Abs, rule.c_str());
        Deriv s = need(l->prem[0], Rule::Subst, rule.c_str());
        return d_subst(x, d_abs(l->term->name, s->prem[0], l->a), s->prem[1]);
    }
    if (rule == "S-sub-both" || rule == "S-sub-right") {
        // reduct: M1'[y := M2[x:=N]] with M1' = M1[x:=N] for S-sub-both
        Deriv outer = need(d, Rule::Subst, rule.c_str());
        const std::string& y = outer->term->name;
        Deriv d1 = outer->prem[0];
        std::vector<Deriv> ns;
        if (rule == "S-sub-both") {
            need(d1, Rule::Subst, rule.c_str());
            ns.push_back(d1->prem[1]);
            d1 = d1->prem[0];
        }
        std::vector<Deriv> m2s;
        for (auto& l : d_leaves(outer->prem[1])) {
            need(l, Rule::Subst, rule.c_str());
            m2s.push_back(l->prem[0]);
            ns.push_back(l->prem[1]);
        }
        Deriv d2 = d_inter_of(m2s, rep->a->b);
        Deriv dn = d_inter_of(ns, rep->b);
        return d_subst(x, d_subst(y, d1, d2), dn);
    }
    throw DerivError("no expansion transformer for rule " + rule);
}

}  // namespace

Deriv subject_expand(const Deriv& d, const Step& s)
{
    if (s.rule != "B" && s.rule.rfind("S", 0) != 0)
        throw DerivError("subject expansion does not hold for rule " + s.rule);
    if (!alpha_eq(d->term, s.after)) throw DerivError("subject_expand: derivation does not type " + print_term(s.after));
    if (d->rule == Rule::Omega) return d_omega(s.before);
    Deriv at = rebind(transport(rebind(d, s.after), barendregt(s.raw)), s.raw);
    Term local = subterm(s.redex, s.pos);
    Deriv exp = at_path(at, s.pos, 0, [&](const Deriv& e) {
        return under_kept(e, local, s.keep, [&](const Deriv& g, const Term& t) { return backward_local(s.rule, g, t); });
    });
    return transport(rebind(exp, s.redex), s.before);
}

namespace {

Deriv expand_witness(const Witness& w, const Deriv& d, AtomSupply& atoms)
{
    const Term& t = w->before;
    if (d->rule == Rule::Omega) return d_omega(t);
    if (d->rule == Rule::Inter) return d_inter(expand_witness(w, d->prem[0], atoms), expand_witness(w, d->prem[1], atoms));
    switch (w->kind) {
    case SafeKind::Contract: {
        const Term& lam = t->a;
        auto [dn, dm] = anti_subst(d, lam->a, lam->name, t->b);
        return d_app(d_abs(lam->name, dm, dn->type), dn);
    }
    case SafeKind::Erase: {
        Deriv dn = type_normal_lambda(t->b, atoms);
        return d_app(d_abs(t->a->name, rebind(d, t->a->a), dn->type), dn);
    }
    case SafeKind::ArgInside: {
        need(d, Rule::App, "ArgInside");
        Deriv arg = expand_witness(w->child, d->prem[1], atoms);
        Deriv lam = need(d->prem[0], Rule::Abs, "ArgInside");
        return d_app(d_abs(t->a->name, lam->prem[0], arg->type), arg);
    }
    case SafeKind::AppLeft:
        need(d, Rule::App, "AppLeft");
        return d_app(expand_witness(w->child, d->prem[0], atoms), d->prem[1]);
    case SafeKind::LamPer: {
        need(d, Rule::Abs, "LamPer");
        Deriv body = expand_witness(w->child, d->prem[0], atoms);
        Type u = ctx_get(body->ctx, t->name);
        return d_abs(t->name, body, is_omega(u) ? d->a : u);
    }
    case SafeKind::AccArg: {
        need(d, Rule::App, "AccArg");
        Deriv arg = expand_witness(w->child, d->prem[1], atoms);
        return d_app(retype_accumulator(d->prem[0], arrow(arg->type, d->type)), arg);
    }
    }
    throw DerivError("unknown restricted step");
}

}  // namespace

Deriv subject_expand(const Deriv& d, const SafeStep& s, AtomSupply& atoms)
{
    if (!alpha_eq(d->term, s.after)) throw DerivError("subject_expand: derivation does not type " + print_term(s.after));
    Deriv out = expand_witness(s.w, rebind(d, s.raw), atoms);
    return rebind(out, s.w->before);
}

// INFERENCE

PrincipalResult infer_principal(const Term& m, Fragment f, long fuel)
{
    require_fragment(m, f, "infer_principal");
    AtomSupply atoms;
    PrincipalResult r;
    r.term = m;
    auto out_of_fuel = [&]() {
        return FuelExhausted("no normal form within " + std::to_string(fuel) + " steps from " + print_term(m), r.trace);
    };
    if (f == Fragment::PureLambda) {
        std::vector<SafeStep> steps;
        Term cur = m;
        while (auto s = safe_step(cur)) {
            if (static_cast<long>(steps.size()) >= fuel) throw out_of_fuel();
            r.trace.push_back({"Beta", s->pos, cur, s->after});
            cur = s->after;
            steps.push_back(std::move(*s));
        }
        r.normal_form = cur;
        Deriv d = type_normal_lambda(cur, atoms);
        for (auto it = steps.rbegin(); it != steps.rend(); ++it) d = subject_expand(d, *it, atoms);
        r.deriv = rebind(d, m);
    } else if (f == Fragment::LambdaS) {
        std::vector<Step> steps;
        Term cur = ls_canon(m);
        for (;;) {
            auto all = ls_steps(cur, false);
            if (all.empty()) break;
            if (static_cast<long>(steps.size()) >= fuel) throw out_of_fuel();
            Step s = all.front();
            r.trace.push_back({s.rule, s.pos, cur, s.after});
            cur = s.after;
            steps.push_back(std::move(s));
        }
        r.normal_form = cur;
        Deriv d = type_normal_ls(cur, atoms);
        for (auto it = steps.rbegin(); it != steps.rend(); ++it) d = subject_expand(d, *it);
        r.deriv = transport(d, m);
    } else {
        throw std::invalid_argument("principal inference covers lambda and lambda-S only");
    }
    r.n = r.deriv->n;
    r.d = tree_degree(r.deriv);
    return r;
}

std::pair<Step, Deriv> most_inefficient_step(const Term& m, const Deriv& d)
{
    auto steps = ls_steps(m, false);
    for (auto& s : steps)
        if (s.rule != "B") throw DerivError("most_inefficient_step: " + print_term(m) + " is not S-normal");
    for (auto& s : steps) {
        Deriv r = subject_reduce(d, s, Fragment::LambdaS);
        if (r->n == d->n - 1) return {s, r};
    }
    throw DerivError("most_inefficient_step: no B step of " + print_term(m) + " removes exactly one application");
}

// LINEAR TRANSLATION

namespace {

Term lxr_term(const Term& m, std::set<std::string>& avoid)
{
    switch (m->kind) {
    case Kind::Var:
        return m;
    case Kind::Abs: {
        Term b = lxr_term(m->a, avoid);
        return abs(m->name, is_free(m->a, m->name) ? b : weak(m->name, b));
    }
    case Kind::App: {
        Term l = lxr_term(m->a, avoid), r = lxr_term(m->b, avoid);
        std::vector<std::string> shared;
        std::set_intersection(m->a->fv.begin(), m->a->fv.end(), m->b->fv.begin(), m->b->fv.end(),
                              std::back_inserter(shared));
        std::vector<std::array<std::string, 3>> cs;
        for (auto& s : shared) {
            std::string s1 = fresh_name(s, avoid);
            avoid.insert(s1);
            std::string s2 = fresh_name(s, avoid);
            avoid.insert(s2);
            l = rename_free(l, s, s1);
            r = rename_free(r, s, s2);
            cs.push_back({s, s1, s2});
        }
        Term out = app(l, r);
        for (auto it = cs.rbegin(); it != cs.rend(); ++it) out = con((*it)[0], (*it)[1], (*it)[2], out);
        return out;
    }
    default:
        throw FragmentError("to_lxr: pure terms only");
    }
}

Deriv lxr_deriv(const Deriv& d, const Term& t)
{
    switch (d->rule) {
    case Rule::Omega:
        return d_omega(t);
    case Rule::Inter:
        return d_inter(lxr_deriv(d->prem[0], t), lxr_deriv(d->prem[1], t));
    case Rule::Var:
        return d_var(t->name, d->type);
    case Rule::Abs: {
        const Term& b = t->a;
        if (b->kind == Kind::Weak && b->name == t->name)
            return d_abs(t->name, d_weak(t->name, d->a, lxr_deriv(d->prem[0], b->a)), d->a);
        return d_abs(t->name, lxr_deriv(d->prem[0], b), d->a);
    }
    case Rule::App: {
        std::vector<Term> cons;
        Term core = t;
        while (core->kind == Kind::Con) {
            cons.push_back(core);
            core = core->a;
        }
        Deriv out = d_app(lxr_deriv(d->prem[0], core->a), lxr_deriv(d->prem[1], core->b));
        for (auto it = cons.rbegin(); it != cons.rend(); ++it) out = d_con((*it)->name, (*it)->y, (*it)->z, out);
        return out;
    }
    default:
        throw DerivError("to_lxr: pure derivations only");
    }
}

}  // namespace

Term to_lxr(const Term& m)
{
    require_fragment(m, Fragment::PureLambda, "to_lxr");
    auto avoid = all_names(m);
    return lxr_term(m, avoid);
}

Deriv to_lxr(const Deriv& d) { return lxr_deriv(d, to_lxr(d->term)); }

}  // namespace isect
