#include "isect/types.hpp"

#include <algorithm>
#include <cctype>

namespace isect {

namespace {

std::string wrap_arrow_side(const Type& t)
{
    return t->kind == TKind::Arrow ? "(" + t->key + ")" : t->key;
}

}  // namespace

Type atom(const std::string& name)
{
    auto n = std::make_shared<TypeNode>();
    n->kind = TKind::Atom;
    n->name = name;
    n->key = "'" + name;
    return n;
}

Type arrow(Type l, Type r)
{
    if (l->kind == TKind::Omega) throw TypeError("arrow domain must not be omega");
    if (!is_f(r)) throw TypeError("arrow codomain must be an F-type: " + r->key);
    auto n = std::make_shared<TypeNode>();
    n->kind = TKind::Arrow;
    n->height = 1 + std::max(l->height, r->height);
    n->key = wrap_arrow_side(l) + " -> " + r->key;
    n->l = std::move(l);
    n->r = std::move(r);
    return n;
}

Type inter_raw(Type l, Type r)
{
    if (l->kind == TKind::Omega || r->kind == TKind::Omega) throw TypeError("intersection with omega component");
    auto n = std::make_shared<TypeNode>();
    n->kind = TKind::Inter;
    n->height = std::max(l->height, r->height);
    std::string rk = r->kind == TKind::Atom ? r->key : "(" + r->key + ")";
    n->key = wrap_arrow_side(l) + " & " + rk;
    n->l = std::move(l);
    n->r = std::move(r);
    return n;
}

Type omega()
{
    static const Type w = [] {
        auto n = std::make_shared<TypeNode>();
        n->kind = TKind::Omega;
        n->height = 0;
        n->key = "w";
        return Type(n);
    }();
    return w;
}

Type inter(const Type& u, const Type& v)
{
    if (u->kind == TKind::Omega) return v;
    if (v->kind == TKind::Omega) return u;
    return inter_raw(u, v);
}

bool is_f(const Type& u) { return u->kind == TKind::Atom || u->kind == TKind::Arrow; }
bool is_omega(const Type& u) { return u->kind == TKind::Omega; }
bool type_eq(const Type& u, const Type& v) { return u == v || u->key == v->key; }

namespace {

void collect(const Type& u, std::vector<Type>& out)
{
    if (u->kind == TKind::Inter) {
        collect(u->l, out);
        collect(u->r, out);
    } else if (u->kind != TKind::Omega) {
        out.push_back(u);
    }
}

std::vector<std::string> sorted_keys(const Type& u)
{
    std::vector<Type> ls = leaves(u);
    std::vector<std::string> ks;
    ks.reserve(ls.size());
    for (auto& t : ls) ks.push_back(t->key);
    std::sort(ks.begin(), ks.end());
    return ks;
}

}  // namespace

std::vector<Type> leaves(const Type& u)
{
    std::vector<Type> out;
    collect(u, out);
    return out;
}

Type inter_of(const std::vector<Type>& fs)
{
    Type t = omega();
    for (auto& f : fs) t = inter(t, f);
    return t;
}

bool equiv(const Type& u, const Type& v) { return sorted_keys(u) == sorted_keys(v); }

bool subtype(const Type& u, const Type& v)
{
    auto a = sorted_keys(u), b = sorted_keys(v);
    return std::includes(a.begin(), a.end(), b.begin(), b.end());
}

int phi(const Type& u)
{
    switch (u->kind) {
    case TKind::Omega:
        return 0;
    case TKind::Inter:
        return phi(u->l) + phi(u->r);
    default:
        return 1;
    }
}

int height(const Type& u) { return u->height; }

bool is_plus(const Type& u)
{
    if (u->kind == TKind::Atom) return true;
    if (u->kind == TKind::Arrow) return is_mm(u->l) && is_plus(u->r);
    return false;
}

bool is_minus(const Type& u)
{
    if (u->kind == TKind::Atom) return true;
    if (u->kind == TKind::Arrow) return is_plus(u->l) && is_minus(u->r);
    return false;
}

bool is_mm(const Type& u)
{
    switch (u->kind) {
    case TKind::Omega:
        return true;
    case TKind::Inter:
        return is_mm(u->l) && is_mm(u->r);
    default:
        return is_minus(u);
    }
}

std::set<Polarity> classify(const Type& u)
{
    std::set<Polarity> out;
    if (is_plus(u)) out.insert(Polarity::Plus);
    if (is_minus(u)) out.insert(Polarity::Minus);
    if (is_mm(u)) out.insert(Polarity::MinusMinus);
    return out;
}

namespace {

int deg_plus(const Type& u);

int deg_minus(const Type& u)
{
    switch (u->kind) {
    case TKind::Atom:
    case TKind::Omega:
        return 0;
    case TKind::Arrow:
        return deg_plus(u->l) + deg_minus(u->r) + 1;
    case TKind::Inter:
        return deg_minus(u->l) + deg_minus(u->r);
    }
    return 0;
}

int deg_plus(const Type& u)
{
    if (u->kind == TKind::Arrow) return deg_minus(u->l) + deg_plus(u->r);
    return 0;
}

}  // namespace

int degree(const Type& u, Polarity p)
{
    switch (p) {
    case Polarity::Plus:
        if (!is_plus(u)) throw TypeError("not a positive type: " + u->key);
        return deg_plus(u);
    case Polarity::Minus:
        if (!is_minus(u)) throw TypeError("not a negative type: " + u->key);
        return deg_minus(u);
    case Polarity::MinusMinus:
        if (!is_mm(u)) throw TypeError("not a doubly negative type: " + u->key);
        return deg_minus(u);
    }
    return 0;
}

// TYPE SYNTAX

namespace {

struct TypeParser {
    const std::string& s;
    std::size_t i = 0;

    void ws()
    {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }

    [[noreturn]] void fail(const std::string& msg)
    {
        throw TypeError("type syntax: " + msg + " at byte " + std::to_string(i));
    }

    Type full()
    {
        Type t = arrows();
        ws();
        if (i != s.size()) fail("trailing input");
        return t;
    }

    Type arrows()
    {
        Type l = inters();
        ws();
        if (s.compare(i, 2, "->") == 0) {
            i += 2;
            Type r = arrows();
            if (is_omega(l)) fail("omega domain");
            return arrow(l, r);
        }
        return l;
    }

    Type inters()
    {
        Type t = atomic();
        for (;;) {
            ws();
            if (i < s.size() && s[i] == '&') {
                ++i;
                t = inter_raw(t, atomic());
            } else {
                return t;
            }
        }
    }

    Type atomic()
    {
        ws();
        if (i >= s.size()) fail("unexpected end");
        if (s[i] == '\'') {
            std::size_t st = ++i;
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
            if (i == st) fail("empty atom name");
            return atom(s.substr(st, i - st));
        }
        if (s[i] == '(') {
            ++i;
            Type t = arrows();
            ws();
            if (i >= s.size() || s[i] != ')') fail("expected ')'");
            ++i;
            return t;
        }
        if (s[i] == 'w' && (i + 1 == s.size() || !std::isalnum(static_cast<unsigned char>(s[i + 1])))) {
            ++i;
            return omega();
        }
        fail("unexpected character");
    }
};

}  // namespace

Type parse_type(const std::string& text)
{
    TypeParser p{text};
    return p.full();
}

std::string print_type(const Type& u) { return u->key; }

// CONTEXTS

Type ctx_get(const Context& g, const std::string& x)
{
    auto it = g.find(x);
    return it == g.end() ? omega() : it->second;
}

Context ctx_set(Context g, const std::string& x, const Type& u)
{
    if (is_omega(u))
        g.erase(x);
    else
        g[x] = u;
    return g;
}

Context ctx_without(Context g, const std::string& x)
{
    g.erase(x);
    return g;
}

Context ctx_inter(const Context& g, const Context& d)
{
    Context out = g;
    for (auto& [x, u] : d) out[x] = inter(ctx_get(g, x), u);
    return out;
}

bool ctx_equiv(const Context& g, const Context& d)
{
    if (g.size() != d.size()) return false;
    for (auto& [x, u] : g)
        if (!equiv(u, ctx_get(d, x))) return false;
    return true;
}

bool ctx_subtype(const Context& g, const Context& d)
{
    for (auto& [x, u] : d)
        if (!subtype(ctx_get(g, x), u)) return false;
    return true;
}

std::string print_ctx(const Context& g)
{
    std::string s;
    for (auto& [x, u] : g) {
        if (!s.empty()) s += ", ";
        s += x + ": " + u->key;
    }
    return s;
}

Type AtomSupply::fresh()
{
    int k = next++;
    std::string name(1, static_cast<char>('a' + k % 26));
    if (k >= 26) name += std::to_string(k / 26);
    return atom(name);
}

}  // namespace isect
