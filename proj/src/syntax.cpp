#include "isect/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>

namespace isect {

namespace {

std::vector<std::string> merge_fv(const std::vector<std::string>& a, const std::vector<std::string>& b)
{
    std::vector<std::string> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

std::vector<std::string> without(const std::vector<std::string>& a, const std::string& x)
{
    std::vector<std::string> out;
    out.reserve(a.size());
    for (auto& s : a)
        if (s != x) out.push_back(s);
    return out;
}

bool contains(const std::vector<std::string>& a, const std::string& x)
{
    return std::binary_search(a.begin(), a.end(), x);
}

std::vector<std::string> with(const std::vector<std::string>& a, const std::string& x)
{
    return merge_fv(a, {x});
}

}  // namespace

Term var(const std::string& x)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::Var;
    n->name = x;
    n->fv = {x};
    return n;
}

Term abs(const std::string& x, Term body)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::Abs;
    n->name = x;
    n->fv = without(body->fv, x);
    n->size = 1 + body->size;
    n->a = std::move(body);
    return n;
}

Term app(Term f, Term a)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::App;
    n->fv = merge_fv(f->fv, a->fv);
    n->size = 1 + f->size + a->size;
    n->a = std::move(f);
    n->b = std::move(a);
    return n;
}

Term esub(Term body, const std::string& x, Term arg)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::ESub;
    n->name = x;
    n->fv = merge_fv(without(body->fv, x), arg->fv);
    n->size = 1 + body->size + arg->size;
    n->a = std::move(body);
    n->b = std::move(arg);
    return n;
}

Term weak(const std::string& x, Term body)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::Weak;
    n->name = x;
    n->fv = with(body->fv, x);
    n->size = 1 + body->size;
    n->a = std::move(body);
    return n;
}

Term con(const std::string& x, const std::string& y, const std::string& z, Term body)
{
    auto n = std::make_shared<Node>();
    n->kind = Kind::Con;
    n->name = x;
    n->y = y;
    n->z = z;
    if (contains(body->fv, y) || contains(body->fv, z))
        n->fv = with(without(without(body->fv, y), z), x);
    else
        n->fv = body->fv;
    n->size = 1 + body->size;
    n->a = std::move(body);
    return n;
}

ParseError::ParseError(const std::string& msg, std::size_t off)
    : std::runtime_error(msg + " at byte " + std::to_string(off)), offset(off)
{
}

// PARSER

namespace {

struct Parser {
    const std::string& s;
    std::size_t i = 0;

    explicit Parser(const std::string& text) : s(text) {}

    void ws()
    {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\n' || s[i] == '\r')) ++i;
    }

    [[noreturn]] void fail(const std::string& msg) { throw ParseError(msg, i); }

    bool at_lambda()
    {
        ws();
        if (i < s.size() && s[i] == '\\') return true;
        return s.compare(i, 2, "\xCE\xBB") == 0;
    }

    bool at_keyword(char k)
    {
        ws();
        return i + 1 < s.size() && s[i] == k && s[i + 1] == '[';
    }

    bool at_ident()
    {
        ws();
        return i < s.size() && s[i] >= 'a' && s[i] <= 'z';
    }

    bool at(char c)
    {
        ws();
        return i < s.size() && s[i] == c;
    }

    void expect(const char* tok)
    {
        ws();
        std::string t(tok);
        if (s.compare(i, t.size(), t) != 0) fail("expected '" + t + "'");
        i += t.size();
    }

    std::string ident()
    {
        if (!at_ident()) fail("expected variable");
        std::size_t start = i;
        ++i;
        while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' || s[i] == '\''))
            ++i;
        return s.substr(start, i - start);
    }

    Term term()
    {
        if (at_lambda()) {
            i += (s[i] == '\\') ? 1 : 2;
            std::vector<std::string> xs;
            xs.push_back(ident());
            while (at_ident()) xs.push_back(ident());
            expect(".");
            Term body = term();
            for (auto it = xs.rbegin(); it != xs.rend(); ++it) body = abs(*it, body);
            return body;
        }
        if (at_keyword('W')) {
            i += 2;
            std::string x = ident();
            expect("]");
            return weak(x, term());
        }
        if (at_keyword('C')) {
            i += 2;
            std::string x = ident();
            expect("<");
            std::string y = ident();
            expect(",");
            std::string z = ident();
            expect("]");
            return con(x, y, z, term());
        }
        return application();
    }

    bool at_prefix_form() { return at_lambda() || at_keyword('W') || at_keyword('C'); }

    Term application()
    {
        Term t = postfix();
        for (;;) {
            if (at_prefix_form()) return app(t, term());
            if (at('(') || at_ident())
                t = app(t, postfix());
            else
                return t;
        }
    }

    Term postfix()
    {
        Term t = atom();
        while (at('[')) {
            ++i;
            std::string x = ident();
            expect(":=");
            Term n = term();
            expect("]");
            t = esub(t, x, n);
        }
        return t;
    }

    Term atom()
    {
        if (at_ident()) return var(ident());
        if (at('(')) {
            ++i;
            Term t = term();
            expect(")");
            return t;
        }
        ws();
        if (i >= s.size()) fail("unexpected end of input");
        fail("unexpected character");
    }
};

}  // namespace

Term parse_term_raw(const std::string& text)
{
    Parser p(text);
    Term t = p.term();
    p.ws();
    if (p.i != text.size()) p.fail("trailing input");
    return t;
}

Term parse_term(const std::string& text) { return barendregt(parse_term_raw(text)); }

// PRINTER

namespace {

void print_rec(const Term& t, int level, std::string& out)
{
    switch (t->kind) {
    case Kind::Var:
        out += t->name;
        return;
    case Kind::Abs:
    case Kind::Weak:
    case Kind::Con: {
        if (level > 0) out += '(';
        if (t->kind == Kind::Abs)
            out += "\\" + t->name + ". ";
        else if (t->kind == Kind::Weak)
            out += "W[" + t->name + "] ";
        else
            out += "C[" + t->name + " < " + t->y + ", " + t->z + "] ";
        print_rec(t->a, 0, out);
        if (level > 0) out += ')';
        return;
    }
    case Kind::App:
        if (level == 2) out += '(';
        print_rec(t->a, 1, out);
        out += ' ';
        print_rec(t->b, 2, out);
        if (level == 2) out += ')';
        return;
    case Kind::ESub:
        print_rec(t->a, 2, out);
        out += "[" + t->name + " := ";
        print_rec(t->b, 0, out);
        out += "]";
        return;
    }
}

}  // namespace

std::string print_term(const Term& m)
{
    std::string out;
    print_rec(m, 0, out);
    return out;
}

std::string pos_string(const Pos& p)
{
    std::string s;
    for (int c : p) s += std::to_string(c);
    return s.empty() ? "e" : s;
}

// VARIABLES

const std::vector<std::string>& free_vars(const Term& m) { return m->fv; }

bool is_free(const Term& m, const std::string& x) { return contains(m->fv, x); }

std::set<std::string> all_names(const Term& m)
{
    std::set<std::string> out;
    std::function<void(const Term&)> go = [&](const Term& t) {
        if (!t->name.empty()) out.insert(t->name);
        if (t->kind == Kind::Con) {
            out.insert(t->y);
            out.insert(t->z);
        }
        if (t->a) go(t->a);
        if (t->b) go(t->b);
    };
    go(m);
    return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid)
{
    std::string root = base;
    auto us = root.find('_');
    if (us != std::string::npos && us > 0) root = root.substr(0, us);
    for (int k = 1;; ++k) {
        std::string cand = root + "_" + std::to_string(k);
        if (!avoid.count(cand)) return cand;
    }
}

bool is_linear(const Term& m)
{
    switch (m->kind) {
    case Kind::Var:
        return true;
    case Kind::App: {
        if (!is_linear(m->a) || !is_linear(m->b)) return false;
        for (auto& v : m->a->fv)
            if (contains(m->b->fv, v)) return false;
        return true;
    }
    case Kind::Abs:
        return is_linear(m->a) && is_free(m->a, m->name);
    case Kind::ESub: {
        if (!is_linear(m->a) || !is_linear(m->b) || !is_free(m->a, m->name)) return false;
        for (auto& v : m->a->fv)
            if (v != m->name && contains(m->b->fv, v)) return false;
        return true;
    }
    case Kind::Weak:
        return is_linear(m->a) && !is_free(m->a, m->name);
    case Kind::Con:
        return is_linear(m->a) && is_free(m->a, m->y) && is_free(m->a, m->z) && !is_free(m->a, m->name);
    }
    return false;
}

namespace {

bool only_kinds(const Term& m, bool allow_esub)
{
    switch (m->kind) {
    case Kind::Var:
        return true;
    case Kind::Abs:
        return only_kinds(m->a, allow_esub);
    case Kind::App:
        return only_kinds(m->a, allow_esub) && only_kinds(m->b, allow_esub);
    case Kind::ESub:
        return allow_esub && only_kinds(m->a, allow_esub) && only_kinds(m->b, allow_esub);
    default:
        return false;
    }
}

}  // namespace

bool check_fragment(const Term& m, Fragment f)
{
    switch (f) {
    case Fragment::PureLambda:
        return only_kinds(m, false);
    case Fragment::LambdaS:
        return only_kinds(m, true);
    case Fragment::LambdaLxr:
        return is_linear(m);
    }
    return false;
}

void require_fragment(const Term& m, Fragment f, const char* op)
{
    if (!check_fragment(m, f)) {
        const char* fname = f == Fragment::PureLambda ? "pure lambda" : f == Fragment::LambdaS ? "lambda-S" : "lambda-lxr";
        throw FragmentError(std::string(op) + ": term is not in the " + fname + " fragment: " + print_term(m));
    }
}

// EQUALITY

bool term_eq(const Term& m, const Term& n)
{
    if (m == n) return true;
    if (m->kind != n->kind || m->name != n->name || m->size != n->size) return false;
    if (m->kind == Kind::Con && (m->y != n->y || m->z != n->z)) return false;
    if (m->a && !term_eq(m->a, n->a)) return false;
    if (m->b && !term_eq(m->b, n->b)) return false;
    return true;
}

namespace {

void key_rec(const Term& t, std::vector<std::string>& scope, std::string& out)
{
    auto ref = [&](const std::string& x) {
        for (std::size_t k = scope.size(); k-- > 0;)
            if (scope[k] == x) {
                out += '#';
                out += std::to_string(scope.size() - 1 - k);
                return;
            }
        out += x;
    };
    switch (t->kind) {
    case Kind::Var:
        ref(t->name);
        return;
    case Kind::Abs:
        out += "(\\ ";
        scope.push_back(t->name);
        key_rec(t->a, scope, out);
        scope.pop_back();
        out += ')';
        return;
    case Kind::App:
        out += '(';
        key_rec(t->a, scope, out);
        out += ' ';
        key_rec(t->b, scope, out);
        out += ')';
        return;
    case Kind::ESub:
        out += "([";
        key_rec(t->b, scope, out);
        out += "] ";
        scope.push_back(t->name);
        key_rec(t->a, scope, out);
        scope.pop_back();
        out += ')';
        return;
    case Kind::Weak:
        out += "(W ";
        ref(t->name);
        out += ' ';
        key_rec(t->a, scope, out);
        out += ')';
        return;
    case Kind::Con:
        out += "(C ";
        ref(t->name);
        out += ' ';
        scope.push_back(t->y);
        scope.push_back(t->z);
        key_rec(t->a, scope, out);
        scope.pop_back();
        scope.pop_back();
        out += ')';
        return;
    }
}

}  // namespace

std::string alpha_key_in(const Term& m, std::vector<std::string>& scope)
{
    std::string out;
    key_rec(m, scope, out);
    return out;
}

std::string alpha_key(const Term& m)
{
    std::vector<std::string> scope;
    return alpha_key_in(m, scope);
}

bool alpha_eq(const Term& m, const Term& n) { return term_eq(m, n) || alpha_key(m) == alpha_key(n); }

// SUBSTITUTION

namespace {

std::string as_var(const Term& n, const char* where)
{
    if (n->kind != Kind::Var) throw std::invalid_argument(std::string("cannot substitute a non-variable into ") + where);
    return n->name;
}

Term subst_any(const Term& m, const std::string& x, const Term& n);

// body under binder b, substituting x := n; renames b when it would capture
std::pair<std::string, Term> under_binder(const std::string& b, const Term& body, const std::string& x, const Term& n)
{
    if (b == x || !is_free(body, x)) return {b, body};
    if (!is_free(n, b)) return {b, subst_any(body, x, n)};
    std::set<std::string> avoid = all_names(body);
    for (auto& v : n->fv) avoid.insert(v);
    avoid.insert(x);
    std::string b2 = fresh_name(b, avoid);
    return {b2, subst_any(subst_any(body, b, var(b2)), x, n)};
}

Term subst_any(const Term& m, const std::string& x, const Term& n)
{
    if (!is_free(m, x)) return m;
    switch (m->kind) {
    case Kind::Var:
        return n;
    case Kind::App:
        return app(subst_any(m->a, x, n), subst_any(m->b, x, n));
    case Kind::Abs: {
        auto [b, body] = under_binder(m->name, m->a, x, n);
        return abs(b, body);
    }
    case Kind::ESub: {
        auto [b, body] = under_binder(m->name, m->a, x, n);
        return esub(body, b, subst_any(m->b, x, n));
    }
    case Kind::Weak: {
        std::string w = m->name == x ? as_var(n, "a weakening") : m->name;
        return weak(w, subst_any(m->a, x, n));
    }
    case Kind::Con: {
        std::string w = m->name == x ? as_var(n, "a contraction") : m->name;
        std::string y = m->y, z = m->z;
        Term body = m->a;
        if (y != x && z != x && is_free(body, x)) {
            std::set<std::string> avoid = all_names(body);
            for (auto& v : n->fv) avoid.insert(v);
            avoid.insert(x);
            avoid.insert(w);
            if (is_free(n, y)) {
                std::string y2 = fresh_name(y, avoid);
                avoid.insert(y2);
                body = subst_any(body, y, var(y2));
                y = y2;
            }
            if (is_free(n, z)) {
                std::string z2 = fresh_name(z, avoid);
                body = subst_any(body, z, var(z2));
                z = z2;
            }
            body = subst_any(body, x, n);
        }
        return con(w, y, z, body);
    }
    }
    return m;
}

}  // namespace

Term capture_subst(const Term& m, const std::string& x, const Term& n)
{
    require_fragment(m, Fragment::PureLambda, "capture_subst");
    require_fragment(n, Fragment::PureLambda, "capture_subst");
    return subst_any(m, x, n);
}

Term rename_free(const Term& m, const std::string& x, const std::string& y)
{
    if (x == y) return m;
    return subst_any(m, x, var(y));
}

namespace {

struct Fresher {
    std::set<std::string> avoid;
    std::string operator()(const std::string& base)
    {
        std::string f = fresh_name(base, avoid);
        avoid.insert(f);
        return f;
    }
};

Term bar_rec(const Term& t, std::set<std::string>& scope, std::map<std::string, std::string>& ren, Fresher& fr)
{
    auto look = [&](const std::string& x) {
        auto it = ren.find(x);
        return it == ren.end() ? x : it->second;
    };
    // binder b for the duration of f
    auto bind = [&](const std::string& b, auto&& f) {
        std::string nb = scope.count(b) ? fr(b) : b;
        auto saved = ren.find(b) == ren.end() ? std::optional<std::string>() : std::optional<std::string>(ren[b]);
        ren[b] = nb;
        bool added = scope.insert(nb).second;
        auto r = f(nb);
        if (added) scope.erase(nb);
        if (saved)
            ren[b] = *saved;
        else
            ren.erase(b);
        return r;
    };
    switch (t->kind) {
    case Kind::Var: {
        std::string x = look(t->name);
        return x == t->name ? t : var(x);
    }
    case Kind::Abs:
        return bind(t->name, [&](const std::string& nb) { return abs(nb, bar_rec(t->a, scope, ren, fr)); });
    case Kind::App:
        return app(bar_rec(t->a, scope, ren, fr), bar_rec(t->b, scope, ren, fr));
    case Kind::ESub: {
        Term arg = bar_rec(t->b, scope, ren, fr);
        return bind(t->name, [&](const std::string& nb) { return esub(bar_rec(t->a, scope, ren, fr), nb, arg); });
    }
    case Kind::Weak:
        return weak(look(t->name), bar_rec(t->a, scope, ren, fr));
    case Kind::Con: {
        std::string x = look(t->name);
        return bind(t->y, [&](const std::string& ny) {
            return bind(t->z, [&](const std::string& nz) { return con(x, ny, nz, bar_rec(t->a, scope, ren, fr)); });
        });
    }
    }
    return t;
}

}  // namespace

Term barendregt(const Term& m)
{
    std::set<std::string> scope(m->fv.begin(), m->fv.end());
    std::map<std::string, std::string> ren;
    Fresher fr{all_names(m)};
    return bar_rec(m, scope, ren, fr);
}

// COUNTS AND POSITIONS

int app_count(const Term& m)
{
    int c = m->kind == Kind::App ? 1 : 0;
    if (m->a) c += app_count(m->a);
    if (m->b) c += app_count(m->b);
    return c;
}

int var_occurrences(const Term& m)
{
    if (m->kind == Kind::Var) return 1;
    int c = 0;
    if (m->a) c += var_occurrences(m->a);
    if (m->b) c += var_occurrences(m->b);
    return c;
}

int occurrences(const Term& m, const std::string& x)
{
    if (!is_free(m, x)) return 0;
    switch (m->kind) {
    case Kind::Var:
        return 1;
    case Kind::Abs:
        return occurrences(m->a, x);
    case Kind::App:
        return occurrences(m->a, x) + occurrences(m->b, x);
    case Kind::ESub:
        return (m->name == x ? 0 : occurrences(m->a, x)) + occurrences(m->b, x);
    case Kind::Weak:
        return (m->name == x ? 1 : 0) + occurrences(m->a, x);
    case Kind::Con:
        return (m->name == x ? 1 : 0) + ((m->y == x || m->z == x) ? 0 : occurrences(m->a, x));
    }
    return 0;
}

Term subterm(const Term& m, const Pos& p)
{
    Term t = m;
    for (int c : p) {
        Term next = c == 0 ? t->a : t->b;
        if (!next) throw std::out_of_range("bad position " + pos_string(p));
        t = next;
    }
    return t;
}

namespace {

Term rebuild(const Term& t, const Term& a, const Term& b)
{
    switch (t->kind) {
    case Kind::Var:
        return t;
    case Kind::Abs:
        return abs(t->name, a);
    case Kind::App:
        return app(a, b);
    case Kind::ESub:
        return esub(a, t->name, b);
    case Kind::Weak:
        return weak(t->name, a);
    case Kind::Con:
        return con(t->name, t->y, t->z, a);
    }
    return t;
}

Term replace_rec(const Term& t, const Pos& p, std::size_t k, const Term& n)
{
    if (k == p.size()) return n;
    if (p[k] == 0) {
        if (!t->a) throw std::out_of_range("bad position " + pos_string(p));
        return rebuild(t, replace_rec(t->a, p, k + 1, n), t->b);
    }
    if (!t->b) throw std::out_of_range("bad position " + pos_string(p));
    return rebuild(t, t->a, replace_rec(t->b, p, k + 1, n));
}

}  // namespace

Term replace_at(const Term& m, const Pos& p, const Term& n) { return replace_rec(m, p, 0, n); }

bool is_beta_normal(const Term& m)
{
    if (m->kind == Kind::App && m->a->kind == Kind::Abs) return false;
    if (m->a && !is_beta_normal(m->a)) return false;
    if (m->b && !is_beta_normal(m->b)) return false;
    return true;
}

bool is_accumulator(const Term& m, std::string* head)
{
    Term t = m;
    while (t->kind == Kind::App) t = t->a;
    if (t->kind != Kind::Var) return false;
    if (head) *head = t->name;
    return true;
}

}  // namespace isect
