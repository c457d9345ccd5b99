#include "isect/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <map>
#include <random>
#include <unordered_map>
#include <unordered_set>

namespace isect {

// REDUCTION GRAPHS

namespace {

struct GraphNode {
    long best = 0;
    std::optional<Step> via;   // witness step
};

// Longest weighted path over a memoized graph; weight(step) is 0 or 1.
// Budget: fuel nodes, and fuel * 64 term nodes summed over all generated reducts.
class Explorer {
public:
    Explorer(std::function<std::vector<Step>(const Term&)> next, std::function<long(const Step&)> weight, long fuel)
        : next_(std::move(next)), weight_(std::move(weight)), fuel_(fuel)
    {
    }

    long visit(const Term& m)
    {
        std::string key = alpha_key(m);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second.best;
        if (!open_.insert(key).second) throw FuelExhausted("reduction cycle through " + print_term(m), {});
        if (static_cast<long>(memo_.size() + open_.size()) > fuel_)
            throw FuelExhausted("reduction graph exceeds " + std::to_string(fuel_) + " nodes", {});
        GraphNode g;
        auto steps = next_(m);
        for (auto& s : steps) volume_ += s.after->size;
        if (volume_ > 64 * fuel_)
            throw FuelExhausted("reduction graph exceeds " + std::to_string(64 * fuel_) + " term nodes", {});
        for (auto& s : steps) {
            long v = weight_(s) + visit(s.after);
            if (!g.via || v > g.best) {
                g.best = v;
                g.via = s;
            }
        }
        if (steps.empty()) normal_ = m;
        open_.erase(key);
        long best = g.best;
        memo_.emplace(key, std::move(g));
        return best;
    }

    Trace witness(Term m) const
    {
        Trace t;
        for (;;) {
            const GraphNode& g = memo_.at(alpha_key(m));
            if (!g.via) return t;
            t.push_back({g.via->rule, g.via->pos, m, g.via->after});
            m = g.via->after;
        }
    }

    long nodes() const { return static_cast<long>(memo_.size()); }
    const Term& normal() const { return normal_; }

private:
    std::function<std::vector<Step>(const Term&)> next_;
    std::function<long(const Step&)> weight_;
    long fuel_;
    long volume_ = 0;
    std::unordered_map<std::string, GraphNode> memo_;
    std::unordered_set<std::string> open_;
    Term normal_;
};

}  // namespace

Longest longest_beta(const Term& m, long fuel)
{
    require_fragment(m, Fragment::PureLambda, "longest_beta");
    Explorer ex(beta_steps, [](const Step&) { return 1L; }, fuel);
    Longest out;
    out.length = ex.visit(m);
    out.witness = ex.witness(m);
    out.nodes = ex.nodes();
    return out;
}

MaxB max_B_ls(const Term& m, long fuel)
{
    require_fragment(m, Fragment::LambdaS, "max_B_ls");
    Explorer ex([](const Term& t) { return ls_steps(t, false); }, [](const Step& s) { return s.rule == "B" ? 1L : 0L; },
                fuel);
    Term c = ls_canon(m);
    MaxB out;
    out.n1 = ex.visit(c);
    out.normal_form = ex.normal();
    out.n2 = app_count(out.normal_form);
    out.nodes = ex.nodes();
    return out;
}

std::vector<Trace> all_maximal_traces(const Term& m, long max_traces)
{
    bool pure = check_fragment(m, Fragment::PureLambda);
    std::vector<Trace> out;
    Trace cur;
    std::function<void(const Term&)> go = [&](const Term& t) {
        auto steps = pure ? beta_steps(t) : ls_steps(t, false);
        if (steps.empty()) {
            if (static_cast<long>(out.size()) >= max_traces)
                throw FuelExhausted("more than " + std::to_string(max_traces) + " maximal traces", {});
            out.push_back(cur);
            return;
        }
        for (auto& s : steps) {
            cur.push_back({s.rule, s.pos, t, s.after});
            go(s.after);
            cur.pop_back();
        }
    };
    go(pure ? m : ls_canon(m));
    return out;
}

long count_duplications(const Trace& t)
{
    long n = 0;
    for (auto& s : t) {
        if (s.rule == "Beta") {
            Term r = subterm(s.before, s.pos);
            if (r->kind != Kind::App || r->a->kind != Kind::Abs) throw std::invalid_argument("trace step is not a beta redex");
            n += std::max(occurrences(r->a->a, r->a->name) - 1, 0);
        } else if (s.rule == "S-app-both" || s.rule == "S-sub-both" || s.rule == "D") {
            ++n;
        }
    }
    return n;
}

long count_replacements(const Trace& t)
{
    long n = 0;
    for (auto& s : t) {
        if (s.rule == "Beta") {
            Term r = subterm(s.before, s.pos);
            if (r->kind != Kind::App || r->a->kind != Kind::Abs) throw std::invalid_argument("trace step is not a beta redex");
            n += occurrences(r->a->a, r->a->name);
        } else if (s.rule == "SR") {
            ++n;
        }
    }
    return n;
}

// BOUNDED TYPING ENUMERATION

namespace {

// Type schemes over F-variables; intersections are lists kept up to permutation.
struct Tm {
    enum { Var, Atom, Arrow } kind;
    int var = -1;
    std::string atom;
    std::vector<int> dom;
    int cod = -1;
};

struct Proto {
    Kind kind;
    Term term;
    int ty;
    std::vector<int> dom;   // Abs domain components
    std::vector<std::shared_ptr<const Proto>> prem;
};
using PP = std::shared_ptr<const Proto>;

struct Found {};

class Enumerator {
public:
    explicit Enumerator(const EnumBounds& b) : b_(b), inter_left_(b.max_inter), extra_left_(b.max_extra) {}

    void run(const Term& m, const std::function<void(const PP&)>& k) { gen(m, k); }

    int resolve(int t) const
    {
        while (tm_[t].kind == Tm::Var && bind_[tm_[t].var] >= 0) t = bind_[tm_[t].var];
        return t;
    }

    int height(int t) const
    {
        t = resolve(t);
        if (tm_[t].kind != Tm::Arrow) return 1;
        int h = height(tm_[t].cod);
        for (int c : tm_[t].dom) h = std::max(h, height(c));
        return 1 + h;
    }

    int fresh_var()
    {
        bind_.push_back(-1);
        tm_.push_back({Tm::Var, static_cast<int>(bind_.size()) - 1, "", {}, -1});
        return static_cast<int>(tm_.size()) - 1;
    }

    int make_atom(const std::string& a)
    {
        tm_.push_back({Tm::Atom, -1, a, {}, -1});
        return static_cast<int>(tm_.size()) - 1;
    }

    int make_arrow(std::vector<int> dom, int cod)
    {
        tm_.push_back({Tm::Arrow, -1, "", std::move(dom), cod});
        return static_cast<int>(tm_.size()) - 1;
    }

    // from a concrete F-type, atoms rigid
    int from_type(const Type& u)
    {
        if (u->kind == TKind::Atom) return make_atom(u->name);
        std::vector<int> dom;
        for (auto& f : leaves(u->l)) dom.push_back(from_type(f));
        int cod = from_type(u->r);
        return make_arrow(std::move(dom), cod);
    }

    void unify(int a, int b, const std::function<void()>& k)
    {
        a = resolve(a);
        b = resolve(b);
        if (a == b) return k();
        const Tm &ta = tm_[a], &tb = tm_[b];
        if (ta.kind == Tm::Var || tb.kind == Tm::Var) {
            int v = ta.kind == Tm::Var ? ta.var : tb.var;
            int other = ta.kind == Tm::Var ? b : a;
            if (occurs(v, other)) return;
            bind_[v] = other;
            k();
            bind_[v] = -1;
            return;
        }
        if (ta.kind == Tm::Atom || tb.kind == Tm::Atom) {
            if (ta.kind == tb.kind && ta.atom == tb.atom) k();
            return;
        }
        if (ta.dom.size() != tb.dom.size()) return;
        std::vector<int> da = ta.dom, db = tb.dom;
        unify(ta.cod, tb.cod, [&]() {
            std::vector<bool> used(db.size(), false);
            unify_multi(da, db, 0, used, k);
        });
    }

    void unify_multi(const std::vector<int>& a, const std::vector<int>& b, std::size_t i, std::vector<bool>& used,
                     const std::function<void()>& k)
    {
        if (i == a.size()) return k();
        std::set<std::string> tried;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            if (!tried.insert(show(b[j])).second) continue;
            used[j] = true;
            unify(a[i], b[j], [&]() { unify_multi(a, b, i + 1, used, k); });
            used[j] = false;
        }
    }

    std::string show(int t) const
    {
        t = resolve(t);
        const Tm& x = tm_[t];
        if (x.kind == Tm::Var) return "?" + std::to_string(x.var);
        if (x.kind == Tm::Atom) return "'" + x.atom;
        std::vector<std::string> ds;
        for (int c : x.dom) ds.push_back(show(c));
        std::sort(ds.begin(), ds.end());
        std::string s = "(";
        for (auto& d : ds) s += d + "&";
        return s + ")->" + show(x.cod);
    }

    // leaves typing x in p, in traversal order
    void uses(const PP& p, const std::string& x, std::vector<int>& out) const
    {
        if (p->kind == Kind::Var) {
            if (p->term->name == x) out.push_back(p->ty);
            return;
        }
        if (p->kind == Kind::Abs && p->term->name == x) return;
        for (auto& q : p->prem) uses(q, x, out);
    }

    Deriv build(const PP& root, int max_atoms)
    {
        names_.clear();
        name_all(root);
        std::function<Deriv(const PP&)> rec = [&](const PP& p) -> Deriv {
            switch (p->kind) {
            case Kind::Var:
                return d_var(p->term->name, to_type(p->ty, max_atoms));
            case Kind::Abs:
                return d_abs(p->term->name, rec(p->prem[0]), inter_sorted(p->dom, max_atoms));
            default: {
                std::vector<Deriv> copies;
                for (std::size_t i = 1; i < p->prem.size(); ++i) copies.push_back(rec(p->prem[i]));
                std::sort(copies.begin(), copies.end(),
                          [](const Deriv& x, const Deriv& y) { return x->type->key < y->type->key; });
                return d_app(rec(p->prem[0]), d_inter_of(copies, p->term->b));
            }
            }
        };
        return rec(root);
    }

private:
    bool occurs(int v, int t) const
    {
        t = resolve(t);
        const Tm& x = tm_[t];
        if (x.kind == Tm::Var) return x.var == v;
        if (x.kind == Tm::Atom) return false;
        if (occurs(v, x.cod)) return true;
        for (int c : x.dom)
            if (occurs(v, c)) return true;
        return false;
    }

    void tick()
    {
        if (++visited_ > b_.max_nodes)
            throw EnumBudgetExceeded("typing enumeration exceeded " + std::to_string(b_.max_nodes) + " steps");
    }

    void gen(const Term& m, const std::function<void(const PP&)>& k)
    {
        tick();
        switch (m->kind) {
        case Kind::Var: {
            int v = fresh_var();
            k(std::make_shared<Proto>(Proto{Kind::Var, m, v, {}, {}}));
            return;
        }
        case Kind::Abs:
            gen(m->a, [&](const PP& body) {
                std::vector<int> dom;
                uses(body, m->name, dom);
                int base = dom.empty() ? 1 : 0;
                for (int e = 0; e <= extra_left_; ++e) {
                    std::vector<int> d = dom;
                    for (int i = 0; i < base + e; ++i) d.push_back(fresh_var());
                    int ty = make_arrow(d, body->ty);
                    if (height(ty) > b_.max_height) break;
                    extra_left_ -= e;
                    k(std::make_shared<Proto>(Proto{Kind::Abs, m, ty, d, {body}}));
                    extra_left_ += e;
                }
            });
            return;
        case Kind::App:
            gen(m->a, [&](const PP& f) {
                for (int copies = 1; copies <= 1 + inter_left_; ++copies) {
                    inter_left_ -= copies - 1;
                    std::vector<PP> args;
                    gen_copies(m->b, copies, args, [&]() {
                        std::vector<int> dom;
                        for (auto& a : args) dom.push_back(a->ty);
                        int beta = fresh_var();
                        int want = make_arrow(dom, beta);
                        unify(f->ty, want, [&]() {
                            if (height(want) > b_.max_height) return;
                            std::vector<PP> prem = {f};
                            prem.insert(prem.end(), args.begin(), args.end());
                            k(std::make_shared<Proto>(Proto{Kind::App, m, beta, {}, prem}));
                        });
                    });
                    inter_left_ += copies - 1;
                }
            });
            return;
        default:
            throw FragmentError("enum_typings: pure terms only");
        }
    }

    void gen_copies(const Term& m, int left, std::vector<PP>& acc, const std::function<void()>& k)
    {
        if (left == 0) return k();
        gen(m, [&](const PP& p) {
            acc.push_back(p);
            gen_copies(m, left - 1, acc, k);
            acc.pop_back();
        });
    }

    void name_type(int t)
    {
        t = resolve(t);
        const Tm& x = tm_[t];
        if (x.kind == Tm::Var) {
            names_.emplace(x.var, static_cast<int>(names_.size()));
        } else if (x.kind == Tm::Arrow) {
            for (int c : x.dom) name_type(c);
            name_type(x.cod);
        }
    }

    void name_all(const PP& p)
    {
        name_type(p->ty);
        for (auto& q : p->prem) name_all(q);
    }

    Type to_type(int t, int max_atoms)
    {
        t = resolve(t);
        const Tm& x = tm_[t];
        if (x.kind == Tm::Atom) return atom(x.atom);
        if (x.kind == Tm::Var) {
            int k = std::min(names_.at(x.var), std::max(max_atoms, 1) - 1);
            return atom(k < 26 ? std::string(1, static_cast<char>('a' + k)) : "t" + std::to_string(k));
        }
        return arrow(inter_sorted(x.dom, max_atoms), to_type(x.cod, max_atoms));
    }

    Type inter_sorted(const std::vector<int>& dom, int max_atoms)
    {
        std::vector<Type> ts;
        for (int c : dom) ts.push_back(to_type(c, max_atoms));
        std::sort(ts.begin(), ts.end(), [](const Type& a, const Type& b) { return a->key < b->key; });
        return inter_of(ts);
    }

    EnumBounds b_;
    int inter_left_, extra_left_;
    long visited_ = 0;
    std::vector<Tm> tm_;
    std::vector<int> bind_;
    std::map<int, int> names_;
};

}  // namespace

std::vector<Deriv> enum_typings(const Term& m, const EnumBounds& b)
{
    require_fragment(m, Fragment::PureLambda, "enum_typings");
    Enumerator en(b);
    std::vector<Deriv> out;
    std::set<std::string> seen;
    en.run(m, [&](const PP& root) {
        Deriv d = en.build(root, b.max_atoms);
        if (seen.insert(deriv_to_json(d).dump()).second) out.push_back(d);
    });
    return out;
}

bool derivable(const Term& m, const Context& ctx, const Type& type, const EnumBounds& b)
{
    require_fragment(m, Fragment::PureLambda, "derivable");
    if (!is_f(type)) throw std::invalid_argument("derivable: target type must not be an intersection");
    Enumerator en(b);
    std::set<std::string> names(m->fv.begin(), m->fv.end());
    for (auto& [x, u] : ctx) names.insert(x);
    try {
        en.run(m, [&](const PP& root) {
            std::vector<std::pair<std::vector<int>, std::vector<int>>> eqs;
            for (auto& x : names) {
                std::vector<int> mine, theirs;
                en.uses(root, x, mine);
                for (auto& f : leaves(ctx_get(ctx, x))) theirs.push_back(en.from_type(f));
                if (mine.size() != theirs.size()) return;
                eqs.push_back({mine, theirs});
            }
            int target = en.from_type(type);
            std::function<void(std::size_t)> next = [&](std::size_t i) {
                if (i == eqs.size()) throw Found{};
                std::vector<bool> used(eqs[i].second.size(), false);
                en.unify_multi(eqs[i].first, eqs[i].second, 0, used, [&]() { next(i + 1); });
            };
            en.unify(root->ty, target, [&]() { next(0); });
        });
    } catch (const Found&) {
        return true;
    }
    return false;
}

// PREDICTION AND VERIFICATION

const char* calculus_name(Fragment f)
{
    switch (f) {
    case Fragment::PureLambda: return "lambda";
    case Fragment::LambdaS: return "ls";
    case Fragment::LambdaLxr: return "lxr";
    }
    return "?";
}

std::optional<Fragment> parse_calculus(const std::string& s)
{
    if (s == "lambda") return Fragment::PureLambda;
    if (s == "ls") return Fragment::LambdaS;
    if (s == "lxr") return Fragment::LambdaLxr;
    return std::nullopt;
}

namespace {

double ms_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

Report predict(const Term& m, Fragment f, long fuel)
{
    auto t0 = std::chrono::steady_clock::now();
    auto r = infer_principal(m, f, fuel);
    Report out;
    out.term = print_term(m);
    out.calculus = f;
    out.n = r.n;
    out.d = r.d;
    auto ms = measures(r.deriv);
    out.var_count = ms.var_count;
    out.inter_count = ms.inter_count;
    if (f == Fragment::PureLambda) {
        out.longest = r.n - r.d;
    } else {
        out.n2 = app_count(r.normal_form);
        out.n1 = r.n - out.n2;
        out.longest = out.n1;
    }
    out.runtime_ms = ms_since(t0);
    return out;
}

Report verify(const Term& m, Fragment f, long fuel)
{
    auto t0 = std::chrono::steady_clock::now();
    Report out = predict(m, f, 100000);
    if (f == Fragment::PureLambda) {
        auto l = longest_beta(m, fuel);
        out.longest = l.length;
        out.graph_nodes = l.nodes;
        out.agree = out.n - out.d == l.length;
    } else {
        auto b = max_B_ls(m, fuel);
        out.n1 = b.n1;
        out.n2 = b.n2;
        out.longest = b.n1;
        out.graph_nodes = b.nodes;
        out.agree = out.n == b.n1 + b.n2;
    }
    out.runtime_ms = ms_since(t0);
    return out;
}

nlohmann::json report_json(const Report& r, bool timing)
{
    nlohmann::json j = {{"term", r.term},
                        {"calculus", calculus_name(r.calculus)},
                        {"n", r.n},
                        {"d", r.d},
                        {"var_count", r.var_count},
                        {"inter_count", r.inter_count},
                        {"n1", r.n1},
                        {"n2", r.n2},
                        {"longest", r.longest},
                        {"graph_nodes", r.graph_nodes}};
    j["agree"] = r.agree ? nlohmann::json(*r.agree) : nlohmann::json(nullptr);
    j["runtime_ms"] = timing ? nlohmann::json(r.runtime_ms) : nlohmann::json(nullptr);
    return j;
}

// CORPORA

namespace {

const char* binder_names[] = {"x", "y", "z", "u", "v", "w", "p", "q", "r", "s", "t", "k", "m", "n", "o"};

// Random closed terms of an exact size. Half of the applications get an
// abstraction in head position, so redexes are common; dead ends return null.
class Generator {
public:
    Generator(bool with_subst, std::uint64_t seed) : subst_(with_subst), rng_(seed) {}

    Term draw(int s, int d)
    {
        if (s == 1) return d == 0 ? nullptr : var(binder_names[pick(d)]);
        if (s == 2) return lam(s, d);
        unsigned roll = pick(10);
        if (roll < 3) return lam(s, d);
        if (subst_ && roll == 9) {
            int l = 1 + static_cast<int>(pick(static_cast<unsigned>(s - 2)));
            Term body = draw(l, d + 1), arg = draw(s - 1 - l, d);
            return body && arg ? esub(body, binder_names[d], arg) : nullptr;
        }
        bool redex = roll < 6 && s >= 4;
        int lo = redex ? 2 : 1;
        int l = lo + static_cast<int>(pick(static_cast<unsigned>(s - 1 - lo)));
        Term f = redex ? lam(l, d) : draw(l, d), a = draw(s - 1 - l, d);
        return f && a ? app(f, a) : nullptr;
    }

    unsigned pick(unsigned n) { return static_cast<unsigned>(rng_() % n); }

private:
    Term lam(int s, int d)
    {
        if (d >= static_cast<int>(std::size(binder_names))) return nullptr;
        Term b = draw(s - 1, d + 1);
        return b ? abs(binder_names[d], b) : nullptr;
    }

    bool subst_;
    std::mt19937_64 rng_;
};

std::vector<Term> draw_corpus(std::uint64_t seed, int count, int max_size, bool with_subst,
                              const std::function<bool(const Term&)>& keep)
{
    Generator gen(with_subst, seed);
    std::vector<Term> out;
    std::set<std::string> seen;
    const int min_size = std::min(4, max_size);
    for (long attempt = 0; static_cast<int>(out.size()) < count && attempt < 1000L * count; ++attempt) {
        int s = min_size + static_cast<int>(gen.pick(static_cast<unsigned>(max_size - min_size + 1)));
        Term t = gen.draw(s, 0);
        if (!t) continue;
        t = barendregt(t);
        if (!seen.insert(alpha_key(t)).second) continue;
        if (keep(t)) out.push_back(t);
    }
    return out;
}

}  // namespace

std::vector<Term> lambda_corpus(std::uint64_t seed, int count, int max_size, long fuel)
{
    return draw_corpus(seed, count, max_size, false, [&](const Term& t) {
        try {
            longest_beta(t, fuel);
            return true;
        } catch (const FuelExhausted&) {
            return false;
        }
    });
}

std::vector<Term> ls_corpus(std::uint64_t seed, int count, int max_size, long fuel)
{
    return draw_corpus(seed, count, max_size, true, [&](const Term& t) {
        try {
            max_B_ls(t, fuel);
            return true;
        } catch (const FuelExhausted&) {
            return false;
        }
    });
}

}  // namespace isect
