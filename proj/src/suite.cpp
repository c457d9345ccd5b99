#include "isect/suite.hpp"

namespace isect {

namespace {

const char* criterion_names[suite_size] = {
    "lambda: longest beta reduction equals n - d",
    "lambda-S: n equals n1 + n2",
    "normal terms: n equals applications equals degree",
    "subject reduction changes n monotonically",
    "S,W measure decreases and respects the equivalence",
    "duplications versus intersections on (\\x. x x)(\\y. a y y)",
    "lambda-S: variable rules equal replacements plus normal-form variables",
    "weakening a redex shrinks the set of judgements",
    "no enumerated optimal derivation beats the inferred degree",
};

constexpr std::size_t max_failures = 5;

struct Tally {
    long checked = 0;
    std::vector<std::string> failures;

    void fail(const Term& t, const std::string& why) { failures.push_back(print_term(t) + ": " + why); }
    void merge(const Tally& o)
    {
        checked += o.checked;
        failures.insert(failures.end(), o.failures.begin(), o.failures.end());
    }
};

template <class F>
Tally over(const std::vector<Term>& ts, int jobs, F f)
{
    auto parts = parallel_map<Tally>(ts.size(), jobs, [&](std::size_t i) {
        Tally t;
        try {
            f(ts[i], t);
        } catch (const std::exception& e) {
            t.fail(ts[i], e.what());
        }
        return t;
    });
    Tally all;
    for (auto& p : parts) all.merge(p);
    return all;
}

Tally verify_all(const std::vector<Term>& ts, Fragment f, int jobs)
{
    return over(ts, jobs, [f](const Term& m, Tally& t) {
        Report r = verify(m, f);
        ++t.checked;
        if (r.agree != true) {
            nlohmann::json j = report_json(r, false);
            t.fail(m, j.dump());
        }
    });
}

Tally normal_identities(const std::vector<Term>& corpus, int jobs)
{
    std::vector<Term> normals;
    std::set<std::string> seen;
    for (auto& m : corpus) {
        Term nf = normalize(m, Relation::Beta, Strategy::Leftmost, 100000).first;
        for (const Term& t : {m, nf})
            if (is_beta_normal(t) && seen.insert(alpha_key(t)).second) normals.push_back(t);
    }
    return over(normals, jobs, [](const Term& m, Tally& t) {
        auto r = infer_principal(m, Fragment::PureLambda);
        ++t.checked;
        int apps = app_count(m), deg = tree_degree(r.deriv);
        if (r.n != apps || deg != apps)
            t.fail(m, "n=" + std::to_string(r.n) + " apps=" + std::to_string(apps) + " degree=" + std::to_string(deg));
    });
}

void monotone(Tally& t, const Term& m, const Step& s, long before, long after)
{
    ++t.checked;
    bool ok = s.rule == "Beta" || s.rule == "B" ? after < before : s.rule == "W" ? after <= before : after == before;
    if (!ok) t.fail(m, s.rule + "@" + pos_string(s.pos) + " n " + std::to_string(before) + " -> " + std::to_string(after));
}

Tally subject_reduction(const std::vector<Term>& lam, const std::vector<Term>& ls, int jobs)
{
    Tally all = over(lam, jobs, [](const Term& m, Tally& t) {
        auto r = infer_principal(m, Fragment::PureLambda);
        for (auto& s : beta_steps(m)) {
            Deriv d = subject_reduce(r.deriv, s, Fragment::PureLambda);
            check_derivation(d);
            monotone(t, m, s, r.n, d->n);
        }
        Deriv l = to_lxr(r.deriv);
        Term c = lxr_canon(l->term);
        Deriv dc = transport(l, c);
        for (auto& s : lxr_steps(c)) {
            Deriv d = subject_reduce(dc, s, Fragment::LambdaLxr);
            check_derivation(d);
            ++t.checked;
            bool ok = s.rule == "B" ? d->n < dc->n : d->n <= dc->n;
            if (!ok) t.fail(c, s.rule + "@" + pos_string(s.pos));
        }
    });
    all.merge(over(ls, jobs, [](const Term& m, Tally& t) {
        auto r = infer_principal(m, Fragment::LambdaS);
        Term c = ls_canon(m);
        Deriv dc = transport(r.deriv, c);
        for (auto& s : ls_steps(c, true)) {
            Deriv d = subject_reduce(dc, s, Fragment::LambdaS);
            check_derivation(d);
            monotone(t, c, s, dc->n, d->n);
        }
    }));
    return all;
}

Tally sw_decrease(const std::vector<Term>& ls)
{
    Tally t;
    for (auto& m : ls) {
        Term cur = ls_canon(m);
        if (!(sw_measure(cur) == sw_measure(m))) t.fail(m, "measure changes under canonicalization");
        for (int k = 0; k < 50; ++k) {
            auto steps = ls_steps(cur, true);
            if (steps.empty()) break;
            for (auto& s : steps) {
                if (s.rule == "B") continue;
                ++t.checked;
                if (!(sw_measure(s.after) == sw_measure(s.raw))) t.fail(s.raw, "measure changes under canonicalization");
                if (!(sw_measure(s.after) < sw_measure(s.before))) t.fail(s.before, s.rule + " does not decrease");
            }
            cur = steps[static_cast<std::size_t>(k) % steps.size()].after;
        }
    }
    return t;
}

Tally duplication_gap()
{
    Tally t;
    Term m = parse_term("(\\x. x x)(\\y. a y y)");
    for (auto& tr : all_maximal_traces(m)) {
        ++t.checked;
        long dup = count_duplications(tr);
        if (dup != 2) t.fail(m, "a maximal trace has " + std::to_string(dup) + " duplications");
    }
    EnumBounds b;
    b.max_height = 5;
    b.max_atoms = 3;
    auto ds = enum_typings(m, b);
    if (ds.empty()) t.fail(m, "no derivation enumerated");
    for (auto& d : ds) {
        ++t.checked;
        if (measures(d).inter_count < 3) t.fail(m, "derivation with " + std::to_string(measures(d).inter_count) + " intersections");
    }
    return t;
}

Tally replacements(const std::vector<Term>& ls, int jobs)
{
    return over(ls, jobs, [](const Term& m, Tally& t) {
        auto r = infer_principal(m, Fragment::LambdaS);
        ++t.checked;
        long vars = measures(r.deriv).var_count;
        long sr = count_replacements(r.trace);
        long nfv = var_occurrences(r.normal_form);
        if (vars != sr + nfv)
            t.fail(m, "vars=" + std::to_string(vars) + " SR=" + std::to_string(sr) + " nf vars=" + std::to_string(nfv));
    });
}

Tally strict_inclusion()
{
    Tally t;
    Context g = ctx_set({}, "a", parse_type("'t"));
    Type target = parse_type("'s -> 't");
    Term reduct = parse_term("\\z. a"), redex = parse_term("\\z. (\\y. a)(z z)");
    t.checked = 2;
    if (!derivable(reduct, g, target)) t.fail(reduct, "judgement not derivable");
    if (derivable(redex, g, target)) t.fail(redex, "judgement derivable");
    return t;
}

Tally principality(std::uint64_t seed)
{
    Tally t;
    for (auto& m : lambda_corpus(seed, 15, 6)) {
        auto r = infer_principal(m, Fragment::PureLambda);
        std::vector<Deriv> ds;
        try {
            ds = enum_typings(m);
        } catch (const EnumBudgetExceeded&) {
            continue;
        }
        if (!is_optimal(r.deriv)) t.fail(m, "inferred derivation is not optimal");
        int least = -1;
        for (auto& d : ds)
            if (is_optimal(d) && (least < 0 || tree_degree(d) < least)) least = tree_degree(d);
        if (least < 0) continue;   // nothing to compare against
        ++t.checked;
        if (least < r.d) t.fail(m, "optimal derivation of degree " + std::to_string(least) + " below " + std::to_string(r.d));
    }
    return t;
}

}  // namespace

CriterionResult run_criterion(int id, const SuiteOptions& o)
{
    if (id < 1 || id > suite_size) throw std::invalid_argument("no criterion " + std::to_string(id));
    CriterionResult out;
    out.id = id;
    out.name = criterion_names[id - 1];
    auto lam = [&]() { return lambda_corpus(o.seed, o.lambda_terms, 12); };
    auto ls = [&]() { return ls_corpus(o.seed, o.ls_terms, 10); };
    Tally t;
    long need = 1;
    try {
        switch (id) {
        case 1: t = verify_all(lam(), Fragment::PureLambda, o.jobs); need = 50; break;
        case 2: t = verify_all(ls(), Fragment::LambdaS, o.jobs); need = 50; break;
        case 3: t = normal_identities(lam(), o.jobs); break;
        case 4: t = subject_reduction(lam(), ls(), o.jobs); break;
        case 5: t = sw_decrease(ls_corpus(o.seed, 4 * o.ls_terms, 10)); need = 200; break;
        case 6: t = duplication_gap(); break;
        case 7: t = replacements(ls(), o.jobs); need = 50; break;
        case 8: t = strict_inclusion(); need = 2; break;
        case 9: t = principality(o.seed); need = 10; break;
        }
    } catch (const std::exception& e) {
        t.failures.push_back(e.what());
    }
    out.checked = t.checked;
    if (t.checked < need) t.failures.push_back("only " + std::to_string(t.checked) + " cases checked, need " + std::to_string(need));
    out.pass = t.failures.empty();
    if (t.failures.size() > max_failures) t.failures.resize(max_failures);
    out.failures = std::move(t.failures);
    return out;
}

std::vector<CriterionResult> run_suite(const SuiteOptions& o)
{
    std::vector<CriterionResult> out;
    for (int i = 1; i <= suite_size; ++i) out.push_back(run_criterion(i, o));
    return out;
}

nlohmann::json suite_json(const std::vector<CriterionResult>& rs, const SuiteOptions& o)
{
    nlohmann::json cs = nlohmann::json::array();
    bool all = true;
    for (auto& r : rs) {
        cs.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"checked", r.checked}, {"failures", r.failures}});
        all = all && r.pass;
    }
    return {{"seed", o.seed}, {"pass", all}, {"criteria", cs}};
}

}  // namespace isect
