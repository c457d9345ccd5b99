#include "isect/suite.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace isect;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string input;
    std::string calculus = "lambda";
    std::string relation = "beta";
    std::string strategy = "leftmost";
    long fuel = 10000;
    bool json = false;
    bool timing = false;
    int jobs = 1;
    std::uint64_t seed = 17;
    int size = 12;
    int count = 50;
};

// "@path" reads one term per line, '#' starting a comment
std::vector<std::string> read_inputs(const std::string& arg)
{
    if (arg.empty() || arg[0] != '@') return {arg};
    std::ifstream in(arg.substr(1));
    if (!in) throw UsageError("cannot read " + arg.substr(1));
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        out.push_back(line.substr(b, line.find_last_not_of(" \t\r") + 1 - b));
    }
    return out;
}

std::string read_file_or_arg(const std::string& arg)
{
    if (arg.empty() || arg[0] != '@') return arg;
    std::ifstream in(arg.substr(1));
    if (!in) throw UsageError("cannot read " + arg.substr(1));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Term one_term(const Options& o)
{
    auto ts = read_inputs(o.input);
    if (ts.size() != 1) throw UsageError("expected exactly one term, got " + std::to_string(ts.size()));
    return parse_term(ts[0]);
}

Fragment calculus(const Options& o)
{
    auto f = parse_calculus(o.calculus);
    if (!f) throw UsageError("unknown calculus " + o.calculus);
    return *f;
}

Relation relation(const Options& o)
{
    for (Relation r : {Relation::Beta, Relation::BS, Relation::BSW, Relation::Lxr})
        if (o.relation == relation_name(r)) return r;
    throw UsageError("unknown relation " + o.relation);
}

Strategy strategy(const Options& o)
{
    for (Strategy s : {Strategy::Perpetual, Strategy::Leftmost, Strategy::Safe})
        if (o.strategy == strategy_name(s)) return s;
    throw UsageError("unknown strategy " + o.strategy);
}

void emit(const Options& o, const nlohmann::json& j)
{
    if (o.json) {
        std::cout << j.dump() << "\n";
        return;
    }
    for (auto& [k, v] : j.items()) std::cout << std::left << std::setw(14) << k << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
}

int cmd_check(const Options& o)
{
    Term m = one_term(o);
    nlohmann::json j = {{"term", print_term(m)},
                        {"size", m->size},
                        {"free", free_vars(m)},
                        {"lambda", check_fragment(m, Fragment::PureLambda)},
                        {"ls", check_fragment(m, Fragment::LambdaS)},
                        {"lxr", check_fragment(m, Fragment::LambdaLxr)},
                        {"linear", is_linear(m)}};
    emit(o, j);
    return check_fragment(m, calculus(o)) ? 0 : 1;
}

int cmd_normalize(const Options& o)
{
    Term m = one_term(o);
    auto [nf, tr] = normalize(m, relation(o), strategy(o), o.fuel);
    emit(o, {{"term", print_term(m)}, {"normal_form", print_term(nf)}, {"steps", tr.size()}});
    return 0;
}

void print_trace(const Options& o, const Term& m, const Trace& tr)
{
    if (o.json) {
        std::cout << trace_jsonl(tr);
        return;
    }
    std::cout << print_term(m) << "\n";
    for (auto& s : tr) std::cout << "  -> " << std::left << std::setw(12) << s.rule << std::setw(10) << pos_string(s.pos) << print_term(s.after) << "\n";
}

int cmd_trace(const Options& o)
{
    Term m = one_term(o);
    try {
        print_trace(o, m, normalize(m, relation(o), strategy(o), o.fuel).second);
    } catch (const FuelExhausted& e) {
        print_trace(o, m, e.partial);
        throw;
    }
    return 0;
}

int cmd_infer(const Options& o)
{
    Term m = one_term(o);
    Fragment f = calculus(o);
    Deriv d;
    int n, deg;
    if (f == Fragment::LambdaLxr) {
        // principal typing of the pure source, carried along the linear translation
        auto r = infer_principal(m, Fragment::PureLambda, o.fuel);
        d = to_lxr(r.deriv);
        n = d->n;
        deg = tree_degree(d);
    } else {
        auto r = infer_principal(m, f, o.fuel);
        d = r.deriv;
        n = r.n;
        deg = r.d;
    }
    auto ms = measures(d);
    nlohmann::json j = {{"term", print_term(d->term)},
                        {"calculus", calculus_name(f)},
                        {"n", n},
                        {"d", deg},
                        {"var_count", ms.var_count},
                        {"inter_count", ms.inter_count},
                        {"context", print_ctx(d->ctx)},
                        {"type", print_type(d->type)}};
    if (o.json) {
        j["derivation"] = deriv_to_json(d);
        std::cout << j.dump() << "\n";
    } else {
        emit(o, j);
        std::cout << print_deriv(d);
    }
    return 0;
}

int cmd_measure(const Options& o)
{
    Deriv d;
    try {
        d = deriv_from_json(nlohmann::json::parse(read_file_or_arg(o.input)));
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("bad derivation json: ") + e.what());
    }
    auto jd = check_derivation(d);
    emit(o, {{"term", print_term(jd.term)},
             {"context", print_ctx(jd.ctx)},
             {"type", print_type(jd.type)},
             {"n", jd.measures.app_count},
             {"var_count", jd.measures.var_count},
             {"inter_count", jd.measures.inter_count},
             {"d", tree_degree(d)},
             {"optimal", is_optimal(d)}});
    return 0;
}

int reports(const Options& o, bool check)
{
    Fragment f = calculus(o);
    auto inputs = read_inputs(o.input);
    std::vector<Term> ts;
    for (auto& s : inputs) ts.push_back(parse_term(s));
    auto rs = parallel_map<Report>(ts.size(), o.jobs, [&](std::size_t i) {
        return check ? verify(ts[i], f, o.fuel) : predict(ts[i], f, o.fuel);
    });
    bool ok = true;
    for (auto& r : rs) ok = ok && r.agree.value_or(true);
    bool batch = !o.input.empty() && o.input[0] == '@';
    if (o.json) {
        if (!batch) {
            std::cout << report_json(rs[0], o.timing).dump() << "\n";
        } else {
            nlohmann::json arr = nlohmann::json::array();
            for (auto& r : rs) arr.push_back(report_json(r, o.timing));
            std::cout << arr.dump() << "\n";
        }
    } else if (!batch) {
        emit(o, report_json(rs[0], o.timing));
    } else {
        std::cout << std::left << std::setw(6) << "n" << std::setw(6) << "d" << std::setw(6) << "n1" << std::setw(6) << "n2"
                  << std::setw(9) << "longest" << std::setw(7) << "agree" << "term\n";
        for (auto& r : rs)
            std::cout << std::setw(6) << r.n << std::setw(6) << r.d << std::setw(6) << r.n1 << std::setw(6) << r.n2 << std::setw(9)
                      << r.longest << std::setw(7) << (r.agree ? (*r.agree ? "yes" : "NO") : "-") << r.term << "\n";
    }
    return ok ? 0 : 1;
}

int cmd_corpus(const Options& o)
{
    Fragment f = calculus(o);
    if (f == Fragment::LambdaLxr) throw UsageError("corpus: lambda or ls only");
    auto ts = f == Fragment::PureLambda ? lambda_corpus(o.seed, o.count, o.size, o.fuel) : ls_corpus(o.seed, o.count, o.size, o.fuel);
    if (o.json) {
        nlohmann::json arr = nlohmann::json::array();
        for (auto& t : ts) arr.push_back(print_term(t));
        std::cout << nlohmann::json{{"seed", o.seed}, {"calculus", calculus_name(f)}, {"size", o.size}, {"terms", arr}}.dump() << "\n";
        return 0;
    }
    std::cout << "# calculus " << calculus_name(f) << " seed " << o.seed << " size " << o.size << " count " << ts.size() << "\n";
    for (auto& t : ts) std::cout << print_term(t) << "\n";
    return 0;
}

int cmd_test(const Options& o)
{
    SuiteOptions so;
    so.seed = o.seed;
    so.jobs = o.jobs;
    auto t0 = std::chrono::steady_clock::now();
    auto rs = run_suite(so);
    nlohmann::json j = suite_json(rs, so);
    if (o.timing) j["runtime_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (o.json) {
        std::cout << j.dump() << "\n";
    } else {
        for (auto& r : rs) {
            std::cout << (r.pass ? "PASS " : "FAIL ") << r.id << "  " << r.name << "  (" << r.checked << " checked)\n";
            for (auto& f : r.failures) std::cout << "     " << f << "\n";
        }
    }
    return j["pass"].get<bool>() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"intersection types, reduction lengths and their oracles"};
    app.require_subcommand(1);
    Options o;

    auto term_cmd = [&](const char* name, const char* help) {
        auto* c = app.add_subcommand(name, help);
        c->add_option("term", o.input, "term, or @file with one term per line")->required();
        c->add_flag("--json", o.json, "JSON output");
        c->add_option("--fuel", o.fuel, "step or graph-node budget");
        return c;
    };
    auto with_calculus = [&](CLI::App* c) { c->add_option("--calculus", o.calculus, "lambda | ls | lxr"); };
    auto with_reduction = [&](CLI::App* c) {
        c->add_option("--relation", o.relation, "beta | bs | bsw | lxr");
        c->add_option("--strategy", o.strategy, "perpetual | leftmost | safe");
    };
    auto with_batch = [&](CLI::App* c) {
        c->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
        c->add_flag("--timing", o.timing, "report runtime_ms");
    };

    auto* check = term_cmd("check", "parse a term and report its fragments");
    with_calculus(check);
    auto* norm = term_cmd("normalize", "reduce to normal form");
    with_reduction(norm);
    auto* trace = term_cmd("trace", "print the reduction sequence");
    with_reduction(trace);
    auto* infer = term_cmd("infer", "principal derivation and its measures");
    with_calculus(infer);
    auto* predict = term_cmd("predict", "predicted reduction lengths from the principal derivation");
    with_calculus(predict);
    with_batch(predict);
    auto* verify = term_cmd("verify", "compare predictions with exhaustive search");
    with_calculus(verify);
    with_batch(verify);

    auto* measure = app.add_subcommand("measure", "check a derivation (JSON or @file) and report its measures");
    measure->add_option("derivation", o.input, "derivation JSON, or @file")->required();
    measure->add_flag("--json", o.json, "JSON output");

    auto* corpus = app.add_subcommand("corpus", "generate strongly normalizing closed terms");
    corpus->add_option("--seed", o.seed, "generator seed");
    corpus->add_option("--size", o.size, "maximum term size");
    corpus->add_option("--count", o.count, "number of terms");
    corpus->add_option("--fuel", o.fuel, "oracle node budget for the termination filter");
    corpus->add_flag("--json", o.json, "JSON output");
    with_calculus(corpus);

    auto* test = app.add_subcommand("test", "run the property suites");
    test->add_option("--seed", o.seed, "corpus seed");
    test->add_flag("--json", o.json, "JSON output");
    with_batch(test);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*check) return cmd_check(o);
        if (*norm) return cmd_normalize(o);
        if (*trace) return cmd_trace(o);
        if (*infer) return cmd_infer(o);
        if (*predict) return reports(o, false);
        if (*verify) return reports(o, true);
        if (*measure) return cmd_measure(o);
        if (*corpus) return cmd_corpus(o);
        if (*test) return cmd_test(o);
    } catch (const ParseError& e) {
        std::cerr << "parse error at offset " << e.offset << ": " << e.what() << "\n";
        return 2;
    } catch (const UsageError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const FuelExhausted& e) {
        std::cerr << "FuelExhausted: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 2;
}
