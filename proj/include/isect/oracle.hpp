#ifndef ISECT_ORACLE_HPP
#define ISECT_ORACLE_HPP

#include "isect/inference.hpp"

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

namespace isect {

struct Longest {
    long length = 0;
    Trace witness;
    long nodes = 0;
};

// exact longest beta reduction; throws FuelExhausted past `fuel` graph nodes or on a cycle
Longest longest_beta(const Term& m, long fuel = 10000);

struct MaxB {
    long n1 = 0, n2 = 0;
    Term normal_form;
    long nodes = 0;
};

// most B steps over B,S reductions, and App nodes of the B,S-normal form
MaxB max_B_ls(const Term& m, long fuel = 10000);

// every maximal reduction sequence of a small term (beta for pure terms, B,S otherwise)
std::vector<Trace> all_maximal_traces(const Term& m, long max_traces = 10000);

long count_duplications(const Trace& t);
long count_replacements(const Trace& t);

struct EnumBounds {
    int max_height = 5;
    int max_atoms = 3;
    int max_inter = 3;    // Inter rule uses
    int max_extra = 1;    // subsumed components added to abstraction domains
    long max_nodes = 2000000;
};

struct EnumBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Derivations of pure M at F-types, most general per shape; type variables become
// atoms in order of appearance, those past max_atoms merged into the last one.
std::vector<Deriv> enum_typings(const Term& m, const EnumBounds& b = {});
// some enumerated derivation has an instance with exactly this judgement
bool derivable(const Term& m, const Context& ctx, const Type& type, const EnumBounds& b = {});

struct Report {
    std::string term;
    Fragment calculus = Fragment::PureLambda;
    long n = 0, d = 0, var_count = 0, inter_count = 0;
    long n1 = 0, n2 = 0;
    long longest = 0;
    std::optional<bool> agree;   // unset for predict
    long graph_nodes = 0;
    double runtime_ms = 0;
};

Report predict(const Term& m, Fragment f, long fuel = 100000);
Report verify(const Term& m, Fragment f, long fuel = 10000);
nlohmann::json report_json(const Report& r, bool timing);

const char* calculus_name(Fragment f);
std::optional<Fragment> parse_calculus(const std::string& s);

// closed SN terms, distinct up to alpha, drawn with a fixed generator from the seed
std::vector<Term> lambda_corpus(std::uint64_t seed, int count, int max_size = 12, long fuel = 10000);
std::vector<Term> ls_corpus(std::uint64_t seed, int count, int max_size = 10, long fuel = 10000);

// results in index order whatever the number of workers
template <class T, class F>
std::vector<T> parallel_map(std::size_t n, int jobs, F f)
{
    std::vector<T> out(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto work = [&]() {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    int k = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
    std::vector<std::thread> pool;
    for (int i = 1; i < k; ++i) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
    return out;
}

}  // namespace isect

#endif
