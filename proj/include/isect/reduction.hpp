#ifndef ISECT_REDUCTION_HPP
#define ISECT_REDUCTION_HPP

#include "isect/syntax.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>

namespace isect {

enum class Relation { Beta, BS, BSW, Lxr };
enum class Strategy { Perpetual, Leftmost, Safe };

// One reduction step at pos. redex is the equivalence-class representative
// the rule fires on (equal to before except for wrapper rearrangement), raw the
// unrenamed reduct, after the renamed and canonicalized reduct.
struct Step {
    std::string rule;
    Pos pos;
    Term before, redex, raw, after;
    // wrappers at pos left untouched around the active part
    std::size_t keep = 0;
};

std::vector<Step> beta_steps(const Term& m);

// B, S and (optionally) W steps modulo substitution commutation
std::vector<Step> ls_steps(const Term& m, bool with_w = true);
Term ls_canon(const Term& m);

std::vector<Step> lxr_steps(const Term& m);
Term lxr_canon(const Term& m);

enum class SafeKind { Contract, Erase, ArgInside, AppLeft, LamPer, AccArg };

// Derivation of a restricted step; kind LamPer is the only non-strict one.
struct SafeWitness {
    SafeKind kind;
    Term before, after;   // after is the raw reduct of this subterm
    std::set<std::string> e;
    std::string x;        // binder for Contract/Erase/LamPer, head variable for AccArg
    std::shared_ptr<const SafeWitness> child;
};
using Witness = std::shared_ptr<const SafeWitness>;

struct SafeStep {
    std::set<std::string> e;
    Pos pos;
    Term raw, after;
    Witness w;
};

std::optional<SafeStep> safe_step(const Term& m);
std::optional<Step> perpetual_step(const Term& m);

struct SWMeasure {
    boost::multiprecision::cpp_int s, i;
    bool operator<(const SWMeasure& o) const { return s < o.s || (s == o.s && i < o.i); }
    bool operator==(const SWMeasure& o) const = default;
};
SWMeasure sw_measure(const Term& m);
boost::multiprecision::cpp_int sw_m(const std::string& x, const Term& m);

struct FuelExhausted : std::runtime_error {
    Trace partial;
    FuelExhausted(const std::string& msg, Trace t) : std::runtime_error(msg), partial(std::move(t)) {}
};

// one step of the chosen relation and strategy, none if normal
std::optional<Step> choose_step(const Term& m, Relation r, Strategy s);
std::pair<Term, Trace> normalize(const Term& m, Relation r, Strategy s, long fuel);

std::string trace_jsonl(const Trace& t);
const char* relation_name(Relation r);
const char* strategy_name(Strategy s);

}  // namespace isect

#endif
