#ifndef ISECT_INFERENCE_HPP
#define ISECT_INFERENCE_HPP

#include "isect/derivations.hpp"
#include "isect/reduction.hpp"

namespace isect {

struct PrincipalResult {
    Term term;
    Deriv deriv;
    int n = 0, d = 0;
    Trace trace;   // normalization used to build the derivation
    Term normal_form;
};

// Typing of normal terms; fresh atoms for accumulator results and unused binders.
Deriv type_normal_lambda(const Term& m, AtomSupply& atoms);
Deriv type_normal_ls(const Term& m, AtomSupply& atoms);
// Same accumulator derivation at conclusion g; only the head's context entry changes.
Deriv retype_accumulator(const Deriv& d, const Type& g);

// M{x:=N} from dM (x typed U) and dN (typed U)
Deriv subst_typing_implicit(const Deriv& dm, const std::string& x, const Deriv& dn);
// M[x:=N] from dM (x typed A) and dN (typed A)
Deriv subst_typing_explicit(const Deriv& dm, const std::string& x, const Deriv& dn);
// d types M{x:=N}; returns {derivation of N, derivation of M}. N gets Omega when x is unused.
std::pair<Deriv, Deriv> anti_subst(const Deriv& d, const Term& m, const std::string& x, const Term& n);

// d types s.before; the result types s.after.
// PureLambda accepts Beta steps, LambdaS the B/S/W rules, LambdaLxr every lxr rule.
Deriv subject_reduce(const Deriv& d, const Step& s, Fragment f);
// d types s.after for a B or S step; the result types s.before.
Deriv subject_expand(const Deriv& d, const Step& s);
// d types s.after for a restricted beta step from before.
Deriv subject_expand(const Deriv& d, const SafeStep& s, AtomSupply& atoms);

// throws FuelExhausted after fuel steps; PureLambda and LambdaS only
PrincipalResult infer_principal(const Term& m, Fragment f, long fuel = 100000);

// m S-normal and B-reducible, d optimal: a B step whose reduct derivation has one App fewer
std::pair<Step, Deriv> most_inefficient_step(const Term& m, const Deriv& d);

// linear translation of pure terms: unused binders weakened, shared variables contracted
Term to_lxr(const Term& m);
// d along to_lxr(d->term)
Deriv to_lxr(const Deriv& d);

}  // namespace isect

#endif
