#ifndef ISECT_DERIVATIONS_HPP
#define ISECT_DERIVATIONS_HPP

#include "isect/syntax.hpp"
#include "isect/types.hpp"

#include "json.hpp"

namespace isect {

enum class Rule { Var, Abs, App, Inter, Omega, Subst, Contraction, Weakening };

const char* rule_name(Rule r);

struct DNode;
using Deriv = std::shared_ptr<const DNode>;

// Premise order follows term children: App [fun, arg], Subst [body, arg].
struct DNode {
    Rule rule;
    std::vector<Deriv> prem;
    Context ctx;
    Term term;
    Type type;
    // Abs: u = binder type in the premise, a = domain.
    // Subst: u = binder type in the body premise, a = argument type.
    // Contraction: u, v1, v2 as in the rule. Weakening: u = previous type, a = added part.
    Type u, a, v1, v2;
    int n = 0, vars = 0, inters = 0;
};

struct DerivError : std::runtime_error {
    Pos path;
    DerivError(const std::string& msg, Pos p = {});
};

Deriv d_var(const std::string& x, const Type& f);
Deriv d_abs(const std::string& x, const Deriv& body, const Type& a);
Deriv d_app(const Deriv& f, const Deriv& arg);
Deriv d_inter(const Deriv& l, const Deriv& r);
Deriv d_omega(const Term& m);
Deriv d_subst(const std::string& x, const Deriv& body, const Deriv& arg);
Deriv d_con(const std::string& x, const std::string& y, const std::string& z, const Deriv& body);
Deriv d_weak(const std::string& x, const Type& a, const Deriv& body);

// left-nested Inter of the list, Omega of m if empty
Deriv d_inter_of(const std::vector<Deriv>& ds, const Term& m);
// F-typed components of a derivation, left to right
std::vector<Deriv> d_leaves(const Deriv& d);

struct Measures {
    int app_count = 0, var_count = 0, inter_count = 0;
};

struct Judgement {
    Context ctx;
    Term term;
    Type type;
    Measures measures;
};

Measures measures(const Deriv& d);
Judgement check_derivation(const Deriv& d);

bool has_subsumption(const Deriv& d);
std::vector<Type> forgotten_types(const Deriv& d);
bool is_optimal(const Deriv& d);
int tree_degree(const Deriv& d);

std::pair<Deriv, Deriv> split_inter(const Deriv& d);
Deriv lift_equiv(const Deriv& d, const Type& v);
Deriv lift_subtype(const Deriv& d, const Type& v);

// Same derivation along t, which must have d's shape (alpha-variant, or free variables renamed).
Deriv rebind(const Deriv& d, const Term& t);
// Same derivation along t, whose wrapper blocks (ESub, Weak, Con) are rearranged
// relative to d's subject; wrappers are matched by bound or weakened name.
Deriv transport(const Deriv& d, const Term& t);

nlohmann::json deriv_to_json(const Deriv& d);
// measures recomputed, structure checked
Deriv deriv_from_json(const nlohmann::json& j);
std::string print_deriv(const Deriv& d);

}  // namespace isect

#endif
