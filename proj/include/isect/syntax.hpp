#ifndef ISECT_SYNTAX_HPP
#define ISECT_SYNTAX_HPP

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace isect {

enum class Kind { Var, Abs, App, ESub, Weak, Con };

struct Node;
using Term = std::shared_ptr<const Node>;

// Abs(name, a)          \name. a
// App(a, b)             a b
// ESub(a, name, b)      a[name := b]
// Weak(name, a)         W[name] a
// Con(name, y, z, a)    C[name < y, z] a
struct Node {
    Kind kind;
    std::string name;
    std::string y, z;
    Term a, b;
    std::vector<std::string> fv;   // sorted
    int size = 1;
};

Term var(const std::string& x);
Term abs(const std::string& x, Term body);
Term app(Term f, Term a);
Term esub(Term body, const std::string& x, Term arg);
Term weak(const std::string& x, Term body);
Term con(const std::string& x, const std::string& y, const std::string& z, Term body);

enum class Fragment { PureLambda, LambdaS, LambdaLxr };

struct ParseError : std::runtime_error {
    std::size_t offset;
    ParseError(const std::string& msg, std::size_t off);
};

struct FragmentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Path from the root: child 0 is body/function, child 1 is argument.
using Pos = std::vector<int>;

Term parse_term(const std::string& text);
// no binder renaming; used when loading stored derivations
Term parse_term_raw(const std::string& text);
std::string print_term(const Term& m);
std::string pos_string(const Pos& p);

const std::vector<std::string>& free_vars(const Term& m);
bool is_free(const Term& m, const std::string& x);
std::set<std::string> all_names(const Term& m);
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

bool is_linear(const Term& m);
bool check_fragment(const Term& m, Fragment f);
void require_fragment(const Term& m, Fragment f, const char* op);

// exact structural equality, names included
bool term_eq(const Term& m, const Term& n);
bool alpha_eq(const Term& m, const Term& n);
// de Bruijn style key, equal iff alpha-equivalent
std::string alpha_key(const Term& m);
// same, with an outer scope of bound names (innermost last)
std::string alpha_key_in(const Term& m, std::vector<std::string>& scope);

// capture-avoiding m{x := n} on pure terms
Term capture_subst(const Term& m, const std::string& x, const Term& n);
// capture-avoiding renaming of free variable x into y, whole grammar
Term rename_free(const Term& m, const std::string& x, const std::string& y);
// rename every binder that shadows a name in scope
Term barendregt(const Term& m);

int app_count(const Term& m);
int var_occurrences(const Term& m);
int occurrences(const Term& m, const std::string& x);
Term subterm(const Term& m, const Pos& p);
Term replace_at(const Term& m, const Pos& p, const Term& n);

bool is_beta_normal(const Term& m);
// M is x M1 ... Mk
bool is_accumulator(const Term& m, std::string* head = nullptr);

struct TraceStep {
    std::string rule;
    Pos pos;
    Term before, after;
};
using Trace = std::vector<TraceStep>;

}  // namespace isect

#endif
