#ifndef ISECT_TYPES_HPP
#define ISECT_TYPES_HPP

#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace isect {

enum class TKind { Atom, Arrow, Inter, Omega };

struct TypeNode;
using Type = std::shared_ptr<const TypeNode>;

struct TypeNode {
    TKind kind;
    std::string name;   // atom name, without the quote
    Type l, r;
    int height = 1;
    std::string key;    // printed form, used for ordering and equality
};

struct TypeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Type atom(const std::string& name);
// l must be an A-type, r an F-type
Type arrow(Type l, Type r);
// both sides must be A-types; no absorption
Type inter_raw(Type l, Type r);
Type omega();
// intersection with the omega absorption clauses
Type inter(const Type& u, const Type& v);

bool is_f(const Type& u);
bool is_omega(const Type& u);
bool type_eq(const Type& u, const Type& v);

// top-level F components, left to right
std::vector<Type> leaves(const Type& u);
// left-nested intersection of the list, omega if empty
Type inter_of(const std::vector<Type>& fs);

bool equiv(const Type& u, const Type& v);
bool subtype(const Type& u, const Type& v);
int phi(const Type& u);
int height(const Type& u);

enum class Polarity { Plus, Minus, MinusMinus };
bool is_plus(const Type& u);
bool is_minus(const Type& u);
bool is_mm(const Type& u);
std::set<Polarity> classify(const Type& u);
int degree(const Type& u, Polarity p);

Type parse_type(const std::string& text);
std::string print_type(const Type& u);

// non-omega entries only
using Context = std::map<std::string, Type>;

Type ctx_get(const Context& g, const std::string& x);
Context ctx_set(Context g, const std::string& x, const Type& u);
Context ctx_without(Context g, const std::string& x);
Context ctx_inter(const Context& g, const Context& d);
bool ctx_equiv(const Context& g, const Context& d);
bool ctx_subtype(const Context& g, const Context& d);
std::string print_ctx(const Context& g);

// fresh atoms for one run
struct AtomSupply {
    int next = 0;
    Type fresh();
};

}  // namespace isect

#endif
