#pragma once

#include <memory>

#include "structops.hpp"

namespace relat {

// An operation symbol whose arity is a model; its interpretations are
// relation-preserving maps [arity, A] -> A.
struct OpSymbol {
  std::string name;
  Structure arity;
};

// Terms over a context: a context point, or an operation applied to one term
// per arity carrier point (in carrier order).
struct STerm {
  int var = -1;
  int op = -1;
  std::vector<STerm> args;

  static STerm mkVar(int v) {
    STerm t;
    t.var = v;
    return t;
  }
  static STerm mkApp(int op, std::vector<STerm> a) {
    STerm t;
    t.var = -1;
    t.op = op;
    t.args = std::move(a);
    return t;
  }
  bool isVar() const { return var >= 0; }
  int depth() const;
  friend bool operator==(const STerm& a, const STerm& b) {
    return a.var == b.var && a.op == b.op && a.args == b.args;
  }
  friend bool operator<(const STerm& a, const STerm& b);
};

STerm substitute(const STerm& t, const std::vector<STerm>& tau);
void collectSubterms(const STerm& t, std::vector<STerm>& out);  // includes t

// A relational axiom: a signature edge over terms in a designated context.
// The context's stored edges are its presentation.
struct SigmaRelation {
  std::string name;
  Structure context;
  int sym = 0;
  std::optional<Rat> idx;
  std::vector<STerm> args;
};

struct Variety {
  std::string name;
  std::shared_ptr<const HornTheory> theory;
  std::vector<OpSymbol> ops;
  std::vector<SigmaRelation> axioms;
  int opIndex(const std::string& n) const;
};

struct SigmaAlgebra {
  std::shared_ptr<const Variety> variety;
  Structure carrier;
  // per operation: the maps arity -> carrier in enumeration order, their
  // reverse index, and the chosen value per map
  std::vector<std::vector<Morphism>> homs;
  std::vector<std::map<Morphism, int>> homIdx;
  std::vector<std::vector<int>> interp;
};

// Builds an algebra and eagerly checks each interpretation is a
// relation-preserving map [arity, carrier] -> carrier; throws otherwise.
SigmaAlgebra makeAlgebra(std::shared_ptr<const Variety> V, Structure carrier,
                         std::vector<std::vector<int>> interp,
                         long long guard = kDefaultGuard);

// Partial evaluation under an assignment e (must preserve relations).
// An application is defined iff all argument values are defined and they
// form a relation-preserving map from the arity.
std::optional<int> evaluate(const SigmaAlgebra& A, const Structure& ctx, const Morphism& e,
                            const STerm& t);

// A satisfies the axiom iff for every relation-preserving assignment from
// its context all argument terms are defined and the value tuple is related.
bool satisfies(const SigmaAlgebra& A, const SigmaRelation& r, std::string* why = nullptr,
               long long guard = kDefaultGuard);
bool satisfiesAll(const SigmaAlgebra& A, std::string* why = nullptr,
                  long long guard = kDefaultGuard);

bool isHomomorphism(const SigmaAlgebra& A, const SigmaAlgebra& B, const Morphism& h);

// All V-algebras over the given carriers (each must be a model), with
// axiom filtering during the search; deduplicated up to isomorphism.
std::vector<SigmaAlgebra> enumerateAlgebras(std::shared_ptr<const Variety> V,
                                            const std::vector<Structure>& carriers,
                                            long long guard = kDefaultGuard,
                                            bool dedupe = true);

SigmaAlgebra productAlgebra(const SigmaAlgebra& A, const SigmaAlgebra& B);
bool isSubalgebraCarrier(const SigmaAlgebra& A, const std::set<int>& subset);

std::string termStr(const STerm& t, const Structure& ctx, const std::vector<OpSymbol>& ops);
std::string printVariety(const Variety& V);

}  // namespace relat
