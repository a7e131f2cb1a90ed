#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "rational.hpp"

namespace relat {

// Relation symbols. A "family" symbol is binary and carries a rational index
// in [0,1]; its edge sets are upward closed in the index, so a structure
// stores one canonical value per ordered pair (the least asserted index).
struct RelSymbol {
  std::string name;
  int arity = 2;
  bool family = false;
};

// Distinguished equality; usable as an axiom conclusion and inside the
// equality witness, never as an ordinary signature symbol.
constexpr int kEqSym = -2;

// Finite meet-semilattice used by lattice-valued signatures. `leq[i][j]`
// means elem i <= elem j; `meet` must be total and consistent with leq.
struct Lattice {
  std::vector<std::string> elems;
  std::vector<std::vector<char>> leq;
  std::vector<std::vector<int>> meet;
  int bottom = -1;
  void validate() const;
  int index(const std::string& e) const;
};

// Index expressions appearing on family atoms in axiom schemes: a constant
// plus a sum of rational metavariables, evaluated with addition capped at 1.
struct IndexExpr {
  Rat c;
  std::vector<std::string> vars;
  Rat eval(const std::map<std::string, Rat>& bind) const;
  std::string str() const;
  static IndexExpr constant(Rat r) { return IndexExpr{r, {}}; }
  static IndexExpr var(std::string v) { return IndexExpr{Rat::zero(), {std::move(v)}}; }
};

// An atom in a Horn axiom: relation symbol (or kEqSym) applied to variables,
// with an index expression when the symbol is a family.
struct Atom {
  int sym = 0;
  std::optional<IndexExpr> idx;
  std::vector<int> args;
};

struct SideCond {
  enum Op { LT, LE, GT, GE } op;
  IndexExpr lhs, rhs;
  bool eval(const std::map<std::string, Rat>& bind) const;
};

struct HornAxiom {
  std::string name;
  int varCount = 0;
  std::vector<Atom> premises;
  Atom conclusion;
  std::vector<SideCond> conds;
  // Closure-under-equality axioms are generated from the witness; they are
  // part of the theory but skipped when pretty-printing.
  bool generated = false;
};

// Limit rules: closure operators on indexed edge families that stand in for
// axiom schemes with infinitely many premises.
struct LimitRule {
  enum Kind { MetArch, LatticeArch } kind;
  std::string name;
};

// Equality witness atom over two formal variables 0 and 1.
struct EqAtom {
  int sym = kEqSym;
  std::optional<Rat> idx;
  int a = 0, b = 1;
};

struct HornTheory {
  std::string name;
  std::vector<RelSymbol> symbols;
  std::vector<HornAxiom> axioms;
  std::vector<LimitRule> limitRules;
  std::vector<EqAtom> eqWitness;
  std::optional<Lattice> lattice;
  // For lattice-valued signatures: symbol id -> lattice element.
  std::map<int, int> latticeElemOfSym;

  int symIndex(const std::string& n) const;
  bool hasLimitRule(LimitRule::Kind k) const;
  // Structural checks: arities positive, scheme metavariables bound by
  // premises (conclusion-only metavariables allowed, they weaken), family
  // premise indices either constants or bare metavariables.
  void validate() const;
  // Index of an axiom usable to weaken a family value from v to q > v, i.e.
  // premise fam[e](x,y), conclusion fam[e+e'](x,y) with e' free. -1 if none.
  int upAxiomFor(int sym) const;
};

// One canonical entry of an indexed edge family: the pair is related at
// every index q with q > v, plus q == v itself when `attained`. A finite
// set of asserted edges always yields an attained value; non-attained
// values describe schematically given families whose infimum is not
// itself asserted.
struct FamVal {
  Rat v;
  bool attained = true;

  bool holds(const Rat& q) const { return q > v || (q == v && attained); }
  // Every index held by `a` is held by `b`.
  static bool weaker(const FamVal& a, const FamVal& b) {
    if (b.v < a.v) return true;
    return b.v == a.v && (b.attained || !a.attained);
  }
  static FamVal combine(const FamVal& a, const FamVal& b) {
    if (a.v < b.v) return a;
    if (b.v < a.v) return b;
    return FamVal{a.v, a.attained || b.attained};
  }
  friend bool operator==(const FamVal& a, const FamVal& b) {
    return a.v == b.v && a.attained == b.attained;
  }
};

struct DEdge {
  int sym;
  std::vector<int> pts;
  auto operator<=>(const DEdge&) const = default;
};

using FamKey = std::tuple<int, int, int>;  // (sym, p, q)

// A finite pre-structure: named points, plain edges, canonical family
// entries. Models are pre-structures closed under the theory.
struct Structure {
  std::string name;
  std::vector<std::string> points;
  std::set<DEdge> edges;
  std::map<FamKey, FamVal> fam;

  int size() const { return (int)points.size(); }
  int pointIndex(const std::string& p) const;
  void addEdge(int sym, std::vector<int> pts) { edges.insert(DEdge{sym, std::move(pts)}); }
  void addFam(int sym, int p, int q, FamVal v);
  const FamVal* famVal(int sym, int p, int q) const;
  bool holdsFam(int sym, int p, int q, const Rat& idx) const;
  bool hasEdge(int sym, const std::vector<int>& pts) const {
    return edges.count(DEdge{sym, pts}) > 0;
  }
  auto operator<=>(const Structure&) const = default;
};

// Adds the closure-under-equality axioms derived from the witness and
// validates. Call after assembling symbols, axioms and the witness.
void finalizeTheory(HornTheory& t);

// Default display names for axiom variables: x, y, z, w, v4, v5, ...
std::string varName(int i);

// Builtin theories.
HornTheory theorySet();
HornTheory theoryPos();
HornTheory theoryMet();
HornTheory theoryLValued(const Lattice& l);
HornTheory theoryPartial(const std::vector<std::pair<std::string, int>>& ops);

std::string printTheory(const HornTheory& t);
std::string printStructure(const HornTheory& t, const Structure& s);

}  // namespace relat
