#pragma once

#include <optional>
#include <string>
#include <vector>

#include "theory.hpp"

namespace relat {

// A fact derived by the engine: a plain edge, one canonical entry of an
// indexed family, or an identification of two points.
struct Fact {
  enum Kind { Edge, Fam, Eq } kind;
  int sym = -1;
  std::vector<int> pts;
  FamVal fv{Rat::zero(), true};
  auto operator<=>(const Fact&) const = default;
};

// Derivations are trees of rule instances. Congruence/EqSym/EqTrans/EqRefl
// package the equality reasoning the engine performs through its union-find;
// they correspond to the closure-under-equality axioms of the theory.
struct DerivNode {
  enum Rule { Input, Axiom, Limit, Up, Congruence, EqSym, EqTrans, EqRefl } rule;
  Fact fact;
  int axiom = -1;
  std::vector<int> kappa;                    // axiom variable -> point
  std::map<std::string, FamVal> ratBind;     // index metavariable bindings
  std::string limitName;
  std::vector<DerivNode> premises;
};

struct Goal {
  bool isEq = false;
  int sym = -1;
  std::optional<Rat> idx;
  std::vector<int> pts;
};

enum class EntailStatus { Derivable, NotDerivable, FuelExhausted };

struct EntailResult {
  EntailStatus status;
  std::optional<DerivNode> derivation;
};

// Result of saturating a pre-structure: derived equalities as a
// representative map plus the closed edge set over representatives.
struct SatResult {
  std::vector<int> rep;  // original point -> representative original point
  std::set<DEdge> edges;
  std::map<FamKey, FamVal> fam;
  bool fuelExhausted = false;

  bool derivesEdge(int sym, std::vector<int> pts) const;
  bool derivesFam(int sym, int p, int q, const Rat& idx) const;
  bool derivesEq(int p, int q) const { return rep[p] == rep[q]; }
  const FamVal* famValAt(int sym, int p, int q) const;
};

inline constexpr long long kDefaultFuel = 1000000;

SatResult saturate(const HornTheory& t, const Structure& s, long long fuel = kDefaultFuel);
EntailResult entails(const HornTheory& t, const Structure& base, const Goal& g,
                     long long fuel = kDefaultFuel);
bool checkDerivation(const HornTheory& t, const Structure& base, const Goal& g,
                     const DerivNode& d, std::string* err = nullptr);

bool isModel(const HornTheory& t, const Structure& s);

// Epireflection into models: quotient by derivable equality carrying exactly
// the derivable edges. quotientMap (optional out) sends each original point
// to its class index in the result.
Structure reflect(const HornTheory& t, const Structure& s, std::vector<int>* quotientMap = nullptr);

// Empty string when the equality witness of `t` satisfies its contract:
// Eq(x,y) entails x = y, and every member of Eq(x,x) is entailed outright.
std::string checkEqAssumption(const HornTheory& t);

// Conversions between 1-bounded metric spaces (exact rational distance
// matrices) and structures over the metric theory.
Structure metricToStructure(const std::vector<std::string>& names,
                            const std::vector<std::vector<Rat>>& d);
std::vector<std::vector<Rat>> structureToMetric(const Structure& s);

std::string printDerivation(const HornTheory& t, const Structure& base, const DerivNode& d);

}  // namespace relat
