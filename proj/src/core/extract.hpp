#pragma once

#include "freealg.hpp"

namespace relat {

// A monad in Kleisli form over a finite universe of models: object map
// X -> TX, unit X -> TX, and extension of generator maps f: X -> |TY| to
// maps TX -> TY. Oracles are validated on registration.
struct MonadOracle {
  std::shared_ptr<const HornTheory> theory;
  std::vector<Structure> objects;  // the universe
  std::vector<Structure> t;        // TX per universe object
  std::vector<Morphism> unit;      // X -> TX per universe object
  // extend(i, j, f) with f: objects[i] -> |t[j]|, returning t[i] -> t[j]
  std::function<Morphism(int, int, const Morphism&)> extend;
};

// Validates the Kleisli laws and relation preservation of every extension
// over the whole universe; throws std::invalid_argument with the first
// violation.
MonadOracle makeOracle(std::shared_ptr<const HornTheory> theory, std::vector<Structure> objects,
                       std::vector<Structure> t, std::vector<Morphism> unit,
                       std::function<Morphism(int, int, const Morphism&)> extend,
                       long long guard = kDefaultGuard);

// The induced signature and axioms over a chosen finite arity list: one
// operation per element of T(arity); axioms mirror (1) every relational
// fact of T(arity), (2) every extension equation f*(sigma) = sigma(f), and
// (3) the unit equations eta(x) = x. Equations are rendered through the
// ambient theory's equality witness.
struct InducedTheory {
  std::shared_ptr<Variety> variety;
  std::vector<int> arities;            // indices into the oracle universe
  std::vector<std::vector<int>> opOf;  // arity position x element of T(arity) -> op id

  // The term sigma(u) for element e of T(arities[g]).
  STerm opTerm(int g, int e) const;
};

InducedTheory induceTheory(const MonadOracle& M, const std::vector<int>& arities,
                           long long guard = kDefaultGuard);

// The canonical algebra on T(objects[x]): operation (g, sigma) interprets a
// generator map f as extend(f)(sigma).
SigmaAlgebra canonicalAlgebra(const MonadOracle& M, const InducedTheory& I, int x,
                              long long guard = kDefaultGuard);

struct RoundtripReport {
  bool ok = false;
  long long canonicalChecks = 0;  // canonical algebras verified against all axioms
  long long extensionChecks = 0;  // (algebra, generator map) pairs with unique extensions
  std::string detail;
};

// Monad-to-theory roundtrip for the free-algebra monad of V: induces the
// theory over the given arities, then checks each canonical algebra lies in
// the induced variety and has the universal property against every induced
// algebra over the palette carriers.
RoundtripReport verifyRoundtrip(std::shared_ptr<const Variety> V,
                                const std::vector<Structure>& arities,
                                const std::vector<Structure>& palette, int depth,
                                long long guard = kDefaultGuard, long long fuel = 200000);

}  // namespace relat
