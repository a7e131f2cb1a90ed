#pragma once

#include <functional>
#include <optional>

#include "saturate.hpp"

namespace relat {

// A map between structure carriers, as target point per source point.
using Morphism = std::vector<int>;

inline constexpr long long kDefaultGuard = 1000000;

bool preservesRelations(const Structure& X, const Structure& Y, const Morphism& m);

// All relation-preserving maps X -> Y in lexicographic order on the value
// vector. Throws when |Y|^|X| exceeds the guard.
std::vector<Morphism> morphisms(const Structure& X, const Structure& Y,
                                long long guard = kDefaultGuard);

// Injective, and reflects every relation (an isomorphism onto its image).
bool isEmbedding(const Structure& X, const Structure& Y, const Morphism& m);

Morphism composeMor(const Morphism& f, const Morphism& g);  // g after f
Morphism identityMor(const Structure& X);

// Internal hom [X,Y]: carrier is morphisms(X,Y); a tuple is related iff it is
// related pointwise in Y. `carrier` (optional out) receives the maps in
// carrier order.
Structure internalHom(const Structure& X, const Structure& Y,
                      long long guard = kDefaultGuard,
                      std::vector<Morphism>* carrier = nullptr);

// Pre-structure tensor: carrier X x Y (x-major point order); edges are edges
// of one factor at a constant point of the other.
Structure tensorStruct(const Structure& X, const Structure& Y);

// Reflected tensor ("Manhattan product" over the metric theory).
Structure manhattan(const HornTheory& t, const Structure& X, const Structure& Y);

struct AdjunctionReport {
  bool ok = false;
  size_t homCurried = 0;  // |Hom(Y, [X,Z])|
  size_t homTensor = 0;   // |Hom(Y (x) X, Z)|
  std::string detail;
};

// Verifies the bijection g |-> g# with g#(y,x) = g(y)(x) between
// Hom(Y (x) X, Z) and Hom(Y, [X,Z]), both directions.
AdjunctionReport checkTensorHomAdjunction(const HornTheory& t, const Structure& Y,
                                          const Structure& X, const Structure& Z,
                                          long long guard = kDefaultGuard);

// E must live on the carrier of model X with E's items among X's. True when
// saturating E yields X exactly (and no identifications).
bool isGeneratedBy(const HornTheory& t, const Structure& X, const Structure& E);

// Smallest generating subset of X's canonical edge items, first in
// (size, lexicographic) order; nullopt if none within maxItems.
std::optional<Structure> findGeneratingSubset(const HornTheory& t, const Structure& X,
                                              int maxItems);

struct Functor {
  std::function<Structure(const Structure&)> obj;
  std::function<Morphism(const Structure&, const Structure&, const Morphism&)> mor;
};

struct EnrichedReport {
  bool ok = false;
  std::string detail;
};

// The action of F on Hom(X,Y) must be a relation-preserving map
// [X,Y] -> [FX,FY] landing on actual morphisms.
EnrichedReport checkEnriched(const Functor& F, const Structure& X, const Structure& Y,
                             long long guard = kDefaultGuard);

bool isomorphic(const Structure& A, const Structure& B);

// Palettes of small models, deduplicated up to isomorphism, deterministic.
std::vector<Structure> allPosets(int maxPoints);
std::vector<Structure> allMetSpaces(int maxPoints, const std::vector<Rat>& vals);

}  // namespace relat
