#pragma once

#include "logic.hpp"

namespace relat {

// The quotient of derivably-defined terms over a context by derivable
// equality, approximated at a term-depth bound. Stabilization compares the
// quotients at depth and depth+1: same classes, same relations, no deeper
// class outside them. Only a stabilized approximation carries the algebra
// structure and the universal property.
struct FreeAlgebraApprox {
  std::shared_ptr<const Variety> variety;
  Structure context;
  int depth = 0;
  bool stabilized = false;

  Structure carrier;        // one point per class, bank facts as relations
  std::vector<STerm> reps;  // minimal member per class, in point order
  SigmaAlgebra algebra;     // populated iff stabilized
  Morphism unit;            // context point -> class of its variable

  std::shared_ptr<Bank> bank;       // the depth+1 bank (evaluation, proofs)
  std::map<int, int> classIndex;    // bank class -> carrier point

  // Carrier point of a derivably-defined term.
  std::optional<int> pointOf(const STerm& t) const;
};

FreeAlgebraApprox freeAlgebra(std::shared_ptr<const Variety> V, const Structure& X, int depth,
                              long long fuel = 200000);

// The unique homomorphism extending a relation-preserving generator map
// f: X -> |A| along the unit; refuses when F is not stabilized, when f does
// not preserve relations, or when the extension fails to be a homomorphism
// agreeing with f on generators (which would falsify A's membership in V).
std::optional<Morphism> universalExtension(const FreeAlgebraApprox& F, const SigmaAlgebra& A,
                                           const Morphism& f, std::string* why = nullptr);

// Kleisli extension of f: X -> |F Y| to a homomorphism |F X| -> |F Y|.
std::optional<Morphism> kleisliExtension(const FreeAlgebraApprox& FX, const FreeAlgebraApprox& FY,
                                         const Morphism& f, std::string* why = nullptr);

struct MonadLawReport {
  bool ok = false;
  long long unitChecks = 0;    // eta* = id and f* . eta = f instances
  long long assocChecks = 0;   // g* . f* = (g* . f)* instances
  long long enrichChecks = 0;  // enriched-functor pairs
  std::string detail;          // first violation, or empty
};

// Verifies the Kleisli laws of the free-algebra construction exhaustively
// over all generator maps between the given objects, plus enrichment of the
// induced functor T(m) = (eta . m)*.
MonadLawReport checkMonadLaws(std::shared_ptr<const Variety> V,
                              const std::vector<Structure>& objects, int depth,
                              long long guard = kDefaultGuard, long long fuel = 200000);

}  // namespace relat
