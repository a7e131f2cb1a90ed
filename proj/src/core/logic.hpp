#pragma once

#include "algebra.hpp"

namespace relat {

// A judgement over a context X: either "all argument terms are defined and
// their values are related" or "the term is defined", for every
// relation-preserving valuation of X.
struct LJudgement {
  enum Kind { Def, Rel };
  Kind kind = Def;
  int sym = -1;
  std::optional<Rat> idx;
  std::vector<STerm> terms;  // Def: exactly one

  static LJudgement def(STerm t) {
    LJudgement j;
    j.kind = Def;
    j.terms = {std::move(t)};
    return j;
  }
  static LJudgement rel(int sym, std::optional<Rat> idx, std::vector<STerm> ts) {
    LJudgement j;
    j.kind = Rel;
    j.sym = sym;
    j.idx = std::move(idx);
    j.terms = std::move(ts);
    return j;
  }
  friend bool operator==(const LJudgement&, const LJudgement&) = default;
  friend bool operator<(const LJudgement& a, const LJudgement& b) {
    return std::tie(a.kind, a.sym, a.idx, a.terms) < std::tie(b.kind, b.sym, b.idx, b.terms);
  }
};

// One rule instance. Premises are indices of earlier nodes in the proof, so
// a proof is a DAG in topological order; the last node is the conclusion.
//
// Side data per rule:
//   Var    -
//   Ctx    -                       (context edge, or held family index)
//   Lim    -                       (non-attained context family value, under
//                                   the infimum limit rule; stands in for the
//                                   schematic rule with one premise per
//                                   strictly larger index)
//   Mor    op                      premises: per arity point j the relation
//                                   across columns, then one Def per operand
//   EAr    op                      premises: per stored arity edge the pushed
//                                   relation, then one Def per argument
//   IAr    axiom(op term inside), tau, subArg+subPath locating sigma(h) in
//          the axiom conclusion, arityEdge beta(k) of ar(sigma);
//          premises: as Ax
//   RelAx  hornAxiom, tau (per theory variable), ratBind (per metavariable);
//          premises: instantiated axiom premises in order, then one Def per
//          conclusion argument
//   Ax     axiom, tau (per context point of the axiom);
//          premises: per stored context edge of the axiom the instantiated
//          relation, then one Def per context point
struct LProofNode {
  enum Rule { Var, Ctx, Lim, Mor, EAr, IAr, RelAx, Ax };
  Rule rule = Var;
  LJudgement concl;
  std::vector<int> prem;

  int op = -1;
  int axiom = -1;                  // RelAx: Horn axiom; Ax/IAr: variety axiom
  std::vector<STerm> tau;
  std::map<std::string, Rat> ratBind;
  int subArg = -1;                 // IAr: which conclusion argument of the axiom
  std::vector<int> subPath;        // IAr: argument path to sigma(h) within it
  int aritySym = -1;               // IAr: beta
  std::optional<Rat> arityIdx;     // IAr: family index of beta(k)
  std::vector<int> arityPts;       // IAr: k
};

struct LProof {
  std::vector<LProofNode> nodes;
  const LJudgement& conclusion() const { return nodes.back().concl; }
};

// The saturation object: all judgements derivable over terms of operation
// depth <= depth, stored up to provable equality. Classes collect terms
// related by the theory's equality witness; facts live on classes.
class Bank {
 public:
  Bank(std::shared_ptr<const Variety> variety, Structure context, int depth,
       long long fuel = 200000);

  const Structure& context() const { return ctx_; }
  int depth() const { return depth_; }
  // No rule instance was skipped for the depth bound and the fixpoint
  // stabilized, i.e. the bank is the full set of derivable judgements.
  bool complete() const { return complete_; }
  bool fuelExhausted() const { return fuelExhausted_; }

  // Class of a term, if it is derivably defined; judgement membership.
  std::optional<int> classOf(const STerm& t) const;
  bool holds(const LJudgement& j) const;
  int classCount() const;
  // Representative (minimal) member term of a live class, and all live
  // classes in representative order.
  const STerm& repTerm(int cls) const;
  std::vector<int> liveClasses() const;
  // Class-level facts over live-class ids (for bank comparisons).
  std::set<DEdge> classEdges() const;
  std::map<FamKey, FamVal> classFam() const;

  // Proof extraction; terms in the goal may be arbitrary (they are pooled on
  // demand). Pooling mutates the bank, hence non-const.
  std::optional<LProof> prove(const LJudgement& goal);

  struct Impl;
  std::shared_ptr<Impl> impl;  // shared so Bank stays copyable

 private:
  std::shared_ptr<const Variety> variety_;
  Structure ctx_;
  int depth_ = 0;
  bool complete_ = false;
  bool fuelExhausted_ = false;
};

Bank saturateJudgements(std::shared_ptr<const Variety> V, const Structure& X, int depth,
                        long long fuel = 200000);

enum class DeriveStatus { Derived, NotDerivable, DepthExhausted };
struct DeriveResult {
  DeriveStatus status = DeriveStatus::NotDerivable;
  std::optional<LProof> proof;
};
DeriveResult derive(std::shared_ptr<const Variety> V, const Structure& X,
                    const LJudgement& goal, int depth, long long fuel = 200000);

// Independent replay of every rule instance; first violation reported.
bool checkProof(const Variety& V, const Structure& X, const LProof& p,
                std::string* why = nullptr);

// Admissible rules, as proof transformations (the outputs replay-check).
//
// From a proof of Def sigma(m) and an edge alpha(f) holding in ar(sigma),
// a proof of alpha(m . f).
std::optional<LProof> admissibleArity(const Variety& V, const Structure& X, const LProof& p,
                                      int sym, std::optional<Rat> idx,
                                      const std::vector<int>& f, std::string* why = nullptr);
// From a proof of a judgement and a subterm u of one of its terms, a proof
// of Def u.
std::optional<LProof> admissibleSubterm(const Variety& V, const Structure& X, const LProof& p,
                                        const STerm& u, std::string* why = nullptr);
// Substitution tau: Y -> Terms(X). edgeProofs: one proof of the
// tau-instantiated relation per stored edge of Y (edge order, then family
// entry order, at the stored value); defProofs: one proof of Def tau(y) per
// point. Transforms p (over Y) into a proof over X.
std::optional<LProof> admissibleSubstitute(const Variety& V, const Structure& X,
                                           const Structure& Y, const std::vector<STerm>& tau,
                                           const std::vector<LProof>& edgeProofs,
                                           const std::vector<LProof>& defProofs, const LProof& p,
                                           std::string* why = nullptr);

std::string judgementStr(const LJudgement& j, const Structure& ctx,
                         const std::vector<OpSymbol>& ops, const HornTheory& th);
std::string printProof(const Variety& V, const Structure& ctx, const LProof& p);

}  // namespace relat
