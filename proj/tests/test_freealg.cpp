#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/freealg.hpp"

using namespace relat;

namespace {

Structure posDiscrete(const std::vector<std::string>& pts) {
  Structure s;
  s.points = pts;
  for (int i = 0; i < s.size(); i++) s.addEdge(0, {i, i});
  return s;
}

Structure posChain(int n) {
  Structure s;
  for (int i = 0; i < n; i++) s.points.push_back(std::string(1, char('a' + i)));
  for (int i = 0; i < n; i++)
    for (int j = i; j < n; j++) s.addEdge(0, {i, j});
  return s;
}

STerm V(int i) { return STerm::mkVar(i); }
STerm J(STerm a, STerm b) { return STerm::mkApp(0, {std::move(a), std::move(b)}); }

std::shared_ptr<Variety> semilatticeVariety() {
  auto Vy = std::make_shared<Variety>();
  Vy->name = "semilattice";
  Vy->theory = std::make_shared<HornTheory>(theoryPos());
  Vy->ops.push_back({"join", posDiscrete({"p", "q"})});
  Structure ctx2 = posDiscrete({"x", "y"});
  Structure ctx3 = posDiscrete({"x", "y", "z"});
  ctx3.addEdge(0, {0, 2});
  ctx3.addEdge(0, {1, 2});
  Vy->axioms.push_back({"upper-left", ctx2, 0, std::nullopt, {V(0), J(V(0), V(1))}});
  Vy->axioms.push_back({"upper-right", ctx2, 0, std::nullopt, {V(1), J(V(0), V(1))}});
  Vy->axioms.push_back({"least", ctx3, 0, std::nullopt, {J(V(0), V(1)), V(2)}});
  return Vy;
}

// met with one unary operation s and the axiom identifying s(s(x)) with s(x)
std::shared_ptr<Variety> metIdemVariety() {
  auto Vy = std::make_shared<Variety>();
  Vy->name = "met-idem";
  Vy->theory = std::make_shared<HornTheory>(theoryMet());
  Structure pt;
  pt.points = {"p"};
  pt.addFam(0, 0, 0, FamVal{Rat::zero(), true});
  Vy->ops.push_back({"s", pt});
  Structure ctx1 = pt;
  ctx1.points = {"x"};
  STerm sx = STerm::mkApp(0, {V(0)});
  STerm ssx = STerm::mkApp(0, {sx});
  Vy->axioms.push_back({"idem", ctx1, 0, Rat::zero(), {ssx, sx}});
  return Vy;
}

Structure twoPointsAt(Rat d) {
  return metricToStructure({"x", "y"}, {{Rat::zero(), d}, {d, Rat::zero()}});
}

}  // namespace

TEST_CASE("empty signature: the free algebra is the reflection") {
  auto Vy = std::make_shared<Variety>();
  Vy->name = "bare";
  Vy->theory = std::make_shared<HornTheory>(theoryPos());

  auto F = freeAlgebra(Vy, posChain(3), 1);
  CHECK(F.stabilized);
  CHECK(F.carrier.size() == 3);
  CHECK(isomorphic(F.carrier, posChain(3)));
  CHECK(F.unit == Morphism{0, 1, 2});

  // a 2-cycle collapses to a point
  Structure cyc = posDiscrete({"x", "y"});
  cyc.addEdge(0, {0, 1});
  cyc.addEdge(0, {1, 0});
  auto Fc = freeAlgebra(Vy, cyc, 1);
  CHECK(Fc.stabilized);
  CHECK(Fc.carrier.size() == 1);
  CHECK(Fc.unit == Morphism{0, 0});
}

TEST_CASE("free semilattice over the 2-antichain") {
  auto Vy = semilatticeVariety();
  Structure X = posDiscrete({"x", "y"});
  auto F = freeAlgebra(Vy, X, 2);
  REQUIRE(F.stabilized);
  CHECK(F.carrier.size() == 3);
  CHECK(isModel(*Vy->theory, F.carrier));
  CHECK(satisfiesAll(F.algebra));
  CHECK(preservesRelations(X, F.carrier, F.unit));

  // [x], [y] below [x v y]; generators incomparable
  int jx = *F.pointOf(J(V(0), V(1)));
  CHECK(F.carrier.hasEdge(0, {F.unit[0], jx}));
  CHECK(F.carrier.hasEdge(0, {F.unit[1], jx}));
  CHECK(!F.carrier.hasEdge(0, {F.unit[0], F.unit[1]}));

  // evaluating any term along the unit lands in its own class
  for (auto t : {V(0), J(V(0), V(1)), J(V(1), J(V(0), V(0)))})
    CHECK(evaluate(F.algebra, X, F.unit, t) == F.pointOf(t));

  // splitting independence: alternative members give the same answers
  STerm alt = J(J(V(0), V(1)), V(0));  // another member of [x v y]
  CHECK(F.pointOf(alt) == F.pointOf(J(V(0), V(1))));
  CHECK(F.pointOf(J(alt, V(1))) == F.pointOf(J(J(V(0), V(1)), V(1))));
}

TEST_CASE("universal extension and its uniqueness") {
  auto Vy = semilatticeVariety();
  Structure X = posDiscrete({"x", "y"});
  auto F = freeAlgebra(Vy, X, 2);
  REQUIRE(F.stabilized);

  Structure c2 = posChain(2);
  std::vector<int> maxT;
  for (auto& m : morphisms(Vy->ops[0].arity, c2)) maxT.push_back(std::max(m[0], m[1]));
  SigmaAlgebra A = makeAlgebra(Vy, c2, {maxT});

  std::string why;
  Morphism f{0, 1};
  auto h = universalExtension(F, A, f, &why);
  REQUIRE_MESSAGE(h.has_value(), why);
  CHECK((*h)[F.unit[0]] == 0);
  CHECK((*h)[F.unit[1]] == 1);
  CHECK((*h)[*F.pointOf(J(V(0), V(1)))] == 1);
  CHECK(isHomomorphism(F.algebra, A, *h));

  // unique among homomorphisms agreeing with f on generators
  int found = 0;
  for (auto& g : morphisms(F.carrier, A.carrier)) {
    if (!isHomomorphism(F.algebra, A, g)) continue;
    bool agrees = true;
    for (int x = 0; x < X.size(); x++) agrees &= g[F.unit[x]] == f[x];
    if (agrees) {
      found++;
      CHECK(g == *h);
    }
  }
  CHECK(found == 1);

  // extending the unit into F itself gives the identity
  auto id = universalExtension(F, F.algebra, F.unit, &why);
  REQUIRE_MESSAGE(id.has_value(), why);
  CHECK(*id == identityMor(F.carrier));

  // the empty context gives the initial algebra
  auto F0 = freeAlgebra(Vy, Structure{}, 2);
  REQUIRE(F0.stabilized);
  CHECK(F0.carrier.size() == 0);
  auto h0 = universalExtension(F0, A, {}, &why);
  REQUIRE_MESSAGE(h0.has_value(), why);
  CHECK(h0->empty());
}

TEST_CASE("distances between operation terms are forced by congruence") {
  // free met algebra with a unary operation: d(s x, s y) <= d(x, y)
  auto Vy = metIdemVariety();
  Structure X = twoPointsAt(Rat(1, 2));
  auto F = freeAlgebra(Vy, X, 2, 2000000);
  REQUIRE(F.stabilized);
  CHECK(F.carrier.size() == 4);  // x, y, s x, s y
  STerm sx = STerm::mkApp(0, {V(0)}), sy = STerm::mkApp(0, {V(1)});
  CHECK(F.bank->holds(LJudgement::rel(0, Rat(1, 2), {sx, sy})));
  CHECK(F.pointOf(STerm::mkApp(0, {sx})) == F.pointOf(sx));
  const FamVal* d = F.carrier.famVal(0, *F.pointOf(sx), *F.pointOf(sy));
  REQUIRE(d != nullptr);
  CHECK(d->v <= Rat(1, 2));
  CHECK(satisfiesAll(F.algebra));
}

TEST_CASE("unstabilized approximations are flagged, not silently wrong") {
  // a free unary operation over met never stabilizes: s^n x are all distinct
  auto Vy = std::make_shared<Variety>();
  Vy->name = "free-unary";
  Vy->theory = std::make_shared<HornTheory>(theoryMet());
  Structure pt;
  pt.points = {"p"};
  Vy->ops.push_back({"s", pt});
  auto F = freeAlgebra(Vy, twoPointsAt(Rat(1, 2)), 2, 2000000);
  CHECK(!F.stabilized);
  std::string why;
  CHECK(!universalExtension(F, F.algebra, F.unit, &why).has_value());
  CHECK(why.find("stabilized") != std::string::npos);
}

TEST_CASE("monad laws for the free semilattice") {
  auto Vy = semilatticeVariety();
  std::vector<Structure> objs{posDiscrete({"x"}), posDiscrete({"x", "y"})};
  auto rep = checkMonadLaws(Vy, objs, 2);
  CHECK_MESSAGE(rep.ok, rep.detail);
  CHECK(rep.unitChecks > 0);
  CHECK(rep.assocChecks > 0);
  CHECK(rep.enrichChecks == 4);
}

TEST_CASE("monad laws for a metric variety") {
  auto Vy = metIdemVariety();
  std::vector<Structure> objs{twoPointsAt(Rat(1, 2)), twoPointsAt(Rat(1, 1))};
  auto rep = checkMonadLaws(Vy, objs, 2, kDefaultGuard, 4000000);
  CHECK_MESSAGE(rep.ok, rep.detail);
  CHECK(rep.unitChecks > 0);
  CHECK(rep.assocChecks > 0);
}

TEST_CASE("completeness of the bank against the free algebra") {
  auto Vy = semilatticeVariety();
  Structure X = posDiscrete({"x", "y"});
  auto F = freeAlgebra(Vy, X, 2);
  REQUIRE(F.stabilized);
  // derivable judgements are exactly those holding in F X under the unit
  for (auto t1 : {V(0), V(1), J(V(0), V(1)), J(V(1), V(0)), J(V(0), V(0))})
    for (auto t2 : {V(0), V(1), J(V(0), V(1)), J(V(1), V(0))}) {
      LJudgement g = LJudgement::rel(0, std::nullopt, {t1, t2});
      bool inF = F.carrier.hasEdge(
          0, {*evaluate(F.algebra, X, F.unit, t1), *evaluate(F.algebra, X, F.unit, t2)});
      CHECK(F.bank->holds(g) == inF);
    }
}
