#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/logic.hpp"

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

std::shared_ptr<Variety> bareVariety(HornTheory th) {
  auto Vy = std::make_shared<Variety>();
  Vy->name = "bare";
  Vy->theory = std::make_shared<HornTheory>(std::move(th));
  return Vy;
}

// lim over an n-point space of x_k = 1/k, with one axiom per k pinning
// lim within 1/k of x_k
std::shared_ptr<Variety> limVariety(int n) {
  auto Vy = std::make_shared<Variety>();
  Vy->name = "lim";
  Vy->theory = std::make_shared<HornTheory>(theoryMet());
  std::vector<std::string> names;
  std::vector<std::vector<Rat>> d(n, std::vector<Rat>(n));
  for (int i = 0; i < n; i++) {
    names.push_back("x" + std::to_string(i + 1));
    for (int j = 0; j < n; j++) {
      Rat a(1, i + 1), b(1, j + 1);
      d[i][j] = a < b ? b - a : a - b;
    }
  }
  Structure ar = metricToStructure(names, d);
  Vy->ops.push_back({"lim", ar});
  std::vector<STerm> vars;
  for (int i = 0; i < n; i++) vars.push_back(V(i));
  STerm limT = STerm::mkApp(0, vars);
  for (int k = 1; k <= n; k++)
    Vy->axioms.push_back(
        {"lim-" + std::to_string(k), ar, 0, Rat(1, k), {limT, V(k - 1)}});
  return Vy;
}

LJudgement le(STerm a, STerm b) { return LJudgement::rel(0, std::nullopt, {a, b}); }
LJudgement eqAt(Rat q, STerm a, STerm b) { return LJudgement::rel(0, q, {a, b}); }

}  // namespace

TEST_CASE("bare order theory over a chain context") {
  auto Vy = bareVariety(theoryPos());
  Structure X = posChain(3);
  Bank b(Vy, X, 0);
  CHECK(b.complete());
  CHECK(b.classCount() == 3);
  CHECK(b.holds(le(V(0), V(2))));   // transitivity
  CHECK(b.holds(le(V(1), V(1))));   // reflexivity
  CHECK(!b.holds(le(V(2), V(0))));

  auto p = b.prove(le(V(0), V(2)));
  REQUIRE(p.has_value());
  std::string why;
  CHECK(checkProof(*Vy, X, *p, &why));
  CHECK(p->conclusion() == le(V(0), V(2)));

  auto r = derive(Vy, X, le(V(2), V(0)), 0);
  CHECK(r.status == DeriveStatus::NotDerivable);
}

TEST_CASE("semilattice bank identifies join terms up to the theory") {
  auto Vy = semilatticeVariety();
  Structure X = posDiscrete({"x", "y"});
  Bank b(Vy, X, 2);
  CHECK(b.complete());
  // x, y, and the join; idempotence and commutativity collapse the rest
  CHECK(b.classCount() == 3);
  CHECK(b.classOf(J(V(0), V(0))) == b.classOf(V(0)));
  CHECK(b.classOf(J(V(0), V(1))) == b.classOf(J(V(1), V(0))));
  CHECK(b.classOf(J(V(0), J(V(0), V(1)))) == b.classOf(J(V(0), V(1))));
  CHECK(b.classOf(V(0)) != b.classOf(V(1)));

  CHECK(b.holds(le(V(0), J(V(1), V(0)))));
  CHECK(!b.holds(le(J(V(0), V(1)), V(0))));

  // commutativity as the pair of order judgements
  for (auto g : {le(J(V(0), V(1)), J(V(1), V(0))), le(J(V(1), V(0)), J(V(0), V(1)))}) {
    auto p = b.prove(g);
    REQUIRE(p.has_value());
    std::string why;
    CHECK_MESSAGE(checkProof(*Vy, X, *p, &why), why);
    CHECK(p->conclusion() == g);
  }
}

TEST_CASE("depth exhaustion is distinguished from refutation") {
  auto Vy = semilatticeVariety();
  Structure X = posDiscrete({"x", "y"});
  LJudgement deep = le(V(0), J(V(0), J(V(0), V(1))));
  CHECK(derive(Vy, X, deep, 1).status == DeriveStatus::DepthExhausted);
  auto r = derive(Vy, X, deep, 2);
  REQUIRE(r.status == DeriveStatus::Derived);
  std::string why;
  CHECK_MESSAGE(checkProof(*Vy, X, *r.proof, &why), why);

  // genuinely underivable at a depth where the bank stabilizes
  CHECK(derive(Vy, X, le(J(V(0), V(1)), V(1)), 2).status == DeriveStatus::NotDerivable);
}

TEST_CASE("banks are monotone in depth") {
  auto Vy = semilatticeVariety();
  Structure X = posDiscrete({"x", "y"});
  Bank b1(Vy, X, 1), b2(Vy, X, 2);
  CHECK(!b1.complete());  // depth-2 instances were skipped
  CHECK(b2.complete());
  for (auto g : {le(V(0), J(V(0), V(1))), le(J(V(0), V(1)), J(V(1), V(0))),
                 LJudgement::def(J(V(0), V(1)))})
    if (b1.holds(g)) CHECK(b2.holds(g));
  CHECK(b1.classCount() == 3);
  CHECK(b2.classCount() == 3);
}

TEST_CASE("empty context") {
  auto Vy = semilatticeVariety();
  Structure X;
  Bank b(Vy, X, 2);
  CHECK(b.complete());
  CHECK(b.classCount() == 0);
  CHECK(derive(Vy, X, LJudgement::def(V(0)), 2).status == DeriveStatus::NotDerivable);
}

TEST_CASE("metric limit fixture") {
  int n = 3;
  auto Vy = limVariety(n);
  std::vector<std::string> names{"x1", "x2", "x3"};
  std::vector<std::vector<Rat>> d(n, std::vector<Rat>(n));
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) {
      Rat a(1, i + 1), b(1, j + 1);
      d[i][j] = a < b ? b - a : a - b;
    }
  Structure X = metricToStructure(names, d);
  std::vector<STerm> vars{V(0), V(1), V(2)};
  STerm limT = STerm::mkApp(0, vars);

  auto r = derive(Vy, X, eqAt(Rat(1, 2), limT, V(1)), 1, 2000000);
  REQUIRE(r.status == DeriveStatus::Derived);
  std::string why;
  CHECK_MESSAGE(checkProof(*Vy, X, *r.proof, &why), why);

  // the limit term is not within 1/4 of x1: 1/2 is the best derivable bound
  CHECK(derive(Vy, X, eqAt(Rat(1, 4), limT, V(0)), 1, 2000000).status !=
        DeriveStatus::Derived);
  // but 1/1 is derivable outright
  CHECK(derive(Vy, X, eqAt(Rat(1, 1), limT, V(0)), 1, 2000000).status ==
        DeriveStatus::Derived);
}

TEST_CASE("non-attained context entries close at the infimum") {
  auto Vy = bareVariety(theoryMet());
  Structure X;
  X.points = {"x", "y"};
  X.addFam(0, 0, 1, FamVal{Rat(1, 3), false});
  X.addFam(0, 1, 0, FamVal{Rat(1, 3), false});
  Bank b(Vy, X, 0, 2000000);
  CHECK(b.holds(eqAt(Rat(1, 3), V(0), V(1))));
  CHECK(b.holds(eqAt(Rat(1, 2), V(0), V(1))));

  auto p = b.prove(eqAt(Rat(1, 3), V(0), V(1)));
  REQUIRE(p.has_value());
  std::string why;
  CHECK_MESSAGE(checkProof(*Vy, X, *p, &why), why);
  bool sawLim = false;
  for (auto& nd : p->nodes) sawLim |= nd.rule == LProofNode::Lim;
  CHECK(sawLim);

  // forging the limit index must be caught
  LProof forged = *p;
  for (auto& nd : forged.nodes)
    if (nd.rule == LProofNode::Lim) nd.concl.idx = Rat(1, 4);
  CHECK(!checkProof(*Vy, X, forged));

  // without the limit rule such a context is rejected outright
  auto Vp = bareVariety(theoryPos());
  Structure Xp;
  Xp.points = {"x", "y"};
  Xp.addFam(0, 0, 1, FamVal{Rat(1, 3), false});
  CHECK_THROWS(Bank(Vp, Xp, 0));
}

TEST_CASE("forged proof nodes are rejected") {
  auto Vy = semilatticeVariety();
  Structure X = posDiscrete({"x", "y"});
  Bank b(Vy, X, 2);
  auto p = b.prove(le(V(0), J(V(0), V(1))));
  REQUIRE(p.has_value());
  REQUIRE(checkProof(*Vy, X, *p));

  {
    // a context node citing an edge the context does not have
    LProof f = *p;
    LProofNode n;
    n.rule = LProofNode::Ctx;
    n.concl = le(V(0), V(1));
    f.nodes.insert(f.nodes.begin(), n);
    for (size_t i = 1; i < f.nodes.size(); i++)
      for (auto& q : f.nodes[i].prem) q++;
    std::string why;
    CHECK(!checkProof(*Vy, X, f, &why));
    CHECK(!why.empty());
  }
  {
    // flipping the final conclusion
    LProof f = *p;
    std::swap(f.nodes.back().concl.terms[0], f.nodes.back().concl.terms[1]);
    CHECK(!checkProof(*Vy, X, f));
  }
  {
    // rebinding an axiom instance's substitution
    LProof f = *p;
    bool mutated = false;
    for (auto& nd : f.nodes)
      if (!mutated && nd.rule == LProofNode::Ax && !nd.tau.empty()) {
        std::swap(nd.tau[0], nd.tau[1]);
        mutated = true;
      }
    REQUIRE(mutated);
    CHECK(!checkProof(*Vy, X, f));
  }
  {
    // dangling premise
    LProof f = *p;
    for (auto& nd : f.nodes)
      if (!nd.prem.empty()) {
        nd.prem[0] = (int)f.nodes.size();
        break;
      }
    CHECK(!checkProof(*Vy, X, f));
  }
}

TEST_CASE("admissible arity projection") {
  auto Vy = semilatticeVariety();
  Structure X = posDiscrete({"x", "y"});
  Bank b(Vy, X, 1);
  auto p = b.prove(LJudgement::def(J(V(0), V(1))));
  REQUIRE(p.has_value());
  REQUIRE(checkProof(*Vy, X, *p));

  std::string why;
  auto q = admissibleArity(*Vy, X, *p, 0, std::nullopt, {0, 0}, &why);
  REQUIRE_MESSAGE(q.has_value(), why);
  CHECK(q->conclusion() == le(V(0), V(0)));
  CHECK_MESSAGE(checkProof(*Vy, X, *q, &why), why);

  // an edge the arity does not carry
  CHECK(!admissibleArity(*Vy, X, *p, 0, std::nullopt, {0, 1}, &why).has_value());

  // family case, including weakening past the stored value
  auto Vl = limVariety(2);
  std::vector<std::vector<Rat>> d{{Rat(0), Rat(1, 2)}, {Rat(1, 2), Rat(0)}};
  Structure Xm = metricToStructure({"x1", "x2"}, d);
  Bank bm(Vl, Xm, 1, 2000000);
  STerm lt = STerm::mkApp(0, {V(0), V(1)});
  auto pm = bm.prove(LJudgement::def(lt));
  REQUIRE(pm.has_value());
  REQUIRE(checkProof(*Vl, Xm, *pm));
  auto qm = admissibleArity(*Vl, Xm, *pm, 0, Rat(1, 2), {0, 1}, &why);
  REQUIRE_MESSAGE(qm.has_value(), why);
  CHECK(qm->conclusion() == eqAt(Rat(1, 2), V(0), V(1)));
  CHECK_MESSAGE(checkProof(*Vl, Xm, *qm, &why), why);
  auto qw = admissibleArity(*Vl, Xm, *pm, 0, Rat(3, 4), {0, 1}, &why);
  REQUIRE_MESSAGE(qw.has_value(), why);
  CHECK(qw->conclusion() == eqAt(Rat(3, 4), V(0), V(1)));
  CHECK_MESSAGE(checkProof(*Vl, Xm, *qw, &why), why);
}

TEST_CASE("admissible subterm definedness") {
  auto Vy = semilatticeVariety();
  Structure X = posDiscrete({"x", "y"});
  Bank b(Vy, X, 2);
  auto p = b.prove(le(V(0), J(V(0), J(V(0), V(1)))));
  REQUIRE(p.has_value());
  REQUIRE(checkProof(*Vy, X, *p));

  std::string why;
  for (auto u : {J(V(0), J(V(0), V(1))), J(V(0), V(1)), V(1)}) {
    auto q = admissibleSubterm(*Vy, X, *p, u, &why);
    REQUIRE_MESSAGE(q.has_value(), why);
    CHECK(q->conclusion() == LJudgement::def(u));
    CHECK_MESSAGE(checkProof(*Vy, X, *q, &why), why);
  }
  // not a subterm at all
  CHECK(!admissibleSubterm(*Vy, X, *p, J(V(1), V(1)), &why).has_value());
}

TEST_CASE("admissible substitution") {
  auto Vy = semilatticeVariety();
  Structure Y = posDiscrete({"x", "y"});
  Bank by(Vy, Y, 1);
  auto p = by.prove(le(V(0), J(V(0), V(1))));
  REQUIRE(p.has_value());

  Structure X = posDiscrete({"a", "b", "c"});
  Bank bx(Vy, X, 2);
  std::vector<STerm> tau{J(V(0), V(1)), V(2)};
  // stored items of Y in order: le(x,x), le(y,y)
  std::vector<LProof> edgeProofs;
  for (auto j : {le(tau[0], tau[0]), le(tau[1], tau[1])}) {
    auto e = bx.prove(j);
    REQUIRE(e.has_value());
    edgeProofs.push_back(*e);
  }
  std::vector<LProof> defProofs;
  for (auto& t : tau) {
    auto e = bx.prove(LJudgement::def(t));
    REQUIRE(e.has_value());
    defProofs.push_back(*e);
  }
  std::string why;
  auto q = admissibleSubstitute(*Vy, X, Y, tau, edgeProofs, defProofs, *p, &why);
  REQUIRE_MESSAGE(q.has_value(), why);
  CHECK(q->conclusion() == le(tau[0], J(tau[0], tau[1])));
  CHECK_MESSAGE(checkProof(*Vy, X, *q, &why), why);

  // wrong premise shape is reported
  CHECK(!admissibleSubstitute(*Vy, X, Y, tau, {}, defProofs, *p, &why).has_value());
}

TEST_CASE("proof printing round-trips through the judgement printer") {
  auto Vy = semilatticeVariety();
  Structure X = posDiscrete({"x", "y"});
  Bank b(Vy, X, 2);
  auto p = b.prove(le(J(V(0), V(1)), J(V(1), V(0))));
  REQUIRE(p.has_value());
  std::string s = printProof(*Vy, X, *p);
  CHECK(s.find("le(") != std::string::npos);
  CHECK(s.find("join{") != std::string::npos);
  CHECK(judgementStr(le(V(0), V(1)), X, Vy->ops, *Vy->theory) == "le(x, y)");
  CHECK(judgementStr(LJudgement::def(J(V(0), V(1))), X, Vy->ops, *Vy->theory) ==
        "def join{p->x,q->y}");
}
