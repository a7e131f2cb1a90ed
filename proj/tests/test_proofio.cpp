#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "core/proofio.hpp"

using namespace relat;

namespace {

Structure posDiscrete(const std::vector<std::string>& pts) {
  Structure s;
  s.points = pts;
  for (int i = 0; i < s.size(); i++) s.addEdge(0, {i, i});
  return s;
}

std::shared_ptr<Variety> semilatticeVariety() {
  auto Vy = std::make_shared<Variety>();
  Vy->name = "semilattice";
  Vy->theory = std::make_shared<HornTheory>(theoryPos());
  Vy->ops.push_back({"join", posDiscrete({"p", "q"})});
  Structure ctx2 = posDiscrete({"x", "y"});
  Structure ctx3 = posDiscrete({"x", "y", "z"});
  ctx3.addEdge(0, {0, 2});
  ctx3.addEdge(0, {1, 2});
  auto V = [](int i) { return STerm::mkVar(i); };
  auto J = [](STerm a, STerm b) { return STerm::mkApp(0, {std::move(a), std::move(b)}); };
  Vy->axioms.push_back({"upper-left", ctx2, 0, std::nullopt, {V(0), J(V(0), V(1))}});
  Vy->axioms.push_back({"upper-right", ctx2, 0, std::nullopt, {V(1), J(V(0), V(1))}});
  Vy->axioms.push_back({"least", ctx3, 0, std::nullopt, {J(V(0), V(1)), V(2)}});
  return Vy;
}

}  // namespace

TEST_CASE("proof documents roundtrip and still check") {
  auto Vy = semilatticeVariety();
  Structure X = posDiscrete({"a", "b"});
  auto J = [](STerm a, STerm b) { return STerm::mkApp(0, {std::move(a), std::move(b)}); };
  LJudgement goal =
      LJudgement::rel(0, std::nullopt, {STerm::mkVar(0), J(STerm::mkVar(0), STerm::mkVar(1))});
  auto r = derive(Vy, X, goal, 2);
  REQUIRE(r.status == DeriveStatus::Derived);

  std::string doc = proofToJson(*r.proof);
  LProof back = proofFromJson(doc);
  CHECK(proofToJson(back) == doc);  // byte-identical re-serialization
  CHECK(back.conclusion() == goal);
  std::string why;
  CHECK_MESSAGE(checkProof(*Vy, X, back, &why), why);
}

TEST_CASE("proof documents with rational bindings roundtrip") {
  auto Vy = std::make_shared<Variety>();
  Vy->name = "bare-met";
  Vy->theory = std::make_shared<HornTheory>(theoryMet());
  Structure X;
  X.points = {"a", "b", "c"};
  for (int i = 0; i < 3; i++) X.addFam(0, i, i, FamVal{Rat::zero(), true});
  X.addFam(0, 0, 1, FamVal{Rat(1, 4), true});
  X.addFam(0, 1, 2, FamVal{Rat(1, 4), true});
  LJudgement goal = LJudgement::rel(0, Rat(1, 2), {STerm::mkVar(0), STerm::mkVar(2)});
  auto r = derive(Vy, X, goal, 1);
  REQUIRE(r.status == DeriveStatus::Derived);
  bool sawBind = false;
  for (auto& n : r.proof->nodes) sawBind |= !n.ratBind.empty();
  CHECK(sawBind);
  LProof back = proofFromJson(proofToJson(*r.proof));
  CHECK(proofToJson(back) == proofToJson(*r.proof));
  std::string why;
  CHECK_MESSAGE(checkProof(*Vy, X, back, &why), why);
}

TEST_CASE("malformed proof documents are rejected") {
  CHECK_THROWS_AS(proofFromJson("not json"), std::invalid_argument);
  CHECK_THROWS_AS(proofFromJson("{\"schema\":99,\"kind\":\"proof\",\"nodes\":[]}"),
                  std::invalid_argument);
  CHECK_THROWS_AS(proofFromJson("{\"schema\":1,\"kind\":\"proof\",\"nodes\":[]}"),
                  std::invalid_argument);
  // forward premise reference
  CHECK_THROWS_AS(
      proofFromJson("{\"schema\":1,\"kind\":\"proof\",\"nodes\":[{\"rule\":\"Var\","
                    "\"concl\":{\"kind\":\"def\",\"terms\":[{\"v\":0}]},\"prem\":[3]}]}"),
      std::invalid_argument);
}
