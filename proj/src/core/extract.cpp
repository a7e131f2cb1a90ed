#include "extract.hpp"

#include <sstream>
#include <stdexcept>

namespace relat {

MonadOracle makeOracle(std::shared_ptr<const HornTheory> theory, std::vector<Structure> objects,
                       std::vector<Structure> t, std::vector<Morphism> unit,
                       std::function<Morphism(int, int, const Morphism&)> extend,
                       long long guard) {
  if (objects.size() != t.size() || objects.size() != unit.size())
    throw std::invalid_argument("oracle: universe, object map and unit sizes disagree");
  MonadOracle M{std::move(theory), std::move(objects), std::move(t), std::move(unit),
                std::move(extend)};
  int n = (int)M.objects.size();
  auto fail = [&](const std::string& m) { throw std::invalid_argument("oracle: " + m); };
  for (int i = 0; i < n; i++) {
    if ((int)M.unit[i].size() != M.objects[i].size()) fail("unit has the wrong size");
    if (!isModel(*M.theory, M.t[i])) fail("object map image is not a model");
    if (!preservesRelations(M.objects[i], M.t[i], M.unit[i]))
      fail("unit does not preserve relations");
    // eta* = id
    if (M.extend(i, i, M.unit[i]) != identityMor(M.t[i])) fail("eta* is not the identity");
  }
  std::vector<std::vector<std::vector<Morphism>>> gen(n);
  for (int i = 0; i < n; i++) {
    gen[i].resize(n);
    for (int j = 0; j < n; j++) gen[i][j] = morphisms(M.objects[i], M.t[j], guard);
  }
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++)
      for (auto& f : gen[i][j]) {
        Morphism fs = M.extend(i, j, f);
        if ((int)fs.size() != M.t[i].size()) fail("extension has the wrong size");
        if (!preservesRelations(M.t[i], M.t[j], fs))
          fail("extension does not preserve relations");
        for (int x = 0; x < M.objects[i].size(); x++)
          if (fs[M.unit[i][x]] != f[x]) fail("f* . eta differs from f");
        for (int k = 0; k < n; k++)
          for (auto& g : gen[j][k]) {
            Morphism gs = M.extend(j, k, g);
            Morphism gf;
            for (int x : f) gf.push_back(gs[x]);
            if (composeMor(fs, gs) != M.extend(i, k, gf))
              fail("associativity law fails");
          }
      }
  return M;
}

STerm InducedTheory::opTerm(int g, int e) const {
  const Structure& ar = variety->ops[opOf[g][e]].arity;
  std::vector<STerm> args;
  for (int i = 0; i < ar.size(); i++) args.push_back(STerm::mkVar(i));
  return STerm::mkApp(opOf[g][e], std::move(args));
}

namespace {

// One axiom per equality-witness atom equating two terms over a context.
void eqAxioms(std::vector<SigmaRelation>& out, const std::string& name, const Structure& ctx,
              const STerm& lhs, const STerm& rhs, const HornTheory& th) {
  for (size_t k = 0; k < th.eqWitness.size(); k++) {
    const EqAtom& w = th.eqWitness[k];
    if (w.sym == kEqSym)
      throw std::invalid_argument(
          "induced theory: ambient equality witness is not relational");
    std::string n = th.eqWitness.size() > 1 ? name + "/" + std::to_string(k) : name;
    out.push_back({n, ctx, w.sym, w.idx,
                   {w.a == 0 ? lhs : rhs, w.b == 0 ? lhs : rhs}});
  }
}

}  // namespace

InducedTheory induceTheory(const MonadOracle& M, const std::vector<int>& arities,
                           long long guard) {
  InducedTheory I;
  I.arities = arities;
  I.variety = std::make_shared<Variety>();
  I.variety->name = "induced";
  I.variety->theory = M.theory;
  for (size_t g = 0; g < arities.size(); g++) {
    int u = arities[g];
    const Structure& TG = M.t[u];
    std::vector<int> ids;
    for (int e = 0; e < TG.size(); e++) {
      ids.push_back((int)I.variety->ops.size());
      I.variety->ops.push_back(
          {"g" + std::to_string(g) + "_" + TG.points[e], M.objects[u]});
    }
    I.opOf.push_back(std::move(ids));
  }
  // family 1: every relational fact of T(arity), over the operation terms
  for (size_t g = 0; g < arities.size(); g++) {
    int u = arities[g];
    const Structure& TG = M.t[u];
    const Structure& ctx = M.objects[u];
    int k = 0;
    for (auto& e : TG.edges) {
      std::vector<STerm> args;
      for (int p : e.pts) args.push_back(I.opTerm((int)g, p));
      I.variety->axioms.push_back({"rel-g" + std::to_string(g) + "-" + std::to_string(k++), ctx,
                                   e.sym, std::nullopt, std::move(args)});
    }
    for (auto& [key, fv] : TG.fam) {
      auto [sym, p, q] = key;
      if (!fv.attained)
        throw std::invalid_argument("induced theory: non-attained fact in an object map image");
      I.variety->axioms.push_back({"rel-g" + std::to_string(g) + "-" + std::to_string(k++), ctx,
                                   sym, fv.v,
                                   {I.opTerm((int)g, p), I.opTerm((int)g, q)}});
    }
  }
  // family 2: extension equations f*(sigma) = sigma(f)
  for (size_t d = 0; d < arities.size(); d++)
    for (size_t g = 0; g < arities.size(); g++) {
      int ud = arities[d], ug = arities[g];
      auto maps = morphisms(M.objects[ud], M.t[ug], guard);
      int k = 0;
      for (auto& f : maps) {
        Morphism fs = M.extend(ud, ug, f);
        std::vector<STerm> fArgs;
        for (int x : f) fArgs.push_back(I.opTerm((int)g, x));
        for (int sigma = 0; sigma < M.t[ud].size(); sigma++) {
          STerm lhs = I.opTerm((int)g, fs[sigma]);
          STerm rhs = STerm::mkApp(I.opOf[d][sigma], fArgs);
          eqAxioms(I.variety->axioms,
                   "ext-d" + std::to_string(d) + "-g" + std::to_string(g) + "-" +
                       std::to_string(k),
                   M.objects[ug], lhs, rhs, *M.theory);
          k++;
        }
      }
    }
  // family 3: unit equations eta(x) = x
  for (size_t g = 0; g < arities.size(); g++) {
    int u = arities[g];
    for (int x = 0; x < M.objects[u].size(); x++)
      eqAxioms(I.variety->axioms, "unit-g" + std::to_string(g) + "-" + std::to_string(x),
               M.objects[u], I.opTerm((int)g, M.unit[u][x]), STerm::mkVar(x), *M.theory);
  }
  return I;
}

SigmaAlgebra canonicalAlgebra(const MonadOracle& M, const InducedTheory& I, int x,
                              long long guard) {
  std::vector<std::vector<int>> interp;
  for (size_t g = 0; g < I.arities.size(); g++) {
    int u = I.arities[g];
    auto homs = morphisms(M.objects[u], M.t[x], guard);
    std::vector<std::vector<int>> ext;
    for (auto& f : homs) ext.push_back(M.extend(u, x, f));
    for (int e = 0; e < M.t[u].size(); e++) {
      std::vector<int> table;
      for (auto& fs : ext) table.push_back(fs[e]);
      interp.push_back(std::move(table));
    }
  }
  return makeAlgebra(I.variety, M.t[x], std::move(interp), guard);
}

RoundtripReport verifyRoundtrip(std::shared_ptr<const Variety> V,
                                const std::vector<Structure>& arities,
                                const std::vector<Structure>& palette, int depth, long long guard,
                                long long fuel) {
  RoundtripReport rep;
  std::vector<FreeAlgebraApprox> F;
  for (auto& X : arities) {
    F.push_back(freeAlgebra(V, X, depth, fuel));
    if (!F.back().stabilized) {
      rep.detail = "free algebra did not stabilize at depth " + std::to_string(depth);
      return rep;
    }
  }
  std::vector<Structure> t;
  std::vector<Morphism> unit;
  for (auto& f : F) {
    t.push_back(f.carrier);
    unit.push_back(f.unit);
  }
  MonadOracle M;
  try {
    M = makeOracle(V->theory, arities, t, unit,
                   [&](int i, int j, const Morphism& f) {
                     auto e = kleisliExtension(F[i], F[j], f);
                     if (!e) throw std::runtime_error("kleisli extension failed");
                     return *e;
                   },
                   guard);
  } catch (std::exception& e) {
    rep.detail = e.what();
    return rep;
  }
  std::vector<int> idx(arities.size());
  for (size_t i = 0; i < idx.size(); i++) idx[i] = (int)i;
  InducedTheory I = induceTheory(M, idx, guard);

  // every canonical algebra lies in the induced variety
  std::vector<SigmaAlgebra> canon;
  for (size_t i = 0; i < arities.size(); i++) {
    canon.push_back(canonicalAlgebra(M, I, (int)i, guard));
    std::string why;
    if (!satisfiesAll(canon.back(), &why, guard)) {
      rep.detail = "canonical algebra violates an induced axiom: " + why;
      return rep;
    }
    rep.canonicalChecks++;
  }

  // universal property of T(arity) within the induced variety: for every
  // induced algebra A and generator map f, f-bar(sigma) = sigma_A(f) is the
  // unique homomorphism extending f along the unit
  auto algebras = enumerateAlgebras(I.variety, palette, guard, true);
  for (size_t gi = 0; gi < arities.size(); gi++) {
    const SigmaAlgebra& TX = canon[gi];
    for (auto& A : algebras)
      for (auto& f : morphisms(arities[gi], A.carrier, guard)) {
        Morphism fbar;
        for (int e = 0; e < TX.carrier.size(); e++) {
          // sigma_A(f): the table entry of operation (gi, e) at the map f
          int op = I.opOf[gi][e];
          auto it = A.homIdx[op].find(f);
          if (it == A.homIdx[op].end()) {
            rep.detail = "generator map not admissible in an induced algebra";
            return rep;
          }
          fbar.push_back(A.interp[op][it->second]);
        }
        for (int x = 0; x < arities[gi].size(); x++)
          if (fbar[M.unit[gi][x]] != f[x]) {
            rep.detail = "extension disagrees with the generator map";
            return rep;
          }
        if (!isHomomorphism(TX, A, fbar)) {
          rep.detail = "extension is not a homomorphism";
          return rep;
        }
        // uniqueness by enumeration
        int count = 0;
        for (auto& h : morphisms(TX.carrier, A.carrier, guard)) {
          if (!isHomomorphism(TX, A, h)) continue;
          bool agrees = true;
          for (int x = 0; x < arities[gi].size(); x++)
            agrees &= h[M.unit[gi][x]] == f[x];
          if (agrees) {
            count++;
            if (h != fbar) {
              rep.detail = "extension is not unique";
              return rep;
            }
          }
        }
        if (count != 1) {
          rep.detail = "extension is not unique";
          return rep;
        }
        rep.extensionChecks++;
      }
  }
  rep.ok = true;
  return rep;
}

}  // namespace relat
