#include "freealg.hpp"

#include <sstream>

namespace relat {

std::optional<int> FreeAlgebraApprox::pointOf(const STerm& t) const {
  auto c = bank->classOf(t);
  if (!c) return std::nullopt;
  auto it = classIndex.find(*c);
  if (it == classIndex.end()) return std::nullopt;
  return it->second;
}

FreeAlgebraApprox freeAlgebra(std::shared_ptr<const Variety> V, const Structure& X, int depth,
                              long long fuel) {
  FreeAlgebraApprox F;
  F.variety = V;
  F.context = X;
  F.depth = depth;

  Bank bd(V, X, depth, fuel);
  F.bank = std::make_shared<Bank>(V, X, depth + 1, fuel);
  Bank& b1 = *F.bank;

  auto cls0 = bd.liveClasses();
  auto cls1 = b1.liveClasses();
  for (int c : cls0) F.reps.push_back(bd.repTerm(c));

  bool stable = !bd.fuelExhausted() && !b1.fuelExhausted() && cls0.size() == cls1.size();
  // canonical bijection: a depth-d class maps to the depth-(d+1) class of
  // its representative
  for (size_t i = 0; i < F.reps.size(); i++) {
    auto r1 = b1.classOf(F.reps[i]);
    if (!r1 || F.classIndex.count(*r1)) {
      stable = false;
      continue;
    }
    F.classIndex[*r1] = (int)i;
  }
  for (int c : cls1)
    if (!F.classIndex.count(c)) stable = false;

  F.carrier.name = "F(" + (X.name.empty() ? "X" : X.name) + ")";
  for (auto& r : F.reps) F.carrier.points.push_back(termStr(r, X, V->ops));

  // class-level facts, in carrier coordinates; stabilization also requires
  // the two banks to agree on them
  auto factsOf = [&](Bank& b, const std::map<int, int>& idx, Structure& out) {
    bool ok = true;
    for (auto& e : b.classEdges()) {
      std::vector<int> pts;
      for (int p : e.pts) {
        auto it = idx.find(p);
        if (it == idx.end()) {
          ok = false;
          break;
        }
        pts.push_back(it->second);
      }
      if (pts.size() == e.pts.size()) out.addEdge(e.sym, pts);
    }
    for (auto& [k, fv] : b.classFam()) {
      auto [sym, p, q] = k;
      auto i1 = idx.find(p), i2 = idx.find(q);
      if (i1 == idx.end() || i2 == idx.end()) {
        ok = false;
        continue;
      }
      out.addFam(sym, i1->second, i2->second, fv);
    }
    return ok;
  };
  std::map<int, int> idx0;
  for (size_t i = 0; i < cls0.size(); i++) idx0[cls0[i]] = (int)i;
  Structure facts0, facts1;
  facts0.points = facts1.points = F.carrier.points;
  factsOf(bd, idx0, facts0);
  if (!factsOf(b1, F.classIndex, facts1)) stable = false;
  if (facts0.edges != facts1.edges || facts0.fam != facts1.fam) stable = false;

  F.carrier.edges = facts1.edges;
  F.carrier.fam = facts1.fam;

  F.unit.resize(X.size());
  for (int x = 0; x < X.size(); x++) {
    auto c = b1.classOf(STerm::mkVar(x));
    F.unit[x] = c && F.classIndex.count(*c) ? F.classIndex.at(*c) : -1;
  }

  F.stabilized = stable;
  if (!stable) return F;

  std::vector<std::vector<int>> interp;
  for (size_t op = 0; op < V->ops.size(); op++) {
    std::vector<int> table;
    for (auto& f : morphisms(V->ops[op].arity, F.carrier)) {
      std::vector<STerm> args;
      for (int v : f) args.push_back(F.reps[v]);
      auto pt = F.pointOf(STerm::mkApp((int)op, args));
      if (!pt) {
        F.stabilized = false;
        return F;
      }
      table.push_back(*pt);
    }
    interp.push_back(std::move(table));
  }
  F.algebra = makeAlgebra(V, F.carrier, std::move(interp));
  return F;
}

std::optional<Morphism> universalExtension(const FreeAlgebraApprox& F, const SigmaAlgebra& A,
                                           const Morphism& f, std::string* why) {
  auto fail = [&](const std::string& m) {
    if (why) *why = m;
    return std::nullopt;
  };
  if (!F.stabilized) return fail("free algebra approximation is not stabilized");
  if ((int)f.size() != F.context.size()) return fail("generator map has the wrong size");
  if (!preservesRelations(F.context, A.carrier, f))
    return fail("generator map does not preserve relations");
  Morphism h;
  for (auto& r : F.reps) {
    auto v = evaluate(A, F.context, f, r);
    if (!v) return fail("representative term undefined in the target algebra");
    h.push_back(*v);
  }
  for (int x = 0; x < F.context.size(); x++)
    if (h[F.unit[x]] != f[x]) return fail("extension disagrees with the generator map");
  if (!isHomomorphism(F.algebra, A, h)) return fail("extension is not a homomorphism");
  return h;
}

std::optional<Morphism> kleisliExtension(const FreeAlgebraApprox& FX, const FreeAlgebraApprox& FY,
                                         const Morphism& f, std::string* why) {
  if (!FY.stabilized) {
    if (why) *why = "target free algebra approximation is not stabilized";
    return std::nullopt;
  }
  return universalExtension(FX, FY.algebra, f, why);
}

MonadLawReport checkMonadLaws(std::shared_ptr<const Variety> V,
                              const std::vector<Structure>& objects, int depth, long long guard,
                              long long fuel) {
  MonadLawReport rep;
  std::vector<FreeAlgebraApprox> F;
  for (auto& X : objects) {
    F.push_back(freeAlgebra(V, X, depth, fuel));
    if (!F.back().stabilized) {
      rep.detail = "free algebra over " + (X.name.empty() ? std::string("an object") : X.name) +
                   " did not stabilize at depth " + std::to_string(depth);
      return rep;
    }
  }
  auto fmt = [&](const char* law, size_t i, size_t j) {
    std::ostringstream o;
    o << law << " fails between objects " << i << " and " << j;
    return o.str();
  };

  // eta* = id
  for (size_t i = 0; i < F.size(); i++) {
    std::string why;
    auto e = kleisliExtension(F[i], F[i], F[i].unit, &why);
    if (!e || *e != identityMor(F[i].carrier)) {
      rep.detail = fmt("eta* = id", i, i) + (why.empty() ? "" : ": " + why);
      return rep;
    }
    rep.unitChecks++;
  }
  // f* . eta = f, and associativity over all composable pairs
  std::vector<std::vector<std::vector<Morphism>>> gen(objects.size());
  for (size_t i = 0; i < objects.size(); i++) {
    gen[i].resize(objects.size());
    for (size_t j = 0; j < objects.size(); j++)
      gen[i][j] = morphisms(objects[i], F[j].carrier, guard);
  }
  std::vector<std::vector<std::map<Morphism, Morphism>>> ext(objects.size());
  for (size_t i = 0; i < objects.size(); i++) {
    ext[i].resize(objects.size());
    for (size_t j = 0; j < objects.size(); j++)
      for (auto& f : gen[i][j]) {
        std::string why;
        auto fs = kleisliExtension(F[i], F[j], f, &why);
        if (!fs) {
          rep.detail = fmt("extension", i, j) + ": " + why;
          return rep;
        }
        for (int x = 0; x < objects[i].size(); x++)
          if ((*fs)[F[i].unit[x]] != f[x]) {
            rep.detail = fmt("f* . eta = f", i, j);
            return rep;
          }
        rep.unitChecks++;
        ext[i][j][f] = *fs;
      }
  }
  for (size_t i = 0; i < objects.size(); i++)
    for (size_t j = 0; j < objects.size(); j++)
      for (size_t k = 0; k < objects.size(); k++)
        for (auto& f : gen[i][j])
          for (auto& g : gen[j][k]) {
            const Morphism& fs = ext[i][j][f];
            const Morphism& gs = ext[j][k][g];
            Morphism gf;
            for (int x : f) gf.push_back(gs[x]);
            auto it = ext[i][k].find(gf);
            Morphism rhs;
            if (it != ext[i][k].end()) {
              rhs = it->second;
            } else {
              std::string why;
              auto r = kleisliExtension(F[i], F[k], gf, &why);
              if (!r) {
                rep.detail = fmt("extension of g* . f", i, k) + ": " + why;
                return rep;
              }
              rhs = *r;
            }
            if (composeMor(fs, gs) != rhs) {
              rep.detail = fmt("g* . f* = (g* . f)*", i, k);
              return rep;
            }
            rep.assocChecks++;
          }

  // enrichment of the induced functor T(m) = (eta . m)*
  auto structKey = [](const Structure& s) {
    std::ostringstream o;
    o << s.points.size();
    for (auto& e : s.edges) {
      o << ";" << e.sym;
      for (int p : e.pts) o << "," << p;
    }
    for (auto& [k, fv] : s.fam)
      o << ";" << std::get<0>(k) << "," << std::get<1>(k) << "," << std::get<2>(k) << "="
        << fv.v.str() << (fv.attained ? "" : "~");
    return o.str();
  };
  std::map<std::string, FreeAlgebraApprox> memo;
  auto freeOf = [&](const Structure& X) -> FreeAlgebraApprox& {
    auto key = structKey(X);
    auto it = memo.find(key);
    if (it == memo.end()) it = memo.emplace(key, freeAlgebra(V, X, depth, fuel)).first;
    return it->second;
  };
  for (size_t i = 0; i < objects.size(); i++) memo.emplace(structKey(objects[i]), F[i]);
  Functor T;
  T.obj = [&](const Structure& X) { return freeOf(X).carrier; };
  T.mor = [&](const Structure& X, const Structure& Y, const Morphism& m) {
    auto& FX = freeOf(X);
    auto& FY = freeOf(Y);
    Morphism em;
    for (int x : m) em.push_back(FY.unit[x]);
    auto e = kleisliExtension(FX, FY, em);
    if (!e) throw std::runtime_error("enrichment: extension failed");
    return *e;
  };
  for (size_t i = 0; i < objects.size(); i++)
    for (size_t j = 0; j < objects.size(); j++) {
      auto er = checkEnriched(T, objects[i], objects[j], guard);
      if (!er.ok) {
        rep.detail = fmt("enriched functor", i, j) + ": " + er.detail;
        return rep;
      }
      rep.enrichChecks++;
    }

  rep.ok = true;
  return rep;
}

}  // namespace relat
