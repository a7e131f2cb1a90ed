#include "structops.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace relat {

bool preservesRelations(const Structure& X, const Structure& Y, const Morphism& m) {
  for (auto& e : X.edges) {
    std::vector<int> pts;
    for (int p : e.pts) pts.push_back(m[p]);
    if (!Y.hasEdge(e.sym, pts)) return false;
  }
  for (auto& [k, v] : X.fam) {
    auto [sym, p, q] = k;
    const FamVal* w = Y.famVal(sym, m[p], m[q]);
    if (!w || !FamVal::weaker(v, *w)) return false;
  }
  return true;
}

std::vector<Morphism> morphisms(const Structure& X, const Structure& Y, long long guard) {
  int n = X.size(), k = Y.size();
  if (n > 0 && k == 0) return {};
  double total = std::pow((double)std::max(k, 1), (double)n);
  if (total > (double)guard)
    throw std::runtime_error("enumeration guard exceeded: |Y|^|X| = " + std::to_string(k) + "^" +
                             std::to_string(n));
  std::vector<Morphism> out;
  Morphism m(n, 0);
  while (true) {
    if (preservesRelations(X, Y, m)) out.push_back(m);
    int i = n - 1;
    while (i >= 0 && m[i] == k - 1) m[i--] = 0;
    if (i < 0) break;
    m[i]++;
  }
  return out;
}

bool isEmbedding(const Structure& X, const Structure& Y, const Morphism& m) {
  if (!preservesRelations(X, Y, m)) return false;
  std::set<int> img(m.begin(), m.end());
  if ((int)img.size() != X.size()) return false;
  // reflect relations: anything holding on the image must hold in X
  std::map<int, int> inv;
  for (int i = 0; i < X.size(); i++) inv[m[i]] = i;
  for (auto& e : Y.edges) {
    std::vector<int> pre;
    bool all = true;
    for (int p : e.pts) {
      auto it = inv.find(p);
      if (it == inv.end()) {
        all = false;
        break;
      }
      pre.push_back(it->second);
    }
    if (all && !X.hasEdge(e.sym, pre)) return false;
  }
  for (auto& [k, v] : Y.fam) {
    auto [sym, p, q] = k;
    auto ip = inv.find(p), iq = inv.find(q);
    if (ip == inv.end() || iq == inv.end()) continue;
    const FamVal* w = X.famVal(sym, ip->second, iq->second);
    if (!w || !FamVal::weaker(v, *w)) return false;
  }
  return true;
}

Morphism composeMor(const Morphism& f, const Morphism& g) {
  Morphism h(f.size());
  for (size_t i = 0; i < f.size(); i++) h[i] = g[f[i]];
  return h;
}

Morphism identityMor(const Structure& X) {
  Morphism m(X.size());
  for (int i = 0; i < X.size(); i++) m[i] = i;
  return m;
}

static std::string morName(const Structure& X, const Structure& Y, const Morphism& m) {
  std::ostringstream o;
  o << "{";
  for (int i = 0; i < X.size(); i++) o << (i ? "," : "") << X.points[i] << "->" << Y.points[m[i]];
  o << "}";
  return o.str();
}

Structure internalHom(const Structure& X, const Structure& Y, long long guard,
                      std::vector<Morphism>* carrierOut) {
  std::vector<Morphism> H = morphisms(X, Y, guard);
  Structure h;
  h.name = "hom";
  for (auto& m : H) h.points.push_back(morName(X, Y, m));
  // plain symbols: collect arities present in Y's edges
  std::map<int, int> arity;
  for (auto& e : Y.edges) arity[e.sym] = (int)e.pts.size();
  for (auto& [sym, k] : arity) {
    std::vector<int> tup(k, 0);
    if (H.empty()) continue;
    while (true) {
      bool all = true;
      for (int x = 0; x < X.size() && all; x++) {
        std::vector<int> pts;
        for (int i = 0; i < k; i++) pts.push_back(H[tup[i]][x]);
        if (!Y.hasEdge(sym, pts)) all = false;
      }
      if (all) h.addEdge(sym, tup);
      int i = k - 1;
      while (i >= 0 && tup[i] == (int)H.size() - 1) tup[i--] = 0;
      if (i < 0) break;
      tup[i]++;
    }
  }
  // family symbols: pointwise supremum
  std::set<int> famSyms;
  for (auto& [k, v] : Y.fam) famSyms.insert(std::get<0>(k));
  for (int sym : famSyms)
    for (size_t a = 0; a < H.size(); a++)
      for (size_t b = 0; b < H.size(); b++) {
        FamVal acc{Rat::zero(), true};
        bool defined = true;
        for (int x = 0; x < X.size() && defined; x++) {
          const FamVal* w = Y.famVal(sym, H[a][x], H[b][x]);
          if (!w) {
            defined = false;
            break;
          }
          if (w->v > acc.v)
            acc = *w;
          else if (w->v == acc.v)
            acc.attained = acc.attained && w->attained;
        }
        if (defined) h.addFam(sym, (int)a, (int)b, acc);
      }
  if (carrierOut) *carrierOut = std::move(H);
  return h;
}

Structure tensorStruct(const Structure& X, const Structure& Y) {
  Structure t;
  t.name = "tensor";
  int ny = Y.size();
  auto idx = [&](int x, int y) { return x * ny + y; };
  for (int x = 0; x < X.size(); x++)
    for (int y = 0; y < ny; y++) t.points.push_back("(" + X.points[x] + "," + Y.points[y] + ")");
  for (int x = 0; x < X.size(); x++) {
    for (auto& e : Y.edges) {
      std::vector<int> pts;
      for (int p : e.pts) pts.push_back(idx(x, p));
      t.addEdge(e.sym, pts);
    }
    for (auto& [k, v] : Y.fam) {
      auto [sym, p, q] = k;
      t.addFam(sym, idx(x, p), idx(x, q), v);
    }
  }
  for (int y = 0; y < ny; y++) {
    for (auto& e : X.edges) {
      std::vector<int> pts;
      for (int p : e.pts) pts.push_back(idx(p, y));
      t.addEdge(e.sym, pts);
    }
    for (auto& [k, v] : X.fam) {
      auto [sym, p, q] = k;
      t.addFam(sym, idx(p, y), idx(q, y), v);
    }
  }
  return t;
}

Structure manhattan(const HornTheory& t, const Structure& X, const Structure& Y) {
  return reflect(t, tensorStruct(X, Y));
}

AdjunctionReport checkTensorHomAdjunction(const HornTheory& t, const Structure& Y,
                                          const Structure& X, const Structure& Z,
                                          long long guard) {
  (void)t;
  AdjunctionReport rep;
  std::vector<Morphism> carrier;
  Structure hom = internalHom(X, Z, guard, &carrier);
  std::vector<Morphism> curried = morphisms(Y, hom, guard);
  Structure tens = tensorStruct(Y, X);
  std::vector<Morphism> flat = morphisms(tens, Z, guard);
  rep.homCurried = curried.size();
  rep.homTensor = flat.size();
  int nx = X.size();
  std::set<Morphism> flatSet(flat.begin(), flat.end());
  std::set<Morphism> seen;
  for (auto& g : curried) {
    Morphism sharp(Y.size() * nx);
    for (int y = 0; y < Y.size(); y++)
      for (int x = 0; x < nx; x++) sharp[y * nx + x] = carrier[g[y]][x];
    if (!flatSet.count(sharp)) {
      rep.detail = "transpose of a curried morphism is not a morphism";
      return rep;
    }
    if (!seen.insert(sharp).second) {
      rep.detail = "transposition is not injective";
      return rep;
    }
  }
  std::map<Morphism, int> carrierIdx;
  for (size_t i = 0; i < carrier.size(); i++) carrierIdx[carrier[i]] = (int)i;
  std::set<Morphism> curriedSet(curried.begin(), curried.end());
  for (auto& h : flat) {
    Morphism g(Y.size());
    for (int y = 0; y < Y.size(); y++) {
      Morphism slice(nx);
      for (int x = 0; x < nx; x++) slice[x] = h[y * nx + x];
      auto it = carrierIdx.find(slice);
      if (it == carrierIdx.end()) {
        rep.detail = "a flat morphism has a non-morphism slice";
        return rep;
      }
      g[y] = it->second;
    }
    if (!curriedSet.count(g)) {
      rep.detail = "currying a flat morphism leaves the hom-set";
      return rep;
    }
    // roundtrip
    Morphism sharp(Y.size() * nx);
    for (int y = 0; y < Y.size(); y++)
      for (int x = 0; x < nx; x++) sharp[y * nx + x] = carrier[g[y]][x];
    if (sharp != h) {
      rep.detail = "curry/transpose roundtrip differs";
      return rep;
    }
  }
  if (curried.size() != flat.size()) {
    rep.detail = "hom-set cardinalities differ";
    return rep;
  }
  rep.ok = true;
  return rep;
}

bool isGeneratedBy(const HornTheory& t, const Structure& X, const Structure& E) {
  if (E.points != X.points) return false;
  for (auto& e : E.edges)
    if (!X.edges.count(e)) return false;
  for (auto& [k, v] : E.fam) {
    auto [sym, p, q] = k;
    const FamVal* w = X.famVal(sym, p, q);
    if (!w || !FamVal::weaker(v, *w)) return false;
  }
  SatResult r = saturate(t, E);
  if (r.fuelExhausted) return false;
  for (int i = 0; i < X.size(); i++)
    if (r.rep[i] != i) return false;
  return r.edges == X.edges && r.fam == X.fam;
}

std::optional<Structure> findGeneratingSubset(const HornTheory& t, const Structure& X,
                                              int maxItems) {
  struct Item {
    bool isFam;
    DEdge e;
    FamKey k;
    FamVal v{Rat::zero(), true};
  };
  std::vector<Item> items;
  for (auto& e : X.edges) items.push_back(Item{false, e, {}, {}});
  for (auto& [k, v] : X.fam) items.push_back(Item{true, {}, k, v});
  int n = (int)items.size();
  for (int sz = 0; sz <= std::min(n, maxItems); sz++) {
    std::vector<int> comb(sz);
    for (int i = 0; i < sz; i++) comb[i] = i;
    while (true) {
      Structure E;
      E.points = X.points;
      for (int i : comb) {
        if (items[i].isFam) {
          auto [sym, p, q] = items[i].k;
          E.addFam(sym, p, q, items[i].v);
        } else {
          E.edges.insert(items[i].e);
        }
      }
      if (isGeneratedBy(t, X, E)) return E;
      if (sz == 0) break;
      int i = sz - 1;
      while (i >= 0 && comb[i] == n - sz + i) i--;
      if (i < 0) break;
      comb[i]++;
      for (int j = i + 1; j < sz; j++) comb[j] = comb[j - 1] + 1;
    }
  }
  return std::nullopt;
}

EnrichedReport checkEnriched(const Functor& F, const Structure& X, const Structure& Y,
                             long long guard) {
  EnrichedReport rep;
  std::vector<Morphism> H;
  Structure hom = internalHom(X, Y, guard, &H);
  Structure FX = F.obj(X), FY = F.obj(Y);
  std::vector<Morphism> HF;
  Structure homF = internalHom(FX, FY, guard, &HF);
  std::map<Morphism, int> idx;
  for (size_t i = 0; i < HF.size(); i++) idx[HF[i]] = (int)i;
  std::vector<int> img(H.size());
  for (size_t i = 0; i < H.size(); i++) {
    Morphism fm = F.mor(X, Y, H[i]);
    auto it = idx.find(fm);
    if (it == idx.end()) {
      rep.detail = "image of " + hom.points[i] + " is not a morphism F(X) -> F(Y)";
      return rep;
    }
    img[i] = it->second;
  }
  for (auto& e : hom.edges) {
    std::vector<int> pts;
    for (int p : e.pts) pts.push_back(img[p]);
    if (!homF.hasEdge(e.sym, pts)) {
      rep.detail = "hom edge not preserved";
      return rep;
    }
  }
  for (auto& [k, v] : hom.fam) {
    auto [sym, p, q] = k;
    const FamVal* w = homF.famVal(sym, img[p], img[q]);
    if (!w || !FamVal::weaker(v, *w)) {
      rep.detail = "hom distance increased by the functor";
      return rep;
    }
  }
  rep.ok = true;
  return rep;
}

bool isomorphic(const Structure& A, const Structure& B) {
  if (A.size() != B.size()) return false;
  if (A.edges.size() != B.edges.size() || A.fam.size() != B.fam.size()) return false;
  int n = A.size();
  std::vector<int> perm(n);
  for (int i = 0; i < n; i++) perm[i] = i;
  do {
    bool ok = true;
    for (auto& e : A.edges) {
      std::vector<int> pts;
      for (int p : e.pts) pts.push_back(perm[p]);
      if (!B.hasEdge(e.sym, pts)) {
        ok = false;
        break;
      }
    }
    if (ok)
      for (auto& [k, v] : A.fam) {
        auto [sym, p, q] = k;
        const FamVal* w = B.famVal(sym, perm[p], perm[q]);
        if (!w || !(*w == v)) {
          ok = false;
          break;
        }
      }
    if (ok) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

std::vector<Structure> allPosets(int maxPoints) {
  std::vector<Structure> out;
  for (int n = 1; n <= maxPoints; n++) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; i++)
      for (int j = 0; j < n; j++)
        if (i != j) pairs.push_back({i, j});
    int m = (int)pairs.size();
    for (long long mask = 0; mask < (1LL << m); mask++) {
      auto rel = [&](int i, int j) {
        if (i == j) return true;
        for (int k = 0; k < m; k++)
          if (pairs[k] == std::make_pair(i, j)) return (mask >> k & 1) == 1;
        return false;
      };
      bool ok = true;
      for (int i = 0; i < n && ok; i++)
        for (int j = 0; j < n && ok; j++) {
          if (i != j && rel(i, j) && rel(j, i)) ok = false;
          for (int k = 0; k < n && ok; k++)
            if (rel(i, j) && rel(j, k) && !rel(i, k)) ok = false;
        }
      if (!ok) continue;
      Structure s;
      s.name = "P" + std::to_string(n) + "_" + std::to_string(mask);
      for (int i = 0; i < n; i++) s.points.push_back(std::string(1, char('a' + i)));
      for (int i = 0; i < n; i++)
        for (int j = 0; j < n; j++)
          if (rel(i, j)) s.addEdge(0, {i, j});
      bool dup = false;
      for (auto& prev : out)
        if (isomorphic(prev, s)) {
          dup = true;
          break;
        }
      if (!dup) out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<Structure> allMetSpaces(int maxPoints, const std::vector<Rat>& vals) {
  std::vector<Structure> out;
  for (int n = 1; n <= maxPoints; n++) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; i++)
      for (int j = i + 1; j < n; j++) pairs.push_back({i, j});
    int m = (int)pairs.size();
    std::vector<int> choice(m, 0);
    while (true) {
      std::vector<std::vector<Rat>> d(n, std::vector<Rat>(n, Rat::zero()));
      for (int k = 0; k < m; k++) {
        d[pairs[k].first][pairs[k].second] = vals[choice[k]];
        d[pairs[k].second][pairs[k].first] = vals[choice[k]];
      }
      bool ok = true;
      for (int i = 0; i < n && ok; i++)
        for (int j = 0; j < n && ok; j++) {
          if (i != j && d[i][j].isZero()) ok = false;
          for (int k = 0; k < n && ok; k++)
            if (d[i][j] > cappedAdd(d[i][k], d[k][j])) ok = false;
        }
      if (ok) {
        std::vector<std::string> names;
        for (int i = 0; i < n; i++) names.push_back(std::string(1, char('a' + i)));
        Structure s = metricToStructure(names, d);
        s.name = "M" + std::to_string(n);
        bool dup = false;
        for (auto& prev : out)
          if (isomorphic(prev, s)) {
            dup = true;
            break;
          }
        if (!dup) out.push_back(std::move(s));
      }
      if (m == 0) break;
      int i = m - 1;
      while (i >= 0 && choice[i] == (int)vals.size() - 1) choice[i--] = 0;
      if (i < 0) break;
      choice[i]++;
    }
  }
  return out;
}

}  // namespace relat
