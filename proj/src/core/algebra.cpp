#include "algebra.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace relat {

int STerm::depth() const {
  if (isVar()) return 0;
  int d = 0;
  for (auto& a : args) d = std::max(d, a.depth());
  return d + 1;
}

bool operator<(const STerm& a, const STerm& b) {
  if (a.var != b.var) return a.var < b.var;
  if (a.op != b.op) return a.op < b.op;
  return std::lexicographical_compare(a.args.begin(), a.args.end(), b.args.begin(), b.args.end());
}

STerm substitute(const STerm& t, const std::vector<STerm>& tau) {
  if (t.isVar()) return tau[t.var];
  STerm r = t;
  for (auto& a : r.args) a = substitute(a, tau);
  return r;
}

void collectSubterms(const STerm& t, std::vector<STerm>& out) {
  out.push_back(t);
  for (auto& a : t.args) collectSubterms(a, out);
}

int Variety::opIndex(const std::string& n) const {
  for (size_t i = 0; i < ops.size(); i++)
    if (ops[i].name == n) return (int)i;
  return -1;
}

SigmaAlgebra makeAlgebra(std::shared_ptr<const Variety> V, Structure carrier,
                         std::vector<std::vector<int>> interp, long long guard) {
  SigmaAlgebra A;
  A.variety = std::move(V);
  A.carrier = std::move(carrier);
  if (interp.size() != A.variety->ops.size())
    throw std::invalid_argument("one interpretation table per operation required");
  for (size_t i = 0; i < A.variety->ops.size(); i++) {
    const OpSymbol& op = A.variety->ops[i];
    std::vector<Morphism> H = morphisms(op.arity, A.carrier, guard);
    if (interp[i].size() != H.size())
      throw std::invalid_argument("interpretation table size mismatch for " + op.name);
    for (int v : interp[i])
      if (v < 0 || v >= A.carrier.size())
        throw std::invalid_argument("interpretation value out of range for " + op.name);
    std::map<Morphism, int> idx;
    for (size_t j = 0; j < H.size(); j++) idx[H[j]] = (int)j;
    // the interpretation must be relation-preserving [arity, carrier] -> carrier
    Structure hom = internalHom(op.arity, A.carrier, guard);
    for (auto& e : hom.edges) {
      std::vector<int> pts;
      for (int p : e.pts) pts.push_back(interp[i][p]);
      if (!A.carrier.hasEdge(e.sym, pts))
        throw std::invalid_argument("interpretation of " + op.name +
                                    " does not preserve relations");
    }
    for (auto& [k, v] : hom.fam) {
      auto [sym, p, q] = k;
      const FamVal* w = A.carrier.famVal(sym, interp[i][p], interp[i][q]);
      if (!w || !FamVal::weaker(v, *w))
        throw std::invalid_argument("interpretation of " + op.name +
                                    " does not preserve relations");
    }
    A.homs.push_back(std::move(H));
    A.homIdx.push_back(std::move(idx));
  }
  A.interp = std::move(interp);
  return A;
}

std::optional<int> evaluate(const SigmaAlgebra& A, const Structure& ctx, const Morphism& e,
                            const STerm& t) {
  if (t.isVar()) {
    if (t.var >= (int)e.size()) return std::nullopt;
    return e[t.var];
  }
  const OpSymbol& op = A.variety->ops[t.op];
  Morphism vals(op.arity.size());
  if ((int)t.args.size() != op.arity.size()) return std::nullopt;
  for (int i = 0; i < op.arity.size(); i++) {
    auto v = evaluate(A, ctx, e, t.args[i]);
    if (!v) return std::nullopt;
    vals[i] = *v;
  }
  if (!preservesRelations(op.arity, A.carrier, vals)) return std::nullopt;
  auto it = A.homIdx[t.op].find(vals);
  if (it == A.homIdx[t.op].end()) return std::nullopt;
  return A.interp[t.op][it->second];
}

bool satisfies(const SigmaAlgebra& A, const SigmaRelation& r, std::string* why, long long guard) {
  for (auto& e : morphisms(r.context, A.carrier, guard)) {
    std::vector<int> vals;
    for (auto& t : r.args) {
      auto v = evaluate(A, r.context, e, t);
      if (!v) {
        if (why) *why = "axiom " + r.name + ": term undefined under some assignment";
        return false;
      }
      vals.push_back(*v);
    }
    bool ok = r.idx ? A.carrier.holdsFam(r.sym, vals[0], vals[1], *r.idx)
                    : A.carrier.hasEdge(r.sym, vals);
    if (!ok) {
      if (why) *why = "axiom " + r.name + ": relation fails under some assignment";
      return false;
    }
  }
  return true;
}

bool satisfiesAll(const SigmaAlgebra& A, std::string* why, long long guard) {
  for (auto& ax : A.variety->axioms)
    if (!satisfies(A, ax, why, guard)) return false;
  return true;
}

bool isHomomorphism(const SigmaAlgebra& A, const SigmaAlgebra& B, const Morphism& h) {
  if (!preservesRelations(A.carrier, B.carrier, h)) return false;
  for (size_t op = 0; op < A.variety->ops.size(); op++) {
    for (size_t j = 0; j < A.homs[op].size(); j++) {
      Morphism hf = composeMor(A.homs[op][j], h);
      auto it = B.homIdx[op].find(hf);
      if (it == B.homIdx[op].end()) return false;
      if (B.interp[op][it->second] != h[A.interp[op][j]]) return false;
    }
  }
  return true;
}

namespace {

std::vector<Morphism> carrierAutomorphisms(const Structure& c) {
  std::vector<Morphism> out;
  int n = c.size();
  Morphism perm(n);
  for (int i = 0; i < n; i++) perm[i] = i;
  do {
    if (!preservesRelations(c, c, perm)) continue;
    bool strict = true;
    for (auto& e : c.edges) {
      std::vector<int> pts;
      for (int p : e.pts) pts.push_back(perm[p]);
      if (!c.hasEdge(e.sym, pts)) strict = false;
    }
    // bijective and preserving both ways
    Morphism inv(n);
    for (int i = 0; i < n; i++) inv[perm[i]] = i;
    if (strict && preservesRelations(c, c, inv)) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

}  // namespace

std::vector<SigmaAlgebra> enumerateAlgebras(std::shared_ptr<const Variety> V,
                                            const std::vector<Structure>& carriers,
                                            long long guard, bool dedupe) {
  std::vector<SigmaAlgebra> out;
  size_t nops = V->ops.size();
  // which axiom is checkable once ops up to a level are fixed
  std::vector<int> axMax(V->axioms.size(), -1);
  for (size_t a = 0; a < V->axioms.size(); a++)
    for (auto& t : V->axioms[a].args) {
      std::vector<STerm> subs;
      collectSubterms(t, subs);
      for (auto& s : subs)
        if (!s.isVar()) axMax[a] = std::max(axMax[a], s.op);
    }
  for (auto& carrier : carriers) {
    SigmaAlgebra A;
    A.variety = V;
    A.carrier = carrier;
    std::vector<Structure> homStructs;
    bool feasible = true;
    for (auto& op : V->ops) {
      std::vector<Morphism> H = morphisms(op.arity, carrier, guard);
      std::map<Morphism, int> idx;
      for (size_t j = 0; j < H.size(); j++) idx[H[j]] = (int)j;
      homStructs.push_back(internalHom(op.arity, carrier, guard));
      A.homs.push_back(std::move(H));
      A.homIdx.push_back(std::move(idx));
      if (carrier.size() == 0 && !A.homs.back().empty()) feasible = false;
    }
    if (!feasible) continue;
    A.interp.assign(nops, {});
    std::vector<Morphism> autos;
    std::set<std::vector<std::vector<int>>> seen;
    if (dedupe) autos = carrierAutomorphisms(carrier);

    std::function<void(size_t)> go = [&](size_t level) {
      // axioms whose operations are all fixed below `level`
      for (size_t a = 0; a < V->axioms.size(); a++)
        if (axMax[a] == (int)level - 1 || (level == 0 && axMax[a] < 0)) {
          if (!satisfies(A, V->axioms[a], nullptr, guard)) return;
        }
      if (level == nops) {
        if (dedupe) {
          std::vector<std::vector<int>> canon = A.interp;
          for (auto& pi : autos) {
            std::vector<std::vector<int>> moved(nops);
            for (size_t op = 0; op < nops; op++) {
              moved[op].resize(A.homs[op].size());
              for (size_t j = 0; j < A.homs[op].size(); j++) {
                Morphism pif = composeMor(A.homs[op][j], pi);
                moved[op][A.homIdx[op].at(pif)] = pi[A.interp[op][j]];
              }
            }
            if (moved < canon) canon = moved;
          }
          if (!seen.insert(canon).second) return;
        }
        out.push_back(A);
        return;
      }
      size_t hn = A.homs[level].size();
      std::vector<int> table(hn, 0);
      const Structure& hom = homStructs[level];
      auto preserving = [&]() {
        for (auto& e : hom.edges) {
          std::vector<int> pts;
          for (int p : e.pts) pts.push_back(table[p]);
          if (!carrier.hasEdge(e.sym, pts)) return false;
        }
        for (auto& [k, v] : hom.fam) {
          auto [sym, p, q] = k;
          const FamVal* w = carrier.famVal(sym, table[p], table[q]);
          if (!w || !FamVal::weaker(v, *w)) return false;
        }
        return true;
      };
      while (true) {
        if (preserving()) {
          A.interp[level] = table;
          go(level + 1);
          A.interp[level].clear();
        }
        if (hn == 0) break;
        size_t i = hn;
        while (i > 0 && table[i - 1] == carrier.size() - 1) table[--i] = 0;
        if (i == 0) break;
        table[i - 1]++;
      }
    };
    // empty tables for zero-hom ops are fine; start the search
    go(0);
  }
  return out;
}

SigmaAlgebra productAlgebra(const SigmaAlgebra& A, const SigmaAlgebra& B) {
  if (A.variety != B.variety) throw std::invalid_argument("product across varieties");
  const Structure& ca = A.carrier;
  const Structure& cb = B.carrier;
  Structure p;
  p.name = "product";
  int nb = cb.size();
  auto idx = [&](int a, int b) { return a * nb + b; };
  for (int a = 0; a < ca.size(); a++)
    for (int b = 0; b < nb; b++) p.points.push_back("(" + ca.points[a] + "," + cb.points[b] + ")");
  for (auto& ea : ca.edges)
    for (auto& eb : cb.edges) {
      if (ea.sym != eb.sym || ea.pts.size() != eb.pts.size()) continue;
      std::vector<int> pts;
      for (size_t i = 0; i < ea.pts.size(); i++) pts.push_back(idx(ea.pts[i], eb.pts[i]));
      p.addEdge(ea.sym, pts);
    }
  for (auto& [ka, va] : ca.fam)
    for (auto& [kb, vb] : cb.fam) {
      auto [sa, pa, qa] = ka;
      auto [sb, pb, qb] = kb;
      if (sa != sb) continue;
      FamVal v = va.v > vb.v ? va : vb.v > va.v ? vb : FamVal{va.v, va.attained && vb.attained};
      p.addFam(sa, idx(pa, pb), idx(qa, qb), v);
    }
  std::vector<std::vector<int>> interp(A.variety->ops.size());
  for (size_t op = 0; op < A.variety->ops.size(); op++) {
    const Structure& ar = A.variety->ops[op].arity;
    std::vector<Morphism> H = morphisms(ar, p);
    interp[op].resize(H.size());
    for (size_t j = 0; j < H.size(); j++) {
      Morphism fa(ar.size()), fb(ar.size());
      for (int i = 0; i < ar.size(); i++) {
        fa[i] = H[j][i] / nb;
        fb[i] = H[j][i] % nb;
      }
      int ra = A.interp[op][A.homIdx[op].at(fa)];
      int rb = B.interp[op][B.homIdx[op].at(fb)];
      interp[op][j] = idx(ra, rb);
    }
  }
  return makeAlgebra(A.variety, std::move(p), std::move(interp));
}

bool isSubalgebraCarrier(const SigmaAlgebra& A, const std::set<int>& subset) {
  for (size_t op = 0; op < A.variety->ops.size(); op++)
    for (size_t j = 0; j < A.homs[op].size(); j++) {
      bool inside = true;
      for (int v : A.homs[op][j])
        if (!subset.count(v)) inside = false;
      if (inside && !subset.count(A.interp[op][j])) return false;
    }
  return true;
}

std::string termStr(const STerm& t, const Structure& ctx, const std::vector<OpSymbol>& ops) {
  if (t.isVar()) return ctx.points[t.var];
  std::ostringstream o;
  const OpSymbol& op = ops[t.op];
  o << op.name << "{";
  for (int i = 0; i < op.arity.size(); i++) {
    if (i) o << ",";
    o << op.arity.points[i] << "->" << termStr(t.args[i], ctx, ops);
  }
  o << "}";
  return o.str();
}

std::string printVariety(const Variety& V) {
  std::ostringstream o;
  o << "variety " << V.name << " over " << V.theory->name << "\n";
  // shared structure blocks for arities and contexts
  std::vector<Structure> blocks;
  auto blockName = [&](const Structure& s) {
    for (size_t i = 0; i < blocks.size(); i++)
      if (blocks[i] == s) return "s" + std::to_string(i);
    blocks.push_back(s);
    return "s" + std::to_string(blocks.size() - 1);
  };
  std::vector<std::string> opLines, axLines;
  for (auto& op : V.ops) opLines.push_back("op " + op.name + " arity " + blockName(op.arity));
  for (auto& ax : V.axioms) {
    std::ostringstream a;
    a << "axiom context " << blockName(ax.context) << " : " << V.theory->symbols[ax.sym].name;
    if (ax.idx) a << "[" << ax.idx->str() << "]";
    a << "(";
    for (size_t i = 0; i < ax.args.size(); i++)
      a << (i ? ", " : "") << termStr(ax.args[i], ax.context, V.ops);
    a << ")";
    axLines.push_back(a.str());
  }
  for (size_t i = 0; i < blocks.size(); i++) {
    std::string body = printStructure(*V.theory, blocks[i]);
    // replace the header line: blocks are named s<i> and typed by the variety
    size_t nl = body.find('\n');
    o << "structure s" << i << "\n" << body.substr(nl + 1);
  }
  for (auto& l : opLines) o << l << "\n";
  for (auto& l : axLines) o << l << "\n";
  return o.str();
}

}  // namespace relat
