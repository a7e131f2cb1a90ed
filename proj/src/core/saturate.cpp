#include "saturate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace relat {

namespace {

// Union-find that remembers, for each performed union, which concrete pair
// was identified and by which event, so equality chains can be replayed.
struct UF {
  std::vector<int> p;
  std::vector<int> fparent, fev;  // proof forest (no path compression)

  explicit UF(int n) : p(n), fparent(n, -1), fev(n, -1) {
    for (int i = 0; i < n; i++) p[i] = i;
  }
  int find(int x) {
    while (p[x] != x) {
      p[x] = p[p[x]];
      x = p[x];
    }
    return x;
  }
  void reroot(int x) {
    int prev = -1, prevEv = -1;
    while (x != -1) {
      int next = fparent[x], nextEv = fev[x];
      fparent[x] = prev;
      fev[x] = prevEv;
      prev = x;
      prevEv = nextEv;
      x = next;
    }
  }
  void unite(int a, int b, int ev) {
    int ra = find(a), rb = find(b);
    if (ra == rb) return;
    reroot(a);
    fparent[a] = b;
    fev[a] = ev;
    // smallest original index becomes the representative
    int r = std::min(ra, rb);
    p[ra] = r;
    p[rb] = r;
  }
  // forest path from a to b as oriented steps (from, to, event)
  std::vector<std::tuple<int, int, int>> explain(int a, int b) const {
    auto ancestors = [&](int x) {
      std::vector<int> v{x};
      while (fparent[x] != -1) {
        x = fparent[x];
        v.push_back(x);
      }
      return v;
    };
    std::vector<int> pa = ancestors(a), pb = ancestors(b);
    std::map<int, int> posA;
    for (size_t i = 0; i < pa.size(); i++) posA[pa[i]] = (int)i;
    int lcaA = -1, lcaB = -1;
    for (size_t j = 0; j < pb.size(); j++)
      if (posA.count(pb[j])) {
        lcaB = (int)j;
        lcaA = posA[pb[j]];
        break;
      }
    if (lcaA < 0) throw std::logic_error("explain on unrelated points");
    std::vector<std::tuple<int, int, int>> path;
    for (int i = 0; i < lcaA; i++) path.emplace_back(pa[i], pa[i + 1], fev[pa[i]]);
    for (int j = lcaB - 1; j >= 0; j--) path.emplace_back(pb[j + 1], pb[j], fev[pb[j]]);
    return path;
  }
};

FamVal maxCombine(const FamVal& a, const FamVal& b) {
  if (a.v > b.v) return a;
  if (b.v > a.v) return b;
  return FamVal{a.v, a.attained && b.attained};
}

struct Event {
  enum Kind { Input, Axiom, Limit } kind;
  int axiom = -1;
  std::vector<int> kappa;
  std::map<std::string, FamVal> bind;
  std::string limitName;
  std::vector<int> prem;  // event ids; -1 marks a trivially true equality premise
  Fact fact;
};

struct Engine {
  const HornTheory& th;
  const Structure& input;
  long long fuel;
  bool fuelExhausted = false;

  UF uf;
  std::set<DEdge> edges;
  std::map<DEdge, int> edgeEv;
  std::map<FamKey, FamVal> fam;
  std::map<FamKey, std::vector<std::pair<FamVal, int>>> famHist;
  std::vector<Event> events;
  std::map<int, int> elemToSym;  // lattice element -> symbol

  Engine(const HornTheory& t, const Structure& s, long long f)
      : th(t), input(s), fuel(f), uf(s.size()) {
    for (auto& [sym, el] : th.latticeElemOfSym) elemToSym[el] = sym;
    for (auto& e : s.edges) {
      Event ev{Event::Input};
      ev.fact = Fact{Fact::Edge, e.sym, e.pts};
      edges.insert(e);
      edgeEv[e] = (int)events.size();
      events.push_back(std::move(ev));
    }
    for (auto& [k, v] : s.fam) {
      auto [sym, p, q] = k;
      Event ev{Event::Input};
      ev.fact = Fact{Fact::Fam, sym, {p, q}, v};
      fam[k] = v;
      famHist[k].push_back({v, (int)events.size()});
      events.push_back(std::move(ev));
    }
  }

  bool spent() {
    if (fuel >= 0 && (long long)events.size() > fuel) fuelExhausted = true;
    return fuelExhausted;
  }

  int supportEvent(const FamKey& k, const FamVal& needed) const {
    // earliest history entry at least as strong as `needed`
    auto it = famHist.find(k);
    if (it == famHist.end()) return -1;
    int best = -1;
    for (auto& [fv, ev] : it->second)
      if (FamVal::weaker(needed, fv) && (best == -1 || ev < best)) best = ev;
    return best;
  }
  int currentEvent(const FamKey& k) const {
    auto cur = fam.find(k);
    if (cur == fam.end()) return -1;
    return supportEvent(k, cur->second);
  }

  void recanonicalize() {
    std::map<DEdge, int> ne;
    for (auto& [d, ev] : edgeEv) {
      DEdge nd = d;
      for (auto& x : nd.pts) x = uf.find(x);
      auto it = ne.find(nd);
      if (it == ne.end() || ev < it->second) ne[nd] = ev;
    }
    edgeEv = std::move(ne);
    edges.clear();
    for (auto& [d, ev] : edgeEv) edges.insert(d);

    std::map<FamKey, std::vector<std::pair<FamVal, int>>> nh;
    for (auto& [k, hist] : famHist) {
      auto [sym, p, q] = k;
      FamKey nk{sym, uf.find(p), uf.find(q)};
      auto& dst = nh[nk];
      dst.insert(dst.end(), hist.begin(), hist.end());
    }
    famHist = std::move(nh);
    fam.clear();
    for (auto& [k, hist] : famHist) {
      std::sort(hist.begin(), hist.end(),
                [](auto& a, auto& b) { return a.second < b.second; });
      FamVal cur = hist[0].first;
      for (size_t i = 1; i < hist.size(); i++) cur = FamVal::combine(cur, hist[i].first);
      fam[k] = cur;
    }
  }

  // Returns true when something changed; merges trigger recanonicalization.
  enum Outcome { None, Changed, Merged };

  Outcome concludeInstance(const HornAxiom& ax, int axIdx, const std::vector<int>& kappa,
                           const std::vector<int>& prem,
                           const std::map<std::string, FamVal>& bind) {
    const Atom& c = ax.conclusion;
    std::vector<int> pts;
    for (int v : c.args) pts.push_back(kappa[v]);
    Event ev{Event::Axiom};
    ev.axiom = axIdx;
    ev.kappa = kappa;
    ev.bind = bind;
    ev.prem = prem;
    if (c.sym == kEqSym) {
      int a = pts[0], b = pts[1];
      if (a == b) return None;
      ev.fact = Fact{Fact::Eq, -1, {a, b}};
      int id = (int)events.size();
      events.push_back(std::move(ev));
      uf.unite(a, b, id);
      recanonicalize();
      return Merged;
    }
    if (c.idx) {
      FamVal fv{c.idx->c, true};
      for (auto& v : c.idx->vars) {
        auto it = bind.find(v);
        if (it != bind.end()) {
          fv.v = cappedAdd(fv.v, it->second.v);
          fv.attained = fv.attained && it->second.attained;
        }
      }
      FamKey k{c.sym, pts[0], pts[1]};
      auto cur = fam.find(k);
      FamVal comb = cur == fam.end() ? fv : FamVal::combine(cur->second, fv);
      if (cur != fam.end() && comb == cur->second) return None;
      ev.fact = Fact{Fact::Fam, c.sym, pts, fv};
      int id = (int)events.size();
      events.push_back(std::move(ev));
      fam[k] = comb;
      famHist[k].push_back({fv, id});
      return Changed;
    }
    DEdge d{c.sym, pts};
    if (edges.count(d)) return None;
    ev.fact = Fact{Fact::Edge, c.sym, pts};
    int id = (int)events.size();
    events.push_back(std::move(ev));
    edges.insert(d);
    edgeEv[d] = id;
    return Changed;
  }

  // Recursive valuation search with premise checks as soon as possible.
  Outcome tryAxiom(const HornAxiom& ax, int axIdx) {
    std::vector<int> reps;
    for (int i = 0; i < (int)uf.p.size(); i++)
      if (uf.find(i) == i) reps.push_back(i);
    if (ax.varCount > 0 && reps.empty()) return None;

    std::vector<int> premMaxVar(ax.premises.size(), -1);
    for (size_t i = 0; i < ax.premises.size(); i++)
      for (int v : ax.premises[i].args) premMaxVar[i] = std::max(premMaxVar[i], v);

    std::vector<int> kappa(ax.varCount, -1);
    std::vector<int> prem(ax.premises.size(), -1);
    std::map<std::string, FamVal> bind;
    bool changed = false;

    std::function<Outcome(int)> go = [&](int var) -> Outcome {
      if (var == ax.varCount) {
        for (auto& sc : ax.conds) {
          for (auto* e : {&sc.lhs, &sc.rhs})
            for (auto& v : e->vars) {
              auto it = bind.find(v);
              if (it == bind.end() || !it->second.attained) return None;
            }
          std::map<std::string, Rat> nb;
          for (auto& [k, fv] : bind) nb[k] = fv.v;
          if (!sc.eval(nb)) return None;
        }
        return concludeInstance(ax, axIdx, kappa, prem, bind);
      }
      for (int r : reps) {
        kappa[var] = r;
        auto savedBind = bind;
        bool ok = true;
        for (size_t i = 0; i < ax.premises.size() && ok; i++) {
          if (premMaxVar[i] != var && !(premMaxVar[i] == -1 && var == 0)) continue;
          const Atom& a = ax.premises[i];
          std::vector<int> pts;
          for (int v : a.args) pts.push_back(kappa[v]);
          if (a.sym == kEqSym) {
            if (pts[0] != pts[1]) ok = false;
            continue;
          }
          if (a.idx) {
            FamKey k{a.sym, pts[0], pts[1]};
            auto cur = fam.find(k);
            if (cur == fam.end()) {
              ok = false;
              continue;
            }
            if (a.idx->vars.empty()) {
              if (!cur->second.holds(a.idx->c)) {
                ok = false;
                continue;
              }
              prem[i] = supportEvent(k, FamVal{a.idx->c, true});
            } else {
              const std::string& e = a.idx->vars[0];
              auto it = bind.find(e);
              if (it == bind.end())
                bind[e] = cur->second;
              else
                bind[e] = maxCombine(it->second, cur->second);
              prem[i] = currentEvent(k);
            }
          } else {
            DEdge d{a.sym, pts};
            auto it = edgeEv.find(d);
            if (it == edgeEv.end()) {
              ok = false;
              continue;
            }
            prem[i] = it->second;
          }
        }
        if (ok) {
          Outcome o = go(var + 1);
          if (o == Merged) return Merged;
          if (o == Changed) changed = true;
          if (spent()) return changed ? Changed : None;
        }
        bind = std::move(savedBind);
      }
      return changed ? Changed : None;
    };
    if (ax.varCount == 0) {
      // still need to check variable-free premises (none in practice)
      bool ok = true;
      for (size_t i = 0; i < ax.premises.size(); i++)
        if (!ax.premises[i].args.empty()) ok = false;
      if (!ok) return None;
      return concludeInstance(ax, axIdx, kappa, prem, bind);
    }
    return go(0);
  }

  bool applyLimitRules() {
    bool changed = false;
    for (auto& r : th.limitRules) {
      if (r.kind == LimitRule::MetArch) {
        // the canonical value is the infimum of the represented family;
        // close each non-attained entry
        std::vector<FamKey> keys;
        for (auto& [k, v] : fam)
          if (!v.attained) keys.push_back(k);
        for (auto& k : keys) {
          FamVal cur = fam[k];
          Event ev{Event::Limit};
          ev.limitName = r.name;
          ev.prem = {currentEvent(k)};
          auto [sym, p, q] = k;
          ev.fact = Fact{Fact::Fam, sym, {p, q}, FamVal{cur.v, true}};
          int id = (int)events.size();
          events.push_back(std::move(ev));
          fam[k] = FamVal{cur.v, true};
          famHist[k].push_back({FamVal{cur.v, true}, id});
          changed = true;
          if (spent()) return changed;
        }
      } else if (r.kind == LimitRule::LatticeArch && th.lattice) {
        // meet-closure of the lattice-indexed edges
        bool local = true;
        while (local) {
          local = false;
          std::vector<DEdge> cur(edges.begin(), edges.end());
          for (size_t i = 0; i < cur.size(); i++) {
            auto e1 = th.latticeElemOfSym.find(cur[i].sym);
            if (e1 == th.latticeElemOfSym.end()) continue;
            for (size_t j = i + 1; j < cur.size(); j++) {
              auto e2 = th.latticeElemOfSym.find(cur[j].sym);
              if (e2 == th.latticeElemOfSym.end() || cur[i].pts != cur[j].pts) continue;
              int m = th.lattice->meet[e1->second][e2->second];
              int msym = elemToSym.at(m);
              DEdge d{msym, cur[i].pts};
              if (edges.count(d)) continue;
              Event ev{Event::Limit};
              ev.limitName = r.name;
              ev.prem = {edgeEv.at(cur[i]), edgeEv.at(cur[j])};
              ev.fact = Fact{Fact::Edge, msym, cur[i].pts};
              int id = (int)events.size();
              events.push_back(std::move(ev));
              edges.insert(d);
              edgeEv[d] = id;
              local = true;
              changed = true;
              if (spent()) return changed;
            }
          }
        }
      }
    }
    return changed;
  }

  void run() {
    bool changed = true;
    while (changed && !fuelExhausted) {
      changed = false;
      if (applyLimitRules()) changed = true;
      if (fuelExhausted) break;
      for (size_t i = 0; i < th.axioms.size(); i++) {
        Outcome o = tryAxiom(th.axioms[i], (int)i);
        if (o != None) changed = true;
        if (o == Merged) break;  // carrier changed, rescan from the top
        if (fuelExhausted) break;
      }
    }
  }

  // ------------------------------------------------------------------
  // Derivation extraction.

  std::map<int, DerivNode> memo;

  DerivNode proveEq(int a, int b) {
    if (a == b) {
      DerivNode n;
      n.rule = DerivNode::EqRefl;
      n.fact = Fact{Fact::Eq, -1, {a, b}};
      return n;
    }
    auto path = uf.explain(a, b);
    DerivNode acc;
    bool first = true;
    for (auto& [u, v, ev] : path) {
      DerivNode step = proveEvent(ev);
      if (step.fact.pts != std::vector<int>{u, v}) {
        DerivNode s;
        s.rule = DerivNode::EqSym;
        s.fact = Fact{Fact::Eq, -1, {u, v}};
        s.premises.push_back(std::move(step));
        step = std::move(s);
      }
      if (first) {
        acc = std::move(step);
        first = false;
      } else {
        DerivNode t;
        t.rule = DerivNode::EqTrans;
        t.fact = Fact{Fact::Eq, -1, {a, v}};
        t.premises.push_back(std::move(acc));
        t.premises.push_back(std::move(step));
        acc = std::move(t);
      }
    }
    return acc;
  }

  DerivNode transport(DerivNode child, const std::vector<int>& want) {
    if (child.fact.pts == want) return child;
    DerivNode n;
    n.rule = DerivNode::Congruence;
    n.fact = child.fact;
    n.fact.pts = want;
    std::vector<int> from = child.fact.pts;
    n.premises.push_back(std::move(child));
    for (size_t i = 0; i < want.size(); i++) n.premises.push_back(proveEq(from[i], want[i]));
    return n;
  }

  DerivNode proveEvent(int id) {
    auto it = memo.find(id);
    if (it != memo.end()) return it->second;
    const Event& ev = events[id];
    DerivNode n;
    n.fact = ev.fact;
    switch (ev.kind) {
      case Event::Input:
        n.rule = DerivNode::Input;
        break;
      case Event::Limit: {
        n.rule = DerivNode::Limit;
        n.limitName = ev.limitName;
        for (int p : ev.prem) n.premises.push_back(proveEvent(p));
        break;
      }
      case Event::Axiom: {
        n.rule = DerivNode::Axiom;
        n.axiom = ev.axiom;
        n.kappa = ev.kappa;
        n.ratBind = ev.bind;
        const HornAxiom& ax = th.axioms[ev.axiom];
        for (size_t i = 0; i < ax.premises.size(); i++) {
          const Atom& a = ax.premises[i];
          std::vector<int> want;
          for (int v : a.args) want.push_back(ev.kappa[v]);
          if (a.sym == kEqSym) {
            DerivNode r;
            r.rule = DerivNode::EqRefl;
            r.fact = Fact{Fact::Eq, -1, want};
            n.premises.push_back(std::move(r));
          } else {
            n.premises.push_back(transport(proveEvent(ev.prem[i]), want));
          }
        }
        break;
      }
    }
    memo[id] = n;
    return n;
  }

  std::optional<DerivNode> proveGoal(const Goal& g) {
    if (g.isEq) {
      if (uf.find(g.pts[0]) != uf.find(g.pts[1])) return std::nullopt;
      return proveEq(g.pts[0], g.pts[1]);
    }
    std::vector<int> reps;
    for (int p : g.pts) reps.push_back(uf.find(p));
    if (g.idx) {
      FamKey k{g.sym, reps[0], reps[1]};
      auto cur = fam.find(k);
      if (cur == fam.end() || !cur->second.holds(*g.idx)) return std::nullopt;
      int ev = supportEvent(k, FamVal{*g.idx, true});
      DerivNode n = transport(proveEvent(ev), g.pts);
      if (!(n.fact.fv == FamVal{*g.idx, true})) {
        DerivNode up;
        up.rule = DerivNode::Up;
        up.fact = n.fact;
        up.fact.fv = FamVal{*g.idx, true};
        up.premises.push_back(std::move(n));
        n = std::move(up);
      }
      return n;
    }
    DEdge d{g.sym, reps};
    auto it = edgeEv.find(d);
    if (it == edgeEv.end()) return std::nullopt;
    return transport(proveEvent(it->second), g.pts);
  }
};

}  // namespace

bool SatResult::derivesEdge(int sym, std::vector<int> pts) const {
  for (auto& p : pts) p = rep[p];
  return edges.count(DEdge{sym, pts}) > 0;
}

bool SatResult::derivesFam(int sym, int p, int q, const Rat& idx) const {
  auto it = fam.find(FamKey{sym, rep[p], rep[q]});
  return it != fam.end() && it->second.holds(idx);
}

const FamVal* SatResult::famValAt(int sym, int p, int q) const {
  auto it = fam.find(FamKey{sym, rep[p], rep[q]});
  return it == fam.end() ? nullptr : &it->second;
}

SatResult saturate(const HornTheory& t, const Structure& s, long long fuel) {
  Engine e(t, s, fuel);
  e.run();
  SatResult r;
  r.rep.resize(s.size());
  for (int i = 0; i < s.size(); i++) r.rep[i] = e.uf.find(i);
  r.edges = e.edges;
  r.fam = e.fam;
  r.fuelExhausted = e.fuelExhausted;
  return r;
}

EntailResult entails(const HornTheory& t, const Structure& base, const Goal& g, long long fuel) {
  Engine e(t, base, fuel);
  e.run();
  auto d = e.proveGoal(g);
  if (d) return EntailResult{EntailStatus::Derivable, std::move(d)};
  if (e.fuelExhausted) return EntailResult{EntailStatus::FuelExhausted, std::nullopt};
  return EntailResult{EntailStatus::NotDerivable, std::nullopt};
}

// ---------------------------------------------------------------------------
// Independent derivation replay.

namespace {

bool chk(const HornTheory& t, const Structure& base, const DerivNode& n, std::string* err);

bool fail(std::string* err, const std::string& m) {
  if (err) *err = m;
  return false;
}

bool chkAxiom(const HornTheory& t, const Structure& base, const DerivNode& n, std::string* err) {
  if (n.axiom < 0 || (size_t)n.axiom >= t.axioms.size()) return fail(err, "bad axiom reference");
  const HornAxiom& ax = t.axioms[n.axiom];
  if ((int)n.kappa.size() != ax.varCount) return fail(err, "valuation size mismatch");
  if (n.premises.size() != ax.premises.size()) return fail(err, "premise count mismatch");
  for (size_t i = 0; i < ax.premises.size(); i++) {
    const Atom& a = ax.premises[i];
    const DerivNode& c = n.premises[i];
    std::vector<int> want;
    for (int v : a.args) want.push_back(n.kappa[v]);
    if (!chk(t, base, c, err)) return false;
    if (c.fact.pts != want) return fail(err, "premise points mismatch in " + ax.name);
    if (a.sym == kEqSym) {
      if (c.fact.kind != Fact::Eq) return fail(err, "expected equality premise");
      continue;
    }
    if (a.idx) {
      if (c.fact.kind != Fact::Fam || c.fact.sym != a.sym)
        return fail(err, "premise symbol mismatch");
      if (a.idx->vars.empty()) {
        if (!c.fact.fv.holds(a.idx->c) && !(FamVal::weaker(FamVal{a.idx->c, true}, c.fact.fv)))
          return fail(err, "constant-index premise unsupported");
      } else {
        auto it = n.ratBind.find(a.idx->vars[0]);
        if (it == n.ratBind.end()) return fail(err, "missing binding " + a.idx->vars[0]);
        if (!FamVal::weaker(it->second, c.fact.fv))
          return fail(err, "binding not supported by premise in " + ax.name);
      }
    } else {
      if (c.fact.kind != Fact::Edge || c.fact.sym != a.sym)
        return fail(err, "premise symbol mismatch");
    }
  }
  for (auto& sc : ax.conds) {
    std::map<std::string, Rat> nb;
    for (auto* e : {&sc.lhs, &sc.rhs})
      for (auto& v : e->vars) {
        auto it = n.ratBind.find(v);
        if (it == n.ratBind.end() || !it->second.attained)
          return fail(err, "side condition binding missing or non-attained");
        nb[v] = it->second.v;
      }
    if (!sc.eval(nb)) return fail(err, "side condition fails");
  }
  const Atom& c = ax.conclusion;
  std::vector<int> pts;
  for (int v : c.args) pts.push_back(n.kappa[v]);
  if (n.fact.pts != pts) return fail(err, "conclusion points mismatch");
  if (c.sym == kEqSym) {
    if (n.fact.kind != Fact::Eq) return fail(err, "conclusion kind mismatch");
    return true;
  }
  if (c.idx) {
    if (n.fact.kind != Fact::Fam || n.fact.sym != c.sym)
      return fail(err, "conclusion symbol mismatch");
    FamVal fv{c.idx->c, true};
    for (auto& v : c.idx->vars) {
      auto it = n.ratBind.find(v);
      if (it != n.ratBind.end()) {
        fv.v = cappedAdd(fv.v, it->second.v);
        fv.attained = fv.attained && it->second.attained;
      }
    }
    if (!(n.fact.fv == fv)) return fail(err, "conclusion index mismatch");
    return true;
  }
  if (n.fact.kind != Fact::Edge || n.fact.sym != c.sym)
    return fail(err, "conclusion symbol mismatch");
  return true;
}

bool chk(const HornTheory& t, const Structure& base, const DerivNode& n, std::string* err) {
  switch (n.rule) {
    case DerivNode::Input: {
      if (n.fact.kind == Fact::Edge)
        return base.hasEdge(n.fact.sym, n.fact.pts) || fail(err, "input edge not in base");
      if (n.fact.kind == Fact::Fam) {
        const FamVal* v = base.famVal(n.fact.sym, n.fact.pts[0], n.fact.pts[1]);
        if (!v || !FamVal::weaker(n.fact.fv, *v)) return fail(err, "input entry not in base");
        return true;
      }
      return fail(err, "equality cannot be an input");
    }
    case DerivNode::Axiom:
      return chkAxiom(t, base, n, err);
    case DerivNode::Limit: {
      bool have = false;
      for (auto& r : t.limitRules)
        if (r.name == n.limitName) have = true;
      if (!have) return fail(err, "unknown limit rule " + n.limitName);
      for (auto& p : n.premises)
        if (!chk(t, base, p, err)) return false;
      if (n.limitName == "met-arch") {
        if (n.premises.size() != 1) return fail(err, "met-arch takes one premise");
        const Fact& p = n.premises[0].fact;
        if (p.kind != Fact::Fam || p.fv.attained) return fail(err, "met-arch premise must be open");
        if (n.fact.kind != Fact::Fam || n.fact.sym != p.sym || n.fact.pts != p.pts ||
            !(n.fact.fv == FamVal{p.fv.v, true}))
          return fail(err, "met-arch conclusion mismatch");
        return true;
      }
      if (n.limitName == "lattice-arch") {
        if (!t.lattice || n.premises.size() != 2) return fail(err, "lattice-arch shape");
        const Fact& a = n.premises[0].fact;
        const Fact& b = n.premises[1].fact;
        if (a.kind != Fact::Edge || b.kind != Fact::Edge || a.pts != b.pts)
          return fail(err, "lattice-arch premises");
        auto ea = t.latticeElemOfSym.find(a.sym), eb = t.latticeElemOfSym.find(b.sym);
        if (ea == t.latticeElemOfSym.end() || eb == t.latticeElemOfSym.end())
          return fail(err, "lattice-arch premise symbols");
        int m = t.lattice->meet[ea->second][eb->second];
        auto f = t.latticeElemOfSym.find(n.fact.sym);
        if (n.fact.kind != Fact::Edge || n.fact.pts != a.pts ||
            f == t.latticeElemOfSym.end() || f->second != m)
          return fail(err, "lattice-arch conclusion");
        return true;
      }
      return fail(err, "unhandled limit rule");
    }
    case DerivNode::Up: {
      if (n.premises.size() != 1) return fail(err, "weakening takes one premise");
      const DerivNode& c = n.premises[0];
      if (!chk(t, base, c, err)) return false;
      if (n.fact.kind != Fact::Fam || c.fact.kind != Fact::Fam || n.fact.sym != c.fact.sym ||
          n.fact.pts != c.fact.pts)
        return fail(err, "weakening shape");
      if (!FamVal::weaker(n.fact.fv, c.fact.fv)) return fail(err, "weakening not upward");
      if (!(n.fact.fv == c.fact.fv) && t.upAxiomFor(n.fact.sym) < 0)
        return fail(err, "theory has no upward axiom for this family");
      return true;
    }
    case DerivNode::Congruence: {
      if (n.premises.empty()) return fail(err, "congruence needs a base premise");
      const DerivNode& c = n.premises[0];
      if (!chk(t, base, c, err)) return false;
      if (c.fact.kind != n.fact.kind || c.fact.sym != n.fact.sym ||
          !(c.fact.fv == n.fact.fv) || c.fact.pts.size() != n.fact.pts.size())
        return fail(err, "congruence shape");
      if (n.premises.size() != 1 + n.fact.pts.size()) return fail(err, "congruence premise count");
      for (size_t i = 0; i < n.fact.pts.size(); i++) {
        const DerivNode& e = n.premises[i + 1];
        if (!chk(t, base, e, err)) return false;
        if (e.fact.kind != Fact::Eq || e.fact.pts != std::vector<int>{c.fact.pts[i], n.fact.pts[i]})
          return fail(err, "congruence equality mismatch");
      }
      return true;
    }
    case DerivNode::EqRefl:
      if (n.fact.kind != Fact::Eq || n.fact.pts[0] != n.fact.pts[1])
        return fail(err, "reflexivity shape");
      return true;
    case DerivNode::EqSym: {
      if (n.premises.size() != 1) return fail(err, "symmetry takes one premise");
      if (!chk(t, base, n.premises[0], err)) return false;
      const Fact& p = n.premises[0].fact;
      if (p.kind != Fact::Eq || n.fact.kind != Fact::Eq ||
          n.fact.pts != std::vector<int>{p.pts[1], p.pts[0]})
        return fail(err, "symmetry shape");
      return true;
    }
    case DerivNode::EqTrans: {
      if (n.premises.size() != 2) return fail(err, "transitivity takes two premises");
      for (auto& p : n.premises)
        if (!chk(t, base, p, err)) return false;
      const Fact& a = n.premises[0].fact;
      const Fact& b = n.premises[1].fact;
      if (a.kind != Fact::Eq || b.kind != Fact::Eq || a.pts[1] != b.pts[0] ||
          n.fact.kind != Fact::Eq ||
          n.fact.pts != std::vector<int>{a.pts[0], b.pts[1]})
        return fail(err, "transitivity shape");
      return true;
    }
  }
  return fail(err, "unknown rule");
}

}  // namespace

bool checkDerivation(const HornTheory& t, const Structure& base, const Goal& g,
                     const DerivNode& d, std::string* err) {
  if (!chk(t, base, d, err)) return false;
  if (g.isEq) {
    if (d.fact.kind != Fact::Eq || d.fact.pts != g.pts)
      return fail(err, "derivation does not conclude the goal equality");
    return true;
  }
  if (g.idx) {
    if (d.fact.kind != Fact::Fam || d.fact.sym != g.sym || d.fact.pts != g.pts ||
        !(d.fact.fv == FamVal{*g.idx, true}))
      return fail(err, "derivation does not conclude the goal edge");
    return true;
  }
  if (d.fact.kind != Fact::Edge || d.fact.sym != g.sym || d.fact.pts != g.pts)
    return fail(err, "derivation does not conclude the goal edge");
  return true;
}

bool isModel(const HornTheory& t, const Structure& s) {
  SatResult r = saturate(t, s);
  if (r.fuelExhausted) return false;
  for (int i = 0; i < s.size(); i++)
    if (r.rep[i] != i) return false;
  return r.edges == s.edges && r.fam == s.fam;
}

Structure reflect(const HornTheory& t, const Structure& s, std::vector<int>* quotientMap) {
  SatResult r = saturate(t, s);
  std::vector<int> reps;
  for (int i = 0; i < s.size(); i++)
    if (r.rep[i] == i) reps.push_back(i);
  std::map<int, int> cls;
  for (size_t i = 0; i < reps.size(); i++) cls[reps[i]] = (int)i;
  Structure q;
  q.name = s.name.empty() ? "R" : "R(" + s.name + ")";
  for (int rp : reps) q.points.push_back(s.points[rp]);
  for (auto& e : r.edges) {
    std::vector<int> pts;
    for (int p : e.pts) pts.push_back(cls.at(p));
    q.addEdge(e.sym, pts);
  }
  for (auto& [k, v] : r.fam) {
    auto [sym, p, qq] = k;
    q.addFam(sym, cls.at(p), cls.at(qq), v);
  }
  if (quotientMap) {
    quotientMap->resize(s.size());
    for (int i = 0; i < s.size(); i++) (*quotientMap)[i] = cls.at(r.rep[i]);
  }
  return q;
}

std::string checkEqAssumption(const HornTheory& t) {
  Structure x;
  x.points = {"x", "y"};
  bool trivial = false;
  for (auto& w : t.eqWitness) {
    if (w.sym == kEqSym) {
      trivial = true;
      continue;
    }
    if (w.idx)
      x.addFam(w.sym, w.a, w.b, FamVal{*w.idx, true});
    else
      x.addEdge(w.sym, {w.a, w.b});
  }
  if (!trivial) {
    Goal g;
    g.isEq = true;
    g.pts = {0, 1};
    auto r = entails(t, x, g);
    if (r.status != EntailStatus::Derivable)
      return "equality witness does not entail x = y";
  }
  Structure empty;
  empty.points = {"x"};
  for (auto& w : t.eqWitness) {
    if (w.sym == kEqSym) continue;
    Goal g;
    g.sym = w.sym;
    g.idx = w.idx;
    g.pts = {0, 0};
    auto r = entails(t, empty, g);
    if (r.status != EntailStatus::Derivable)
      return "diagonal witness edge " + t.symbols[w.sym].name + "(x, x) is not entailed";
  }
  return "";
}

Structure metricToStructure(const std::vector<std::string>& names,
                            const std::vector<std::vector<Rat>>& d) {
  size_t n = names.size();
  if (d.size() != n) throw std::invalid_argument("distance matrix size");
  Structure s;
  s.points = names;
  for (size_t i = 0; i < n; i++) {
    if (d[i].size() != n) throw std::invalid_argument("distance matrix row size");
    for (size_t j = 0; j < n; j++) {
      if (d[i][j] < Rat::zero() || d[i][j] > Rat::one())
        throw std::invalid_argument("distance out of [0,1]");
      s.addFam(0, (int)i, (int)j, FamVal{d[i][j], true});
    }
  }
  return s;
}

std::vector<std::vector<Rat>> structureToMetric(const Structure& s) {
  int n = s.size();
  std::vector<std::vector<Rat>> d(n, std::vector<Rat>(n));
  for (int i = 0; i < n; i++)
    for (int j = 0; j < n; j++) {
      const FamVal* v = s.famVal(0, i, j);
      if (!v || !v->attained)
        throw std::invalid_argument("structure has no attained distance for some pair");
      d[i][j] = v->v;
    }
  return d;
}

namespace {
void printD(const HornTheory& t, const Structure& base, const DerivNode& d, int depth,
            std::ostringstream& o) {
  for (int i = 0; i < depth; i++) o << "  ";
  const char* rn[] = {"input", "axiom", "limit", "up", "congruence", "eq-sym", "eq-trans",
                      "eq-refl"};
  o << rn[(int)d.rule];
  if (d.rule == DerivNode::Axiom) o << " " << t.axioms[d.axiom].name;
  if (d.rule == DerivNode::Limit) o << " " << d.limitName;
  o << " |- ";
  auto pt = [&](int p) { return p >= 0 && p < base.size() ? base.points[p] : std::to_string(p); };
  if (d.fact.kind == Fact::Eq) {
    o << pt(d.fact.pts[0]) << " = " << pt(d.fact.pts[1]);
  } else {
    o << t.symbols[d.fact.sym].name;
    if (d.fact.kind == Fact::Fam)
      o << "[" << d.fact.fv.v.str() << (d.fact.fv.attained ? "" : "+") << "]";
    o << "(";
    for (size_t i = 0; i < d.fact.pts.size(); i++) o << (i ? ", " : "") << pt(d.fact.pts[i]);
    o << ")";
  }
  o << "\n";
  for (auto& p : d.premises) printD(t, base, p, depth + 1, o);
}
}  // namespace

std::string printDerivation(const HornTheory& t, const Structure& base, const DerivNode& d) {
  std::ostringstream o;
  printD(t, base, d, 0, o);
  return o.str();
}

}  // namespace relat
