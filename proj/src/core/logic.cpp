#include "logic.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace relat {

namespace {

struct FuelOut {};

bool termLess(const STerm& a, const STerm& b) {
  int da = a.depth(), db = b.depth();
  if (da != db) return da < db;
  return a < b;
}

LJudgement witAtomJ(const EqAtom& w, const STerm& x, const STerm& y) {
  return LJudgement::rel(w.sym, w.idx, {w.a == 0 ? x : y, w.b == 0 ? x : y});
}

// -------------------------------------------------------------------------
// Forward chaining of the Horn axioms (equality conclusions skipped) over a
// tiny scratch carrier. The recorded steps are replayed later as RelAx
// instances over concrete terms, which is how derivations of the reflexive
// and symmetric equality-witness facts are manufactured generically.

struct ChainStep {
  int axiom = -1;
  std::vector<int> val;
  std::map<std::string, Rat> bind;
};

struct ChainState {
  std::set<DEdge> edges;
  std::map<FamKey, Rat> fam;
};

std::vector<ChainStep> hornChain(const HornTheory& th, int n, ChainState& st) {
  std::vector<ChainStep> steps;
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t ai = 0; ai < th.axioms.size(); ai++) {
      const HornAxiom& ax = th.axioms[ai];
      if (ax.conclusion.sym == kEqSym) continue;
      std::vector<int> val(ax.varCount, 0);
      while (true) {
        std::map<std::string, Rat> bind;
        bool ok = true;
        for (auto& p : ax.premises) {
          if (p.sym == kEqSym) {
            ok = false;
            break;
          }
          std::vector<int> pts;
          for (int a : p.args) pts.push_back(val[a]);
          if (!p.idx) {
            if (!st.edges.count(DEdge{p.sym, pts})) ok = false;
          } else {
            auto it = st.fam.find(FamKey{p.sym, pts[0], pts[1]});
            if (it == st.fam.end()) {
              ok = false;
            } else if (p.idx->vars.empty()) {
              if (!(it->second <= p.idx->c)) ok = false;
            } else {
              const std::string& v = p.idx->vars[0];
              auto b = bind.find(v);
              if (b == bind.end())
                bind[v] = it->second;
              else
                b->second = ratMax(b->second, it->second);
            }
          }
          if (!ok) break;
        }
        if (ok) {
          // conclusion-only metavariables instantiate to zero
          auto needVars = [&](const IndexExpr& e) {
            for (auto& v : e.vars)
              if (!bind.count(v)) bind[v] = Rat::zero();
          };
          if (ax.conclusion.idx) needVars(*ax.conclusion.idx);
          for (auto& sc : ax.conds) {
            needVars(sc.lhs);
            needVars(sc.rhs);
            if (!sc.eval(bind)) ok = false;
          }
          if (ok) {
            std::vector<int> pts;
            for (int a : ax.conclusion.args) pts.push_back(val[a]);
            bool fresh = false;
            if (!ax.conclusion.idx) {
              fresh = st.edges.insert(DEdge{ax.conclusion.sym, pts}).second;
            } else {
              Rat q = ax.conclusion.idx->eval(bind);
              FamKey k{ax.conclusion.sym, pts[0], pts[1]};
              auto it = st.fam.find(k);
              if (it == st.fam.end() || q < it->second) {
                st.fam[k] = q;
                fresh = true;
              }
            }
            if (fresh) {
              steps.push_back(ChainStep{(int)ai, val, bind});
              changed = true;
            }
          }
        }
        // odometer
        int i = ax.varCount;
        while (i > 0 && val[i - 1] == n - 1) val[--i] = 0;
        if (i == 0) break;
        val[i - 1]++;
      }
    }
  }
  return steps;
}

// Judgement-to-event index local to one chain replay.
struct LocalFacts {
  std::map<std::pair<int, std::vector<STerm>>, int> edges;
  std::map<std::pair<int, std::vector<STerm>>, std::pair<Rat, int>> fams;
};

}  // namespace

// ===========================================================================

struct Bank::Impl {
  std::shared_ptr<const Variety> V;
  const HornTheory* th = nullptr;
  Structure ctx;
  int depth = 0;
  long long fuel = 0;
  bool depthLimited = false;
  bool fuelEx = false;
  bool mergeable = true;

  std::vector<LProofNode> events;
  std::map<LJudgement, int> evMemo;

  std::map<STerm, int> termIdOf;
  std::vector<STerm> terms;
  std::vector<int> tCls, tDef;
  std::vector<std::vector<int>> tDiag;
  std::vector<std::vector<std::array<int, 2>>> tWit;
  std::map<std::tuple<int, int, int>, int> witMemo;  // (witness, tidA, tidB) -> event

  std::vector<int> par;
  std::vector<int> anch;                // root -> term id
  std::vector<std::vector<int>> mem;    // root -> member term ids

  std::map<DEdge, int> edgeEv;          // over class roots
  std::map<FamKey, FamVal> fam;
  std::map<FamKey, std::vector<std::pair<Rat, int>>> famHist;  // descending values
  std::map<std::pair<int, std::vector<int>>, std::pair<int, int>> defOps;  // -> (cls, tid)

  std::vector<std::pair<int, int>> pendingMerge;
  bool changed = false;

  std::vector<ChainStep> diagSteps, symSteps;
  std::vector<int> closureAx;  // per symbol: generated closure axiom index

  // ---- basics ------------------------------------------------------------

  int find(int c) {
    while (par[c] != c) c = par[c] = par[par[c]];
    return c;
  }

  int addEvent(LProofNode n) {
    if ((long long)events.size() >= fuel) throw FuelOut{};
    events.push_back(std::move(n));
    int id = (int)events.size() - 1;
    if (events[id].concl.kind == LJudgement::Rel) evMemo.emplace(events[id].concl, id);
    return id;
  }

  int intern(const STerm& t) {
    auto it = termIdOf.find(t);
    if (it != termIdOf.end()) return it->second;
    int id = (int)terms.size();
    terms.push_back(t);
    termIdOf.emplace(t, id);
    tCls.push_back(-1);
    tDef.push_back(-1);
    tDiag.emplace_back();
    tWit.emplace_back();
    return id;
  }

  bool pooled(const STerm& t) const {
    auto it = termIdOf.find(t);
    return it != termIdOf.end() && tCls[it->second] >= 0;
  }

  // Class of a term from the defined-operation table; no pooling.
  std::optional<int> rootOfTerm(const STerm& t) {
    if (t.isVar()) {
      if (t.var >= (int)ctx.points.size()) return std::nullopt;
      auto it = termIdOf.find(t);
      return find(tCls[it->second]);
    }
    std::vector<int> args;
    for (auto& a : t.args) {
      auto r = rootOfTerm(a);
      if (!r) return std::nullopt;
      args.push_back(*r);
    }
    if (t.op < 0 || t.op >= (int)V->ops.size()) return std::nullopt;
    if ((int)t.args.size() != V->ops[t.op].arity.size()) return std::nullopt;
    auto it = defOps.find({t.op, args});
    if (it == defOps.end()) return std::nullopt;
    return find(it->second.first);
  }

  std::vector<int> liveRoots() {
    std::set<int> s;
    for (int c = 0; c < (int)par.size(); c++) s.insert(find(c));
    return std::vector<int>(s.begin(), s.end());
  }

  const STerm& anchorTerm(int root) { return terms[anch[find(root)]]; }

  // ---- chain replay --------------------------------------------------------

  // Replays recorded Horn-chaining steps as RelAx events with scratch points
  // mapped to concrete (pooled, defined) terms.
  void replayChain(const std::vector<ChainStep>& steps, const std::vector<STerm>& pts,
                   LocalFacts& local) {
    for (auto& st : steps) {
      const HornAxiom& ax = th->axioms[st.axiom];
      LProofNode n;
      n.rule = LProofNode::RelAx;
      n.axiom = st.axiom;
      n.ratBind = st.bind;
      for (int v : st.val) n.tau.push_back(pts[v]);
      for (auto& p : ax.premises) {
        std::vector<STerm> a;
        for (int x : p.args) a.push_back(n.tau[x]);
        if (!p.idx) {
          n.prem.push_back(local.edges.at({p.sym, a}));
        } else {
          Rat need = p.idx->eval(st.bind);
          auto& got = local.fams.at({p.sym, a});
          n.prem.push_back(got.first == need ? got.second : weakenEvent(got.second, need));
        }
      }
      for (int x : ax.conclusion.args) n.prem.push_back(defEventOf(n.tau[x]));
      std::vector<STerm> ca;
      for (int x : ax.conclusion.args) ca.push_back(n.tau[x]);
      if (!ax.conclusion.idx) {
        n.concl = LJudgement::rel(ax.conclusion.sym, std::nullopt, ca);
        int ev = addEvent(std::move(n));
        local.edges.emplace(std::make_pair(ax.conclusion.sym, ca), ev);
      } else {
        Rat q = ax.conclusion.idx->eval(st.bind);
        n.concl = LJudgement::rel(ax.conclusion.sym, q, ca);
        int ev = addEvent(std::move(n));
        auto key = std::make_pair(ax.conclusion.sym, ca);
        auto it = local.fams.find(key);
        if (it == local.fams.end() || q < it->second.first) local.fams[key] = {q, ev};
      }
    }
  }

  int localGet(LocalFacts& local, const LJudgement& j) {
    std::pair<int, std::vector<STerm>> key{j.sym, j.terms};
    if (!j.idx) return local.edges.at(key);
    auto& got = local.fams.at(key);
    if (got.first == *j.idx) return got.second;
    return weakenEvent(got.second, *j.idx);
  }

  const std::vector<int>& diag(int tid) {
    if (!tDiag[tid].empty()) return tDiag[tid];
    LocalFacts local;
    replayChain(diagSteps, {terms[tid]}, local);
    for (auto& w : th->eqWitness)
      tDiag[tid].push_back(localGet(local, witAtomJ(w, terms[tid], terms[tid])));
    return tDiag[tid];
  }

  // From events for every witness atom instantiated at (u, v), events for
  // every witness atom instantiated at (v, u).
  std::vector<int> symReplay(const STerm& u, const STerm& v, const std::vector<int>& in) {
    LocalFacts local;
    for (size_t k = 0; k < th->eqWitness.size(); k++) {
      LJudgement j = witAtomJ(th->eqWitness[k], u, v);
      if (!j.idx)
        local.edges.emplace(std::make_pair(j.sym, j.terms), in[k]);
      else {
        auto key = std::make_pair(j.sym, j.terms);
        auto it = local.fams.find(key);
        if (it == local.fams.end() || *j.idx < it->second.first) local.fams[key] = {*j.idx, in[k]};
      }
    }
    replayChain(symSteps, {u, v}, local);
    std::vector<int> out;
    for (auto& w : th->eqWitness) out.push_back(localGet(local, witAtomJ(w, v, u)));
    return out;
  }

  // ---- transport -----------------------------------------------------------

  int defEventOf(const STerm& t) { return tDef[termIdOf.at(t)]; }

  // One closure-axiom application rewriting the argument tuple of a
  // relational fact; wit(i, k) supplies the witness event for position i.
  int closureStep(int srcEv, const std::vector<STerm>& targets,
                  const std::function<int(int, int)>& wit) {
    const LJudgement& s = events[srcEv].concl;
    if (s.terms == targets) return srcEv;
    LProofNode n;
    n.rule = LProofNode::RelAx;
    n.axiom = closureAx[s.sym];
    if (n.axiom < 0) throw std::logic_error("no closure axiom for symbol");
    int k = (int)s.terms.size();
    n.tau.resize(2 * k);
    for (int i = 0; i < k; i++) {
      n.tau[2 * i] = s.terms[i];
      n.tau[2 * i + 1] = targets[i];
    }
    if (s.idx) n.ratBind["e"] = *s.idx;
    for (int i = 0; i < k; i++)
      for (size_t w = 0; w < th->eqWitness.size(); w++) n.prem.push_back(wit(i, (int)w));
    n.prem.push_back(srcEv);
    for (auto& t : targets) n.prem.push_back(defEventOf(t));
    n.concl = LJudgement::rel(s.sym, s.idx, targets);
    auto it = evMemo.find(n.concl);
    if (it != evMemo.end()) return it->second;
    return addEvent(std::move(n));
  }

  // Event for a witness atom instantiated at (a, b) with a ~ b.
  int witEvent(int k, const STerm& a, const STerm& b) {
    int ta = termIdOf.at(a), tb = termIdOf.at(b);
    if (ta == tb) return diag(ta)[k];
    int r = find(tCls[ta]);
    const STerm& an = terms[anch[r]];
    if (tb == anch[r]) return tWit[ta][k][0];
    if (ta == anch[r]) return tWit[tb][k][1];
    auto key = std::make_tuple(k, ta, tb);
    auto it = witMemo.find(key);
    if (it != witMemo.end()) return it->second;
    // transport psi_k(a, anchor) at the anchor position to b
    LJudgement tgt = witAtomJ(th->eqWitness[k], a, b);
    LJudgement src = witAtomJ(th->eqWitness[k], a, an);
    int ev = closureStep(tWit[ta][k][0], tgt.terms, [&](int i, int w) {
      if (src.terms[i] == tgt.terms[i]) return diag(termIdOf.at(src.terms[i]))[w];
      return tWit[tb][w][1];  // psi_w(anchor, b)
    });
    witMemo.emplace(key, ev);
    return ev;
  }

  // Event for a binary relational judgement whose symbol appears in the
  // equality witness, over two terms of one class.
  int relEventSameClass(int sym, const std::optional<Rat>& idx, const STerm& a, const STerm& b) {
    for (size_t k = 0; k < th->eqWitness.size(); k++) {
      const EqAtom& w = th->eqWitness[k];
      if (w.sym != sym || w.idx != idx) continue;
      if (w.a == 0 && w.b == 1) return witEvent((int)k, a, b);
      if (w.a == 1 && w.b == 0) return witEvent((int)k, b, a);
    }
    throw std::logic_error("relation is not an equality-witness symbol");
  }

  int weakenEvent(int ev, const Rat& q) {
    const LJudgement& s = events[ev].concl;
    if (*s.idx == q) return ev;
    if (q < *s.idx) throw std::logic_error("cannot strengthen a family index");
    LJudgement goal = LJudgement::rel(s.sym, q, s.terms);
    auto it = evMemo.find(goal);
    if (it != evMemo.end()) return it->second;
    int ai = th->upAxiomFor(s.sym);
    if (ai < 0) throw std::logic_error("no weakening axiom for family symbol");
    const HornAxiom& ax = th->axioms[ai];
    const Atom& p = ax.premises[0];
    LProofNode n;
    n.rule = LProofNode::RelAx;
    n.axiom = ai;
    n.tau.resize(ax.varCount, s.terms[0]);
    n.tau[p.args[0]] = s.terms[0];
    n.tau[p.args[1]] = s.terms[1];
    const std::string& e = p.idx->vars[0];
    n.ratBind[e] = *s.idx;
    Rat rest = q - *s.idx - ax.conclusion.idx->c;
    bool first = true;
    for (auto& v : ax.conclusion.idx->vars) {
      if (v == e) continue;
      n.ratBind[v] = first ? rest : Rat::zero();
      first = false;
    }
    if (first || rest < Rat::zero()) throw std::logic_error("weakening axiom shape unusable");
    n.prem.push_back(ev);
    for (int x : ax.conclusion.args) n.prem.push_back(defEventOf(n.tau[x]));
    n.concl = goal;
    return addEvent(std::move(n));
  }

  // Event for a relational judgement over pooled, defined terms whose fact
  // holds at class level; transports and weakens stored events as needed.
  int eventFor(const LJudgement& j) {
    auto it = evMemo.find(j);
    if (it != evMemo.end()) return it->second;
    std::vector<int> roots;
    for (auto& t : j.terms) {
      auto r = rootOfTerm(t);
      if (!r) throw std::logic_error("judgement over an undefined term");
      roots.push_back(*r);
    }
    int srcEv;
    Rat have;
    if (!j.idx) {
      auto e = edgeEv.find(DEdge{j.sym, roots});
      if (e == edgeEv.end()) {
        // witness facts between members of one class need not be stored
        if (roots.size() == 2 && roots[0] == roots[1])
          return relEventSameClass(j.sym, j.idx, j.terms[0], j.terms[1]);
        throw std::logic_error("missing class-level fact");
      }
      srcEv = e->second;
    } else {
      auto h = famHist.find(FamKey{j.sym, roots[0], roots[1]});
      if (h == famHist.end()) {
        if (roots[0] == roots[1]) {
          for (auto& w : th->eqWitness)
            if (w.sym == j.sym && w.idx && *w.idx <= *j.idx)
              return weakenEvent(relEventSameClass(j.sym, w.idx, j.terms[0], j.terms[1]), *j.idx);
        }
        throw std::logic_error("missing class-level family fact");
      }
      srcEv = -1;
      for (auto& [v, ev] : h->second)
        if (v == *j.idx) srcEv = ev;
      if (srcEv < 0) {
        auto& [v, ev] = h->second.back();
        if (*j.idx < v) throw std::logic_error("family fact weaker than requested");
        srcEv = ev;
      }
      have = *events[srcEv].concl.idx;
    }
    // transport the stored event's terms to the requested ones
    const std::vector<STerm>& s = events[srcEv].concl.terms;
    int ev = closureStep(srcEv, j.terms,
                         [&](int i, int k) { return witEvent(k, s[i], j.terms[i]); });
    if (j.idx && *events[ev].concl.idx != *j.idx) ev = weakenEvent(ev, *j.idx);
    evMemo.emplace(j, ev);
    return ev;
  }

  // ---- classes -------------------------------------------------------------

  int newClass(int tid) {
    int c = (int)par.size();
    par.push_back(c);
    anch.push_back(tid);
    mem.push_back({tid});
    tCls[tid] = c;
    if (mergeable) {
      auto& d = diag(tid);
      tWit[tid].clear();
      for (size_t k = 0; k < th->eqWitness.size(); k++) tWit[tid].push_back({d[k], d[k]});
    }
    changed = true;
    return c;
  }

  // Mor-derived witness events psi_k instantiated at (s, b) for two defined
  // operation terms with pairwise equivalent arguments.
  std::vector<int> linkEvents(int stid, int btid) {
    const STerm& S = terms[stid];
    const STerm& B = terms[btid];
    std::vector<int> out;
    for (size_t k = 0; k < th->eqWitness.size(); k++) {
      LJudgement c = witAtomJ(th->eqWitness[k], S, B);
      LProofNode n;
      n.rule = LProofNode::Mor;
      n.op = S.op;
      n.concl = c;
      int npts = (int)S.args.size();
      for (int j = 0; j < npts; j++)
        n.prem.push_back(relEventSameClass(c.sym, c.idx, c.terms[0].args[j], c.terms[1].args[j]));
      for (auto& t : c.terms) n.prem.push_back(defEventOf(t));
      auto it = evMemo.find(c);
      out.push_back(it != evMemo.end() ? it->second : addEvent(std::move(n)));
    }
    return out;
  }

  void joinExisting(int tid, int btid) {
    int r = find(tCls[btid]);
    tCls[tid] = r;
    mem[r].push_back(tid);
    if (!mergeable) {
      // without a signature-level witness nothing identifies distinct terms
      throw std::logic_error("duplicate operation instance without a mergeable witness");
    }
    auto link = linkEvents(tid, btid);
    const STerm& S = terms[tid];
    const STerm& AN = terms[anch[r]];
    tWit[tid].resize(th->eqWitness.size());
    for (size_t k = 0; k < th->eqWitness.size(); k++) {
      if (anch[r] == btid) {
        tWit[tid][k][0] = link[k];
        continue;
      }
      LJudgement src = witAtomJ(th->eqWitness[k], S, terms[btid]);
      LJudgement tgt = witAtomJ(th->eqWitness[k], S, AN);
      tWit[tid][k][0] = closureStep(link[k], tgt.terms, [&](int i, int w) {
        if (src.terms[i] == tgt.terms[i]) return diag(termIdOf.at(src.terms[i]))[w];
        return tWit[btid][w][0];  // psi_w(b, anchor)
      });
    }
    std::vector<int> fwd;
    for (size_t k = 0; k < th->eqWitness.size(); k++) fwd.push_back(tWit[tid][k][0]);
    auto rev = symReplay(S, AN, fwd);
    for (size_t k = 0; k < th->eqWitness.size(); k++) tWit[tid][k][1] = rev[k];
    if (termLess(terms[tid], terms[anch[r]])) reAnchor(r, tid);
  }

  // Keeps the anchor the minimal member (depth, then term order), so terms
  // the rule engines build from anchors are the canonical representatives.
  void reAnchor(int r, int nt) {
    int o = anch[r];
    if (o == nt) return;
    size_t W = th->eqWitness.size();
    for (int m : mem[r]) {
      if (m == nt) continue;
      if (m == o) {
        for (size_t k = 0; k < W; k++) tWit[o][k] = {tWit[nt][k][1], tWit[nt][k][0]};
        continue;
      }
      for (size_t k = 0; k < W; k++) {
        LJudgement src = witAtomJ(th->eqWitness[k], terms[m], terms[o]);
        LJudgement tgt = witAtomJ(th->eqWitness[k], terms[m], terms[nt]);
        tWit[m][k][0] = closureStep(tWit[m][k][0], tgt.terms, [&](int i, int w) {
          if (src.terms[i] == tgt.terms[i]) return diag(termIdOf.at(src.terms[i]))[w];
          return tWit[nt][w][1];  // psi_w(old anchor, new anchor)
        });
      }
      std::vector<int> fwd;
      for (size_t k = 0; k < W; k++) fwd.push_back(tWit[m][k][0]);
      auto rev = symReplay(terms[m], terms[nt], fwd);
      for (size_t k = 0; k < W; k++) tWit[m][k][1] = rev[k];
    }
    for (size_t k = 0; k < W; k++) {
      int d = diag(nt)[k];
      tWit[nt][k] = {d, d};
    }
    anch[r] = nt;
    witMemo.clear();
  }

  void defineOpTerm(int tid, int earEv) {
    tDef[tid] = earEv;
    const STerm& t = terms[tid];
    std::vector<int> args;
    for (auto& a : t.args) args.push_back(find(tCls[termIdOf.at(a)]));
    auto key = std::make_pair(t.op, std::move(args));
    auto it = defOps.find(key);
    if (it == defOps.end()) {
      int c = newClass(tid);
      defOps.emplace(std::move(key), std::make_pair(c, tid));
    } else {
      joinExisting(tid, it->second.second);
    }
  }

  // Pools the term (and its subterms) if its class is known; returns the
  // class root, or nothing when the term is not derivably defined.
  std::optional<int> ensureDefined(const STerm& t) {
    if (t.isVar()) {
      if (t.var >= (int)ctx.points.size()) return std::nullopt;
      return find(tCls[termIdOf.at(t)]);
    }
    if (pooled(t)) return find(tCls[termIdOf.at(t)]);
    if (t.op < 0 || t.op >= (int)V->ops.size()) return std::nullopt;
    const Structure& ar = V->ops[t.op].arity;
    if ((int)t.args.size() != ar.size()) return std::nullopt;
    std::vector<int> args;
    for (auto& a : t.args) {
      auto r = ensureDefined(a);
      if (!r) return std::nullopt;
      args.push_back(*r);
    }
    if (!defOps.count({t.op, args})) return std::nullopt;
    LProofNode n;
    n.rule = LProofNode::EAr;
    n.op = t.op;
    n.concl = LJudgement::def(t);
    for (auto& e : ar.edges) {
      std::vector<STerm> a;
      for (int p : e.pts) a.push_back(t.args[p]);
      n.prem.push_back(eventFor(LJudgement::rel(e.sym, std::nullopt, a)));
    }
    for (auto& [k, fv] : ar.fam) {
      auto [sym, p, q] = k;
      n.prem.push_back(eventFor(LJudgement::rel(sym, fv.v, {t.args[p], t.args[q]})));
    }
    for (auto& a : t.args) n.prem.push_back(defEventOf(a));
    int tid = intern(t);
    int ev = addEvent(std::move(n));
    defineOpTerm(tid, ev);
    return find(tCls[tid]);
  }

  // ---- facts and merging -----------------------------------------------------

  void maybeMerge(int c, int d) {
    if (!mergeable) return;
    c = find(c);
    d = find(d);
    if (c == d) return;
    for (auto [x, y] : {std::pair{c, d}, std::pair{d, c}})
      for (auto& w : th->eqWitness) {
        int p0 = w.a == 0 ? x : y, p1 = w.b == 0 ? x : y;
        if (!w.idx) {
          if (!edgeEv.count(DEdge{w.sym, {p0, p1}})) return;
        } else {
          auto it = fam.find(FamKey{w.sym, p0, p1});
          if (it == fam.end() || !it->second.holds(*w.idx)) return;
        }
      }
    pendingMerge.push_back({c, d});
  }

  void addEdgeFact(int sym, std::vector<int> roots, int ev) {
    for (auto& r : roots) r = find(r);
    DEdge k{sym, roots};
    if (edgeEv.emplace(std::move(k), ev).second) {
      changed = true;
      if (roots.size() == 2) maybeMerge(roots[0], roots[1]);
    }
  }

  void addFamFact(int sym, int c1, int c2, const Rat& v, int ev) {
    c1 = find(c1);
    c2 = find(c2);
    FamKey k{sym, c1, c2};
    auto it = fam.find(k);
    if (it != fam.end() && it->second.v <= v) return;
    fam[k] = FamVal{v, true};
    famHist[k].push_back({v, ev});
    changed = true;
    maybeMerge(c1, c2);
  }

  void recanon() {
    {
      std::map<DEdge, int> e2;
      for (auto& [k, ev] : edgeEv) {
        DEdge kk = k;
        for (auto& p : kk.pts) p = find(p);
        auto it = e2.find(kk);
        if (it == e2.end() || ev < it->second) e2[kk] = ev;
      }
      edgeEv.swap(e2);
    }
    {
      std::map<FamKey, std::vector<std::pair<Rat, int>>> h2;
      for (auto& [k, hist] : famHist) {
        FamKey kk{std::get<0>(k), find(std::get<1>(k)), find(std::get<2>(k))};
        auto& dst = h2[kk];
        dst.insert(dst.end(), hist.begin(), hist.end());
      }
      std::map<FamKey, FamVal> f2;
      for (auto& [k, hist] : h2) {
        std::sort(hist.begin(), hist.end(), [](auto& a, auto& b) {
          return a.first != b.first ? b.first < a.first : a.second < b.second;
        });
        hist.erase(std::unique(hist.begin(), hist.end(),
                               [](auto& a, auto& b) { return a.first == b.first; }),
                   hist.end());
        f2[k] = FamVal{hist.back().first, true};
      }
      famHist.swap(h2);
      fam.swap(f2);
    }
    {
      std::map<std::pair<int, std::vector<int>>, std::pair<int, int>> d2;
      std::vector<std::pair<int, int>> collide;
      for (auto& [k, v] : defOps) {
        auto kk = k;
        for (auto& a : kk.second) a = find(a);
        auto vv = std::make_pair(find(v.first), v.second);
        auto it = d2.find(kk);
        if (it == d2.end()) {
          d2.emplace(std::move(kk), vv);
        } else if (it->second.first != vv.first) {
          collide.push_back({it->second.second, vv.second});
          if (termLess(terms[vv.second], terms[it->second.second])) it->second = vv;
        } else if (termLess(terms[vv.second], terms[it->second.second])) {
          it->second = vv;
        }
      }
      defOps.swap(d2);
      for (auto [t1, t2] : collide) {
        // same argument classes, different result classes: congruence
        auto fwd = linkEvents(t1, t2);
        auto rev = symReplay(terms[t1], terms[t2], fwd);
        for (size_t k = 0; k < th->eqWitness.size(); k++) {
          for (auto [evs, a, b] :
               {std::tuple{fwd[k], t1, t2}, std::tuple{rev[k], t2, t1}}) {
            LJudgement j = witAtomJ(th->eqWitness[k], terms[a], terms[b]);
            std::vector<int> roots;
            for (auto& t : j.terms) roots.push_back(find(tCls[termIdOf.at(t)]));
            if (!j.idx)
              addEdgeFact(j.sym, roots, evs);
            else
              addFamFact(j.sym, roots[0], roots[1], *j.idx, evs);
          }
        }
      }
    }
  }

  void mergePair(int c, int d) {
    c = find(c);
    d = find(d);
    if (c == d) return;
    const STerm& A = terms[anch[c]];
    const STerm& B = terms[anch[d]];
    std::vector<int> ab, ba;
    for (auto& w : th->eqWitness) {
      ab.push_back(eventFor(witAtomJ(w, A, B)));
      ba.push_back(eventFor(witAtomJ(w, B, A)));
    }
    int wnr = termLess(A, B) ? c : d;
    int lsr = wnr == c ? d : c;
    std::vector<int>& l2w = wnr == c ? ba : ab;  // psi(anchor_l, anchor_w)
    const STerm& AW = terms[anch[wnr]];
    const STerm& AL = terms[anch[lsr]];
    for (int m : mem[lsr]) {
      for (size_t k = 0; k < th->eqWitness.size(); k++) {
        LJudgement src = witAtomJ(th->eqWitness[k], terms[m], AL);
        LJudgement tgt = witAtomJ(th->eqWitness[k], terms[m], AW);
        tWit[m][k][0] = closureStep(tWit[m][k][0], tgt.terms, [&](int i, int w) {
          if (src.terms[i] == tgt.terms[i]) return diag(termIdOf.at(src.terms[i]))[w];
          return l2w[w];
        });
      }
      std::vector<int> fwd;
      for (size_t k = 0; k < th->eqWitness.size(); k++) fwd.push_back(tWit[m][k][0]);
      auto rev = symReplay(terms[m], AW, fwd);
      for (size_t k = 0; k < th->eqWitness.size(); k++) tWit[m][k][1] = rev[k];
    }
    par[lsr] = wnr;
    auto moved = std::move(mem[lsr]);
    mem[lsr].clear();
    mem[wnr].insert(mem[wnr].end(), moved.begin(), moved.end());
    changed = true;
    recanon();
  }

  void processMerges() {
    while (!pendingMerge.empty()) {
      auto [c, d] = pendingMerge.back();
      pendingMerge.pop_back();
      mergePair(c, d);
    }
  }

  // ---- rule engines ----------------------------------------------------------

  void runRelAx() {
    auto roots = liveRoots();
    if (roots.empty()) return;
    std::vector<DEdge> edgeList;
    for (auto& [k, _] : edgeEv) edgeList.push_back(k);
    std::vector<std::pair<FamKey, Rat>> famList;
    for (auto& [k, v] : fam) famList.push_back({k, v.v});
    for (size_t ai = 0; ai < th->axioms.size(); ai++) {
      const HornAxiom& ax = th->axioms[ai];
      if (ax.conclusion.sym == kEqSym) continue;
      bool usable = true;
      for (auto& p : ax.premises)
        if (p.sym == kEqSym) usable = false;
      if (!usable) continue;
      std::vector<int> val(ax.varCount, -1);
      std::map<std::string, Rat> bind;

      std::function<void()> finish = [&] {
        auto localBind = bind;
        auto needVars = [&](const IndexExpr& e) {
          for (auto& v : e.vars)
            if (!localBind.count(v)) localBind[v] = Rat::zero();
        };
        if (ax.conclusion.idx) needVars(*ax.conclusion.idx);
        for (auto& sc : ax.conds) {
          needVars(sc.lhs);
          needVars(sc.rhs);
        }
        for (auto& sc : ax.conds)
          if (!sc.eval(localBind)) return;
        std::vector<int> cr;
        for (int a : ax.conclusion.args) cr.push_back(find(val[a]));
        Rat q;
        if (ax.conclusion.idx) {
          q = ax.conclusion.idx->eval(localBind);
          FamKey k{ax.conclusion.sym, cr[0], cr[1]};
          auto it = fam.find(k);
          if (it != fam.end() && it->second.v <= q) return;
        } else {
          if (edgeEv.count(DEdge{ax.conclusion.sym, cr})) return;
        }
        LProofNode n;
        n.rule = LProofNode::RelAx;
        n.axiom = (int)ai;
        n.ratBind = localBind;
        for (int i = 0; i < ax.varCount; i++) n.tau.push_back(anchorTerm(val[i]));
        for (auto& p : ax.premises) {
          std::vector<STerm> a;
          for (int x : p.args) a.push_back(n.tau[x]);
          std::optional<Rat> pidx;
          if (p.idx) pidx = p.idx->eval(localBind);
          n.prem.push_back(eventFor(LJudgement::rel(p.sym, pidx, a)));
        }
        for (int x : ax.conclusion.args) n.prem.push_back(defEventOf(n.tau[x]));
        std::vector<STerm> ca;
        for (int x : ax.conclusion.args) ca.push_back(n.tau[x]);
        n.concl = LJudgement::rel(ax.conclusion.sym, ax.conclusion.idx ? std::optional<Rat>(q)
                                                                       : std::nullopt,
                                  ca);
        int ev = addEvent(std::move(n));
        if (ax.conclusion.idx)
          addFamFact(ax.conclusion.sym, cr[0], cr[1], q, ev);
        else
          addEdgeFact(ax.conclusion.sym, cr, ev);
      };

      std::function<void(int)> rest = [&](int v) {
        if (v == ax.varCount) {
          finish();
          return;
        }
        if (val[v] >= 0) {
          rest(v + 1);
          return;
        }
        for (int r : roots) {
          val[v] = r;
          rest(v + 1);
        }
        val[v] = -1;
      };

      std::function<void(size_t)> match = [&](size_t pi) {
        if (pi == ax.premises.size()) {
          rest(0);
          return;
        }
        const Atom& p = ax.premises[pi];
        auto tryPts = [&](const std::vector<int>& pts, auto&& cont) {
          std::vector<int> touched;
          bool ok = true;
          for (size_t i = 0; i < p.args.size() && ok; i++) {
            int a = p.args[i];
            if (val[a] < 0) {
              val[a] = pts[i];
              touched.push_back(a);
            } else if (find(val[a]) != pts[i]) {
              ok = false;
            }
          }
          if (ok) cont();
          for (int a : touched) val[a] = -1;
        };
        if (!p.idx) {
          for (auto& de : edgeList) {
            if (de.sym != p.sym || de.pts.size() != p.args.size()) continue;
            tryPts(de.pts, [&] { match(pi + 1); });
          }
        } else {
          for (auto& [fk, v] : famList) {
            if (std::get<0>(fk) != p.sym) continue;
            std::vector<int> pts{std::get<1>(fk), std::get<2>(fk)};
            if (p.idx->vars.empty()) {
              if (!(v <= p.idx->c)) continue;
              tryPts(pts, [&] { match(pi + 1); });
            } else {
              const std::string& e = p.idx->vars[0];
              tryPts(pts, [&] {
                auto old = bind.find(e);
                std::optional<Rat> saved;
                if (old != bind.end()) saved = old->second;
                bind[e] = saved ? ratMax(*saved, v) : v;
                match(pi + 1);
                if (saved)
                  bind[e] = *saved;
                else
                  bind.erase(e);
              });
            }
          }
        }
      };
      match(0);
    }
  }

  // Enumerates maps from the points of `ar` into `roots` under which every
  // stored edge and family entry of `ar` holds class-level, pruning as each
  // point is assigned.
  void forEachMap(const Structure& ar, const std::vector<int>& roots,
                  const std::function<void(const std::vector<int>&)>& cb) {
    int n = ar.size();
    std::vector<int> f(n);
    if (n == 0) {
      cb(f);
      return;
    }
    if (roots.empty()) return;
    std::vector<std::vector<const DEdge*>> eAt(n);
    std::vector<std::vector<std::pair<const FamKey*, Rat>>> fAt(n);
    for (auto& e : ar.edges) {
      int m = 0;
      for (int p : e.pts) m = std::max(m, p);
      eAt[m].push_back(&e);
    }
    for (auto& [k, fv] : ar.fam)
      fAt[std::max(std::get<1>(k), std::get<2>(k))].push_back({&k, fv.v});
    // per-point candidate lists from the unary constraints (self-loops and
    // diagonal family entries); this keeps the search narrow when most
    // classes lack reflexive facts
    std::vector<std::vector<int>> cand(n);
    for (int i = 0; i < n; i++) {
      std::vector<const DEdge*> ue;
      std::vector<std::pair<int, Rat>> uf;
      for (auto& e : ar.edges) {
        bool unary = !e.pts.empty();
        for (int p : e.pts) unary &= p == i;
        if (unary) ue.push_back(&e);
      }
      for (auto& [k, fv] : ar.fam)
        if (std::get<1>(k) == i && std::get<2>(k) == i)
          uf.push_back({std::get<0>(k), fv.v});
      for (int r : roots) {
        bool ok = true;
        for (auto* e : ue)
          if (!edgeEv.count(DEdge{e->sym, std::vector<int>(e->pts.size(), r)})) {
            ok = false;
            break;
          }
        if (ok)
          for (auto& [sym, v] : uf) {
            auto it = fam.find(FamKey{sym, r, r});
            if (it == fam.end() || !(it->second.v <= v)) {
              ok = false;
              break;
            }
          }
        if (ok) cand[i].push_back(r);
      }
      if (cand[i].empty()) return;
    }
    std::function<void(int)> go = [&](int i) {
      if (i == n) {
        cb(f);
        return;
      }
      for (int r : cand[i]) {
        f[i] = r;
        bool ok = true;
        for (auto* e : eAt[i]) {
          std::vector<int> pts;
          for (int p : e->pts) pts.push_back(f[p]);
          if (!edgeEv.count(DEdge{e->sym, pts})) {
            ok = false;
            break;
          }
        }
        if (ok)
          for (auto& [k, v] : fAt[i]) {
            auto it = fam.find(FamKey{std::get<0>(*k), f[std::get<1>(*k)], f[std::get<2>(*k)]});
            if (it == fam.end() || !(it->second.v <= v)) {
              ok = false;
              break;
            }
          }
        if (ok) go(i + 1);
      }
    };
    go(0);
  }

  bool arityHoldsAt(const Structure& ar, const std::vector<int>& f) {
    for (auto& e : ar.edges) {
      std::vector<int> pts;
      for (int p : e.pts) pts.push_back(f[p]);
      if (!edgeEv.count(DEdge{e.sym, pts})) return false;
    }
    for (auto& [k, fv] : ar.fam) {
      auto [sym, p, q] = k;
      auto it = fam.find(FamKey{sym, f[p], f[q]});
      if (it == fam.end() || !(it->second.v <= fv.v)) return false;
    }
    return true;
  }

  void runEAr() {
    auto roots = liveRoots();
    for (size_t op = 0; op < V->ops.size(); op++) {
      const Structure& ar = V->ops[op].arity;
      forEachMap(ar, roots, [&](const std::vector<int>& fr) {
        STerm t;
        t.op = (int)op;
        int d = 0;
        for (int r : fr) {
          t.args.push_back(anchorTerm(r));
          d = std::max(d, t.args.back().depth());
        }
        if (pooled(t)) return;
        bool known = defOps.count({(int)op, fr}) > 0;
        if (known) return;
        if (d + 1 > depth) {
          depthLimited = true;
          return;
        }
        LProofNode e;
        e.rule = LProofNode::EAr;
        e.op = (int)op;
        e.concl = LJudgement::def(t);
        for (auto& ed : ar.edges) {
          std::vector<STerm> a;
          for (int p : ed.pts) a.push_back(t.args[p]);
          e.prem.push_back(eventFor(LJudgement::rel(ed.sym, std::nullopt, a)));
        }
        for (auto& [k, fv] : ar.fam) {
          auto [sym, p, q] = k;
          e.prem.push_back(eventFor(LJudgement::rel(sym, fv.v, {t.args[p], t.args[q]})));
        }
        for (auto& a : t.args) e.prem.push_back(defEventOf(a));
        int tid = intern(t);
        int ev = addEvent(std::move(e));
        defineOpTerm(tid, ev);
      });
    }
  }

  void runMor() {
    // snapshot of defined-operation instances per operation
    std::map<int, std::vector<std::tuple<std::vector<int>, int, int>>> inst;
    for (auto& [k, v] : defOps) {
      std::vector<int> args = k.second;
      for (auto& a : args) a = find(a);
      inst[k.first].push_back({args, find(v.first), v.second});
    }
    for (size_t sym = 0; sym < th->symbols.size(); sym++) {
      const RelSymbol& rs = th->symbols[sym];
      for (auto& [op, entries] : inst) {
        int n = V->ops[op].arity.size();
        std::vector<int> pick(rs.arity, 0);
        if (entries.empty()) continue;
        while (true) {
          bool ok = true;
          Rat q;
          for (int j = 0; j < n && ok; j++) {
            if (!rs.family) {
              std::vector<int> pts;
              for (int i = 0; i < rs.arity; i++)
                pts.push_back(std::get<0>(entries[pick[i]])[j]);
              if (!edgeEv.count(DEdge{(int)sym, pts})) ok = false;
            } else {
              auto it = fam.find(FamKey{(int)sym, std::get<0>(entries[pick[0]])[j],
                                        std::get<0>(entries[pick[1]])[j]});
              if (it == fam.end())
                ok = false;
              else
                q = ratMax(q, it->second.v);
            }
          }
          if (ok) {
            std::vector<int> cr;
            for (int i = 0; i < rs.arity; i++) cr.push_back(std::get<1>(entries[pick[i]]));
            bool fresh;
            if (rs.family) {
              auto it = fam.find(FamKey{(int)sym, cr[0], cr[1]});
              fresh = it == fam.end() || q < it->second.v;
            } else {
              fresh = !edgeEv.count(DEdge{(int)sym, cr});
            }
            if (fresh) {
              LProofNode m;
              m.rule = LProofNode::Mor;
              m.op = op;
              std::vector<STerm> ct;
              for (int i = 0; i < rs.arity; i++) ct.push_back(terms[std::get<2>(entries[pick[i]])]);
              std::optional<Rat> idx;
              if (rs.family) idx = q;
              for (int j = 0; j < n; j++) {
                std::vector<STerm> a;
                for (int i = 0; i < rs.arity; i++) a.push_back(ct[i].args[j]);
                m.prem.push_back(eventFor(LJudgement::rel((int)sym, idx, a)));
              }
              for (auto& t : ct) m.prem.push_back(defEventOf(t));
              m.concl = LJudgement::rel((int)sym, idx, ct);
              int ev = addEvent(std::move(m));
              if (rs.family)
                addFamFact((int)sym, cr[0], cr[1], q, ev);
              else
                addEdgeFact((int)sym, cr, ev);
            }
          }
          int i = rs.arity;
          while (i > 0 && pick[i - 1] == (int)entries.size() - 1) pick[--i] = 0;
          if (i == 0) break;
          pick[i - 1]++;
        }
      }
    }
  }

  void runAx() {
    auto roots = liveRoots();
    for (size_t ai = 0; ai < V->axioms.size(); ai++) {
      const SigmaRelation& A = V->axioms[ai];
      forEachMap(A.context, roots, [&](const std::vector<int>& tr) { applyAx((int)ai, tr); });
    }
  }

  void applyAx(int ai, const std::vector<int>& tr) {
    const SigmaRelation& A = V->axioms[ai];
    std::vector<STerm> tau;
    for (int r : tr) tau.push_back(anchorTerm(r));
    std::vector<STerm> sub;
    int maxd = 0;
    for (auto& g : A.args) {
      sub.push_back(substitute(g, tau));
      maxd = std::max(maxd, sub.back().depth());
    }
    if (maxd > depth) {
      depthLimited = true;
      return;
    }
    // anything new here? conclusion fact, missing subterm definitions, or
    // improvable inner-arity facts
    bool fresh = false;
    for (auto& s : sub)
      for (auto subPtr = std::vector<STerm>(); !fresh;) {
        collectSubterms(s, subPtr);
        for (auto& u : subPtr)
          if (!u.isVar() && !pooled(u)) fresh = true;
        break;
      }
    if (!fresh) {
      std::vector<int> cr;
      bool all = true;
      for (auto& s : sub) {
        auto r = rootOfTerm(s);
        if (!r) {
          all = false;
          break;
        }
        cr.push_back(*r);
      }
      if (all) {
        if (A.idx) {
          auto it = fam.find(FamKey{A.sym, cr[0], cr[1]});
          fresh = it == fam.end() || *A.idx < it->second.v;
        } else {
          fresh = !edgeEv.count(DEdge{A.sym, cr});
        }
        if (!fresh) {
          // inner-arity facts may still be missing for pooled subterms
          fresh = !innerFactsPresent(A, tau);
        }
      } else {
        fresh = true;
      }
    }
    if (!fresh) return;

    std::vector<int> prem = axPremises(A, tau);

    // materialize operation subterms bottom-up, deriving their inner-arity
    // facts (I-Ar) and definedness (E-Ar)
    for (size_t gi = 0; gi < A.args.size(); gi++) {
      std::function<void(const STerm&, std::vector<int>)> walk = [&](const STerm& g,
                                                                     std::vector<int> path) {
        if (g.isVar()) return;
        for (size_t j = 0; j < g.args.size(); j++) {
          auto p2 = path;
          p2.push_back((int)j);
          walk(g.args[j], p2);
        }
        const Structure& ar = V->ops[g.op].arity;
        auto emitIAr = [&](int sym, std::optional<Rat> idx, const std::vector<int>& k) {
          std::vector<STerm> a;
          for (int kj : k) a.push_back(substitute(g.args[kj], tau));
          std::vector<int> rts;
          for (auto& t : a) {
            auto r = rootOfTerm(t);
            if (!r) throw std::logic_error("inner subterm not defined bottom-up");
            rts.push_back(*r);
          }
          bool want;
          if (idx) {
            auto it = fam.find(FamKey{sym, rts[0], rts[1]});
            want = it == fam.end() || *idx < it->second.v;
          } else {
            want = !edgeEv.count(DEdge{sym, rts});
          }
          if (!want) return;
          LProofNode nI;
          nI.rule = LProofNode::IAr;
          nI.axiom = ai;
          nI.op = g.op;
          nI.tau = tau;
          nI.subArg = (int)gi;
          nI.subPath = path;
          nI.aritySym = sym;
          nI.arityIdx = idx;
          nI.arityPts = k;
          nI.prem = prem;
          nI.concl = LJudgement::rel(sym, idx, a);
          int ev = addEvent(std::move(nI));
          if (idx)
            addFamFact(sym, rts[0], rts[1], *idx, ev);
          else
            addEdgeFact(sym, rts, ev);
        };
        for (auto& e : ar.edges) emitIAr(e.sym, std::nullopt, e.pts);
        for (auto& [k, fv] : ar.fam) {
          auto [sym, p, q] = k;
          emitIAr(sym, fv.v, {p, q});
        }
        STerm s = substitute(g, tau);
        if (!pooled(s)) {
          LProofNode e;
          e.rule = LProofNode::EAr;
          e.op = g.op;
          e.concl = LJudgement::def(s);
          for (auto& ed : ar.edges) {
            std::vector<STerm> a;
            for (int p : ed.pts) a.push_back(s.args[p]);
            e.prem.push_back(eventFor(LJudgement::rel(ed.sym, std::nullopt, a)));
          }
          for (auto& [k, fv] : ar.fam) {
            auto [sym, p, q] = k;
            e.prem.push_back(eventFor(LJudgement::rel(sym, fv.v, {s.args[p], s.args[q]})));
          }
          for (auto& a : s.args) e.prem.push_back(defEventOf(a));
          int tid = intern(s);
          int ev = addEvent(std::move(e));
          defineOpTerm(tid, ev);
        }
      };
      walk(A.args[gi], {});
    }

    std::vector<int> cr;
    for (auto& s : sub) cr.push_back(*rootOfTerm(s));
    bool want;
    if (A.idx) {
      auto it = fam.find(FamKey{A.sym, cr[0], cr[1]});
      want = it == fam.end() || *A.idx < it->second.v;
    } else {
      want = !edgeEv.count(DEdge{A.sym, cr});
    }
    if (want) {
      LProofNode nx;
      nx.rule = LProofNode::Ax;
      nx.axiom = ai;
      nx.tau = tau;
      nx.prem = prem;
      nx.concl = LJudgement::rel(A.sym, A.idx, sub);
      int ev = addEvent(std::move(nx));
      if (A.idx)
        addFamFact(A.sym, cr[0], cr[1], *A.idx, ev);
      else
        addEdgeFact(A.sym, cr, ev);
    }
  }

  std::vector<int> axPremises(const SigmaRelation& A, const std::vector<STerm>& tau) {
    std::vector<int> prem;
    for (auto& e : A.context.edges) {
      std::vector<STerm> a;
      for (int p : e.pts) a.push_back(tau[p]);
      prem.push_back(eventFor(LJudgement::rel(e.sym, std::nullopt, a)));
    }
    for (auto& [k, fv] : A.context.fam) {
      auto [sym, p, q] = k;
      prem.push_back(eventFor(LJudgement::rel(sym, fv.v, {tau[p], tau[q]})));
    }
    for (auto& t : tau) prem.push_back(defEventOf(t));
    return prem;
  }

  bool innerFactsPresent(const SigmaRelation& A, const std::vector<STerm>& tau) {
    for (auto& g0 : A.args) {
      std::vector<STerm> subs;
      collectSubterms(g0, subs);
      for (auto& g : subs) {
        if (g.isVar()) continue;
        const Structure& ar = V->ops[g.op].arity;
        auto check = [&](int sym, std::optional<Rat> idx, const std::vector<int>& k) {
          std::vector<int> rts;
          for (int kj : k) {
            auto r = rootOfTerm(substitute(g.args[kj], tau));
            if (!r) return false;
            rts.push_back(*r);
          }
          if (idx) {
            auto it = fam.find(FamKey{sym, rts[0], rts[1]});
            return it != fam.end() && it->second.v <= *idx;
          }
          return edgeEv.count(DEdge{sym, rts}) > 0;
        };
        for (auto& e : ar.edges)
          if (!check(e.sym, std::nullopt, e.pts)) return false;
        for (auto& [k, fv] : ar.fam) {
          auto [sym, p, q] = k;
          if (!check(sym, fv.v, {p, q})) return false;
        }
      }
    }
    return true;
  }

  // ---- setup and saturation ----------------------------------------------------

  void validateInputs() {
    for (auto& op : V->ops)
      for (auto& [k, fv] : op.arity.fam)
        if (!fv.attained)
          throw std::invalid_argument("operation arities must carry attained family values");
    for (auto& A : V->axioms)
      for (auto& [k, fv] : A.context.fam)
        if (!fv.attained)
          throw std::invalid_argument("axiom contexts must carry attained family values");
    bool nonatt = false;
    for (auto& [k, fv] : ctx.fam)
      if (!fv.attained) nonatt = true;
    if (nonatt && !th->hasLimitRule(LimitRule::MetArch))
      throw std::invalid_argument("non-attained context entry requires the infimum limit rule");
  }

  void buildRecipes() {
    for (auto& w : th->eqWitness)
      if (w.sym == kEqSym) mergeable = false;
    closureAx.assign(th->symbols.size(), -1);
    for (size_t i = 0; i < th->axioms.size(); i++)
      if (th->axioms[i].generated && th->axioms[i].conclusion.sym >= 0 &&
          closureAx[th->axioms[i].conclusion.sym] < 0)
        closureAx[th->axioms[i].conclusion.sym] = (int)i;
    if (!mergeable) return;
    {
      ChainState st;
      diagSteps = hornChain(*th, 1, st);
      for (auto& w : th->eqWitness) {
        bool ok;
        if (!w.idx) {
          ok = st.edges.count(DEdge{w.sym, {0, 0}}) > 0;
        } else {
          auto it = st.fam.find(FamKey{w.sym, 0, 0});
          ok = it != st.fam.end() && it->second <= *w.idx;
        }
        if (!ok) mergeable = false;
      }
    }
    if (!mergeable) return;
    {
      ChainState st;
      for (auto& w : th->eqWitness) {
        int p0 = w.a, p1 = w.b;
        if (!w.idx)
          st.edges.insert(DEdge{w.sym, {p0, p1}});
        else {
          FamKey k{w.sym, p0, p1};
          auto it = st.fam.find(k);
          if (it == st.fam.end() || *w.idx < it->second) st.fam[k] = *w.idx;
        }
      }
      symSteps = hornChain(*th, 2, st);
      for (auto& w : th->eqWitness) {
        int p0 = w.a == 0 ? 1 : 0, p1 = w.b == 0 ? 1 : 0;
        bool ok;
        if (!w.idx) {
          ok = st.edges.count(DEdge{w.sym, {p0, p1}}) > 0;
        } else {
          auto it = st.fam.find(FamKey{w.sym, p0, p1});
          ok = it != st.fam.end() && it->second <= *w.idx;
        }
        if (!ok) mergeable = false;
      }
    }
  }

  void seed() {
    for (int i = 0; i < (int)ctx.points.size(); i++) {
      STerm v = STerm::mkVar(i);
      int tid = intern(v);
      LProofNode n;
      n.rule = LProofNode::Var;
      n.concl = LJudgement::def(v);
      tDef[tid] = addEvent(std::move(n));
      newClass(tid);
    }
    for (auto& e : ctx.edges) {
      LProofNode n;
      n.rule = LProofNode::Ctx;
      std::vector<STerm> a;
      std::vector<int> roots;
      for (int p : e.pts) {
        a.push_back(STerm::mkVar(p));
        roots.push_back(find(tCls[termIdOf.at(a.back())]));
      }
      n.concl = LJudgement::rel(e.sym, std::nullopt, a);
      addEdgeFact(e.sym, roots, addEvent(std::move(n)));
    }
    for (auto& [k, fv] : ctx.fam) {
      auto [sym, p, q] = k;
      LProofNode n;
      n.rule = fv.attained ? LProofNode::Ctx : LProofNode::Lim;
      n.concl = LJudgement::rel(sym, fv.v, {STerm::mkVar(p), STerm::mkVar(q)});
      int c1 = find(tCls[termIdOf.at(STerm::mkVar(p))]);
      int c2 = find(tCls[termIdOf.at(STerm::mkVar(q))]);
      addFamFact(sym, c1, c2, fv.v, addEvent(std::move(n)));
    }
  }

  void saturateAll() {
    try {
      seed();
      processMerges();
      while (true) {
        changed = false;
        runRelAx();
        processMerges();
        runEAr();
        processMerges();
        // axiom instances before the quadratic Mor pass, so that under a
        // fuel bound the characteristic facts of the variety land first
        runAx();
        processMerges();
        runMor();
        processMerges();
        if (!changed) break;
      }
    } catch (FuelOut&) {
      fuelEx = true;
    }
  }

  // ---- extraction ------------------------------------------------------------

  std::optional<LProof> prove(const LJudgement& goal) {
    // extraction may mint a few bridging events (weakenings, definedness of
    // goal terms); it must not be starved by a saturation fuel bound that was
    // already spent
    fuel = std::max(fuel, (long long)events.size() + 100000);
    try {
      int rootEv;
      if (goal.kind == LJudgement::Def) {
        auto c = ensureDefined(goal.terms[0]);
        if (!c) return std::nullopt;
        rootEv = tDef[termIdOf.at(goal.terms[0])];
      } else {
        for (auto& t : goal.terms)
          if (!ensureDefined(t)) return std::nullopt;
        if (!holdsRel(goal)) return std::nullopt;
        rootEv = eventFor(goal);
      }
      LProof p;
      std::map<int, int> remap;
      std::function<int(int)> emit = [&](int ev) -> int {
        auto it = remap.find(ev);
        if (it != remap.end()) return it->second;
        LProofNode n = events[ev];
        std::vector<int> np;
        for (int q : n.prem) np.push_back(emit(q));
        n.prem = np;
        p.nodes.push_back(std::move(n));
        int id = (int)p.nodes.size() - 1;
        remap[ev] = id;
        return id;
      };
      emit(rootEv);
      return p;
    } catch (FuelOut&) {
      fuelEx = true;
      return std::nullopt;
    }
  }

  bool holdsRel(const LJudgement& j) {
    std::vector<int> roots;
    for (auto& t : j.terms) {
      auto r = rootOfTerm(t);
      if (!r) return false;
      roots.push_back(*r);
    }
    if (!j.idx) {
      if (edgeEv.count(DEdge{j.sym, roots})) return true;
      if (roots.size() == 2 && roots[0] == roots[1] && mergeable)
        for (auto& w : th->eqWitness)
          if (w.sym == j.sym && !w.idx) return true;
      return false;
    }
    auto it = fam.find(FamKey{j.sym, roots[0], roots[1]});
    if (it != fam.end() && it->second.v <= *j.idx) return true;
    if (roots[0] == roots[1] && mergeable)
      for (auto& w : th->eqWitness)
        if (w.sym == j.sym && w.idx && *w.idx <= *j.idx) return true;
    return false;
  }
};

// ===========================================================================

Bank::Bank(std::shared_ptr<const Variety> variety, Structure context, int depth, long long fuel)
    : variety_(std::move(variety)), ctx_(std::move(context)), depth_(depth) {
  impl = std::make_shared<Impl>();
  impl->V = variety_;
  impl->th = variety_->theory.get();
  impl->ctx = ctx_;
  impl->depth = depth;
  impl->fuel = fuel;
  impl->validateInputs();
  impl->buildRecipes();
  impl->saturateAll();
  fuelExhausted_ = impl->fuelEx;
  complete_ = !impl->depthLimited && !impl->fuelEx;
}

std::optional<int> Bank::classOf(const STerm& t) const { return impl->rootOfTerm(t); }

int Bank::classCount() const { return (int)impl->liveRoots().size(); }

bool Bank::holds(const LJudgement& j) const {
  if (j.kind == LJudgement::Def) return impl->rootOfTerm(j.terms[0]).has_value();
  return impl->holdsRel(j);
}

const STerm& Bank::repTerm(int cls) const {
  int r = impl->find(cls);
  int best = impl->mem[r][0];
  for (int m : impl->mem[r])
    if (termLess(impl->terms[m], impl->terms[best])) best = m;
  return impl->terms[best];
}

std::vector<int> Bank::liveClasses() const {
  auto roots = impl->liveRoots();
  std::sort(roots.begin(), roots.end(), [&](int a, int b) {
    return termLess(repTerm(a), repTerm(b));
  });
  return roots;
}

std::set<DEdge> Bank::classEdges() const {
  std::set<DEdge> out;
  for (auto& [k, _] : impl->edgeEv) out.insert(k);
  return out;
}

std::map<FamKey, FamVal> Bank::classFam() const { return impl->fam; }

std::optional<LProof> Bank::prove(const LJudgement& goal) {
  auto p = impl->prove(goal);
  fuelExhausted_ = impl->fuelEx;
  if (impl->fuelEx) complete_ = false;
  return p;
}

Bank saturateJudgements(std::shared_ptr<const Variety> V, const Structure& X, int depth,
                        long long fuel) {
  return Bank(std::move(V), X, depth, fuel);
}

DeriveResult derive(std::shared_ptr<const Variety> V, const Structure& X, const LJudgement& goal,
                    int depth, long long fuel) {
  Bank b(std::move(V), X, depth, fuel);
  DeriveResult r;
  if (b.holds(goal)) {
    r.proof = b.prove(goal);
    if (r.proof) {
      r.status = DeriveStatus::Derived;
      return r;
    }
  }
  r.status = b.complete() ? DeriveStatus::NotDerivable : DeriveStatus::DepthExhausted;
  return r;
}

// ===========================================================================
// Independent proof checking.

namespace {

struct CheckFail {
  std::string msg;
};

void need(bool c, const std::string& m) {
  if (!c) throw CheckFail{m};
}

const LJudgement& premJ(const LProof& p, const LProofNode& n, size_t i) {
  need(i < n.prem.size(), "missing premise");
  return p.nodes[n.prem[i]].concl;
}

void checkNode(const Variety& V, const Structure& X, const LProof& p, int idx) {
  const HornTheory& th = *V.theory;
  const LProofNode& n = p.nodes[idx];
  for (int q : n.prem) need(q >= 0 && q < idx, "premise must be an earlier node");
  auto isVarTerm = [&](const STerm& t) { return t.isVar() && t.var < (int)X.points.size(); };
  auto symOk = [&](int sym, const std::optional<Rat>& idxv, size_t nargs) {
    need(sym >= 0 && sym < (int)th.symbols.size(), "unknown relation symbol");
    need(th.symbols[sym].family == idxv.has_value(), "index presence mismatch");
    need((size_t)th.symbols[sym].arity == nargs, "relation arity mismatch");
  };
  switch (n.rule) {
    case LProofNode::Var: {
      need(n.concl.kind == LJudgement::Def && n.prem.empty(), "Var shape");
      need(isVarTerm(n.concl.terms[0]), "Var cites a non-variable");
      break;
    }
    case LProofNode::Ctx: {
      need(n.concl.kind == LJudgement::Rel && n.prem.empty(), "Ctx shape");
      symOk(n.concl.sym, n.concl.idx, n.concl.terms.size());
      std::vector<int> pts;
      for (auto& t : n.concl.terms) {
        need(isVarTerm(t), "Ctx over non-variables");
        pts.push_back(t.var);
      }
      if (n.concl.idx)
        need(X.holdsFam(n.concl.sym, pts[0], pts[1], *n.concl.idx), "Ctx cites a non-edge");
      else
        need(X.hasEdge(n.concl.sym, pts), "Ctx cites a non-edge");
      break;
    }
    case LProofNode::Lim: {
      need(n.concl.kind == LJudgement::Rel && n.prem.empty() && n.concl.idx.has_value(),
           "Lim shape");
      need(th.hasLimitRule(LimitRule::MetArch), "Lim without the infimum limit rule");
      std::vector<int> pts;
      for (auto& t : n.concl.terms) {
        need(isVarTerm(t), "Lim over non-variables");
        pts.push_back(t.var);
      }
      const FamVal* v = X.famVal(n.concl.sym, pts[0], pts[1]);
      need(v && !v->attained && v->v == *n.concl.idx, "Lim index is not the context infimum");
      break;
    }
    case LProofNode::Mor: {
      need(n.concl.kind == LJudgement::Rel, "Mor concludes a relation");
      symOk(n.concl.sym, n.concl.idx, n.concl.terms.size());
      need(n.op >= 0 && n.op < (int)V.ops.size(), "Mor operation");
      int np = V.ops[n.op].arity.size();
      int k = (int)n.concl.terms.size();
      for (auto& t : n.concl.terms)
        need(!t.isVar() && t.op == n.op && (int)t.args.size() == np, "Mor argument shape");
      need((int)n.prem.size() == np + k, "Mor premise count");
      for (int j = 0; j < np; j++) {
        std::vector<STerm> a;
        for (auto& t : n.concl.terms) a.push_back(t.args[j]);
        need(premJ(p, n, j) == LJudgement::rel(n.concl.sym, n.concl.idx, a),
             "Mor relational premise mismatch");
      }
      for (int i = 0; i < k; i++)
        need(premJ(p, n, np + i) == LJudgement::def(n.concl.terms[i]),
             "Mor definedness premise mismatch");
      break;
    }
    case LProofNode::EAr: {
      need(n.concl.kind == LJudgement::Def, "EAr concludes definedness");
      const STerm& t = n.concl.terms[0];
      need(!t.isVar() && t.op == n.op && n.op >= 0 && n.op < (int)V.ops.size(), "EAr term shape");
      const Structure& ar = V.ops[n.op].arity;
      need((int)t.args.size() == ar.size(), "EAr argument count");
      size_t pi = 0;
      for (auto& e : ar.edges) {
        std::vector<STerm> a;
        for (int q : e.pts) a.push_back(t.args[q]);
        need(premJ(p, n, pi++) == LJudgement::rel(e.sym, std::nullopt, a),
             "EAr arity-edge premise mismatch");
      }
      for (auto& [k, fv] : ar.fam) {
        auto [sym, a, b] = k;
        need(fv.attained, "EAr over a non-attained arity entry");
        need(premJ(p, n, pi++) == LJudgement::rel(sym, fv.v, {t.args[a], t.args[b]}),
             "EAr arity-family premise mismatch");
      }
      for (auto& a : t.args)
        need(premJ(p, n, pi++) == LJudgement::def(a), "EAr definedness premise mismatch");
      need(pi == n.prem.size(), "EAr premise count");
      break;
    }
    case LProofNode::RelAx: {
      need(n.concl.kind == LJudgement::Rel, "RelAx concludes a relation");
      need(n.axiom >= 0 && n.axiom < (int)th.axioms.size(), "RelAx axiom reference");
      const HornAxiom& ax = th.axioms[n.axiom];
      need(ax.conclusion.sym != kEqSym, "RelAx on an equality axiom");
      need((int)n.tau.size() == ax.varCount, "RelAx substitution size");
      for (auto& sc : ax.conds) need(sc.eval(n.ratBind), "RelAx side condition fails");
      size_t pi = 0;
      for (auto& pr : ax.premises) {
        need(pr.sym != kEqSym, "RelAx axiom has an equality premise");
        std::vector<STerm> a;
        for (int x : pr.args) a.push_back(n.tau[x]);
        std::optional<Rat> pidx;
        if (pr.idx) pidx = pr.idx->eval(n.ratBind);
        need(premJ(p, n, pi++) == LJudgement::rel(pr.sym, pidx, a),
             "RelAx instantiated premise mismatch");
      }
      for (int x : ax.conclusion.args)
        need(premJ(p, n, pi++) == LJudgement::def(n.tau[x]),
             "RelAx definedness premise mismatch");
      need(pi == n.prem.size(), "RelAx premise count");
      std::vector<STerm> ca;
      for (int x : ax.conclusion.args) ca.push_back(n.tau[x]);
      std::optional<Rat> cidx;
      if (ax.conclusion.idx) cidx = ax.conclusion.idx->eval(n.ratBind);
      need(n.concl == LJudgement::rel(ax.conclusion.sym, cidx, ca), "RelAx conclusion mismatch");
      break;
    }
    case LProofNode::Ax:
    case LProofNode::IAr: {
      need(n.concl.kind == LJudgement::Rel, "rule concludes a relation");
      need(n.axiom >= 0 && n.axiom < (int)V.axioms.size(), "axiom reference");
      const SigmaRelation& A = V.axioms[n.axiom];
      need((int)n.tau.size() == A.context.size(), "substitution size");
      size_t pi = 0;
      for (auto& e : A.context.edges) {
        std::vector<STerm> a;
        for (int q : e.pts) a.push_back(n.tau[q]);
        need(premJ(p, n, pi++) == LJudgement::rel(e.sym, std::nullopt, a),
             "axiom-context premise mismatch");
      }
      for (auto& [k, fv] : A.context.fam) {
        auto [sym, a, b] = k;
        need(fv.attained, "non-attained axiom-context entry");
        need(premJ(p, n, pi++) == LJudgement::rel(sym, fv.v, {n.tau[a], n.tau[b]}),
             "axiom-context family premise mismatch");
      }
      for (auto& t : n.tau)
        need(premJ(p, n, pi++) == LJudgement::def(t), "substitution definedness mismatch");
      need(pi == n.prem.size(), "premise count");
      if (n.rule == LProofNode::Ax) {
        std::vector<STerm> sub;
        for (auto& g : A.args) sub.push_back(substitute(g, n.tau));
        need(n.concl == LJudgement::rel(A.sym, A.idx, sub), "Ax conclusion mismatch");
      } else {
        need(n.subArg >= 0 && n.subArg < (int)A.args.size(), "IAr subterm argument");
        const STerm* s = &A.args[n.subArg];
        for (int step : n.subPath) {
          need(!s->isVar() && step >= 0 && step < (int)s->args.size(), "IAr subterm path");
          s = &s->args[step];
        }
        need(!s->isVar() && s->op == n.op && n.op >= 0 && n.op < (int)V.ops.size(),
             "IAr subterm is not the cited operation");
        const Structure& ar = V.ops[n.op].arity;
        symOk(n.aritySym, n.arityIdx, n.arityPts.size());
        for (int q : n.arityPts) need(q >= 0 && q < ar.size(), "IAr arity edge points");
        if (n.arityIdx)
          need(ar.holdsFam(n.aritySym, n.arityPts[0], n.arityPts[1], *n.arityIdx),
               "IAr arity edge does not hold");
        else
          need(ar.hasEdge(n.aritySym, n.arityPts), "IAr arity edge does not hold");
        std::vector<STerm> a;
        for (int q : n.arityPts) a.push_back(substitute(s->args[q], n.tau));
        need(n.concl == LJudgement::rel(n.aritySym, n.arityIdx, a), "IAr conclusion mismatch");
      }
      break;
    }
  }
  if (n.concl.kind == LJudgement::Rel && n.rule != LProofNode::RelAx)
    symOk(n.concl.sym, n.concl.idx, n.concl.terms.size());
}

}  // namespace

bool checkProof(const Variety& V, const Structure& X, const LProof& p, std::string* why) {
  if (p.nodes.empty()) {
    if (why) *why = "empty proof";
    return false;
  }
  try {
    for (int i = 0; i < (int)p.nodes.size(); i++) checkNode(V, X, p, i);
  } catch (CheckFail& f) {
    if (why) *why = f.msg;
    return false;
  } catch (std::exception& e) {
    if (why) *why = e.what();
    return false;
  }
  return true;
}

// ===========================================================================
// Admissible rules.

namespace {

// Copies the subgraph reachable from `root` of `src` into `dst`.
int graft(std::vector<LProofNode>& dst, const LProof& src, int root,
          std::map<int, int>& memo) {
  auto it = memo.find(root);
  if (it != memo.end()) return it->second;
  LProofNode n = src.nodes[root];
  std::vector<int> np;
  for (int q : n.prem) np.push_back(graft(dst, src, q, memo));
  n.prem = np;
  dst.push_back(std::move(n));
  memo[root] = (int)dst.size() - 1;
  return memo[root];
}

}  // namespace

std::optional<LProof> admissibleArity(const Variety& V, const Structure& X, const LProof& p,
                                      int sym, std::optional<Rat> idx, const std::vector<int>& f,
                                      std::string* why) {
  const LProofNode& root = p.nodes.back();
  if (root.rule != LProofNode::EAr || root.concl.kind != LJudgement::Def) {
    if (why) *why = "input proof does not conclude definedness of an operation term";
    return std::nullopt;
  }
  const STerm& t = root.concl.terms[0];
  const Structure& ar = V.ops[root.op].arity;
  // locate the edge among the stored arity items and extract the premise
  size_t pi = 0;
  for (auto& e : ar.edges) {
    if (e.sym == sym && !idx && e.pts == f) {
      LProof out;
      std::map<int, int> memo;
      graft(out.nodes, p, root.prem[pi], memo);
      return out;
    }
    pi++;
  }
  for (auto& [k, fv] : ar.fam) {
    auto [s2, a, b] = k;
    if (idx && s2 == sym && std::vector<int>{a, b} == f && fv.v <= *idx) {
      LProof out;
      std::map<int, int> memo;
      int base = graft(out.nodes, p, root.prem[pi], memo);
      if (fv.v != *idx) {
        // weaken the stored value to the requested index
        int ai = V.theory->upAxiomFor(sym);
        if (ai < 0) {
          if (why) *why = "family index exceeds the stored arity value and no weakening axiom";
          return std::nullopt;
        }
        const HornAxiom& ax = V.theory->axioms[ai];
        LProofNode n;
        n.rule = LProofNode::RelAx;
        n.axiom = ai;
        n.tau.resize(ax.varCount, t.args[a]);
        n.tau[ax.premises[0].args[0]] = t.args[a];
        n.tau[ax.premises[0].args[1]] = t.args[b];
        n.ratBind[ax.premises[0].idx->vars[0]] = fv.v;
        Rat rest = *idx - fv.v - ax.conclusion.idx->c;
        bool first = true;
        for (auto& v : ax.conclusion.idx->vars) {
          if (v == ax.premises[0].idx->vars[0]) continue;
          n.ratBind[v] = first ? rest : Rat::zero();
          first = false;
        }
        n.prem.push_back(base);
        // definedness of the two argument terms, extracted from the root
        size_t defBase = ar.edges.size() + ar.fam.size();
        std::map<int, int> m2;
        for (int x : ax.conclusion.args) {
          int arg = x == ax.premises[0].args[0] ? a : b;
          n.prem.push_back(graft(out.nodes, p, root.prem[defBase + arg], memo));
          (void)m2;
        }
        n.concl = LJudgement::rel(sym, *idx, {t.args[a], t.args[b]});
        out.nodes.push_back(std::move(n));
      }
      return out;
    }
    pi++;
  }
  if (why) *why = "edge is not among the stored arity items";
  return std::nullopt;
}

std::optional<LProof> admissibleSubterm(const Variety& V, const Structure& X, const LProof& p,
                                        const STerm& u, std::string* why) {
  auto inSub = [](const STerm& t, const STerm& u) {
    std::vector<STerm> subs;
    collectSubterms(t, subs);
    for (auto& s : subs)
      if (s == u) return true;
    return false;
  };
  LProof out;
  // go: returns an index in `out` proving Def target, where `target` is a
  // subterm of the judgement proved by src node `idx`.
  std::function<std::optional<int>(int, const STerm&)> go =
      [&](int idx, const STerm& target) -> std::optional<int> {
    const LProofNode& n = p.nodes[idx];
    if (n.concl.kind == LJudgement::Def) {
      const STerm& t = n.concl.terms[0];
      if (t == target) {
        std::map<int, int> memo;
        return graft(out.nodes, p, idx, memo);
      }
      if (n.rule != LProofNode::Var) {
        const Structure& ar = V.ops[n.op].arity;
        size_t defBase = ar.edges.size() + ar.fam.size();
        for (size_t i = 0; i < t.args.size(); i++)
          if (inSub(t.args[i], target)) return go(n.prem[defBase + i], target);
      }
      return std::nullopt;
    }
    // relational judgement
    int k = -1;
    for (size_t i = 0; i < n.concl.terms.size(); i++)
      if (inSub(n.concl.terms[i], target)) k = (int)i;
    if (k < 0) return std::nullopt;
    switch (n.rule) {
      case LProofNode::Ctx:
      case LProofNode::Lim: {
        // terms are variables; target must be that variable
        LProofNode v;
        v.rule = LProofNode::Var;
        v.concl = LJudgement::def(target);
        out.nodes.push_back(std::move(v));
        return (int)out.nodes.size() - 1;
      }
      case LProofNode::Mor:
        return go(n.prem[V.ops[n.op].arity.size() + k], target);
      case LProofNode::RelAx: {
        const HornAxiom& ax = V.theory->axioms[n.axiom];
        return go(n.prem[ax.premises.size() + k], target);
      }
      case LProofNode::Ax:
      case LProofNode::IAr: {
        const SigmaRelation& A = V.axioms[n.axiom];
        // the axiom term whose tau-image is conclusion argument k
        int subArg;
        std::vector<int> basePath;
        const STerm* g;
        if (n.rule == LProofNode::Ax) {
          subArg = k;
          g = &A.args[k];
        } else {
          subArg = n.subArg;
          basePath = n.subPath;
          const STerm* s = &A.args[n.subArg];
          for (int st : n.subPath) s = &s->args[st];
          basePath.push_back(n.arityPts[k]);
          g = &s->args[n.arityPts[k]];
        }
        // find an axiom-subterm position whose image is the target
        std::function<std::optional<int>(const STerm&, std::vector<int>)> hunt =
            [&](const STerm& ax0, std::vector<int> path) -> std::optional<int> {
          STerm img = substitute(ax0, n.tau);
          if (img == target && !ax0.isVar()) {
            // rebuild Def target via E-Ar over I-Ar instances
            const Structure& ar = V.ops[ax0.op].arity;
            LProofNode e;
            e.rule = LProofNode::EAr;
            e.op = ax0.op;
            e.concl = LJudgement::def(target);
            auto iarNode = [&](int sym, std::optional<Rat> fidx, const std::vector<int>& pts) {
              LProofNode nI;
              nI.rule = LProofNode::IAr;
              nI.axiom = n.axiom;
              nI.op = ax0.op;
              nI.tau = n.tau;
              nI.subArg = subArg;
              nI.subPath = path;
              nI.aritySym = sym;
              nI.arityIdx = fidx;
              nI.arityPts = pts;
              std::map<int, int> memo;
              for (size_t q = 0; q < n.prem.size(); q++)
                nI.prem.push_back(graft(out.nodes, p, n.prem[q], memo));
              std::vector<STerm> a;
              for (int q : pts) a.push_back(substitute(ax0.args[q], n.tau));
              nI.concl = LJudgement::rel(sym, fidx, a);
              out.nodes.push_back(std::move(nI));
              return (int)out.nodes.size() - 1;
            };
            for (auto& ed : ar.edges) e.prem.push_back(iarNode(ed.sym, std::nullopt, ed.pts));
            for (auto& [fk, fv] : ar.fam) {
              auto [sym, a, b] = fk;
              e.prem.push_back(iarNode(sym, fv.v, {a, b}));
            }
            for (size_t j = 0; j < ax0.args.size(); j++) {
              auto d = go(idx, substitute(ax0.args[j], n.tau));
              if (!d) return std::nullopt;
              e.prem.push_back(*d);
            }
            out.nodes.push_back(std::move(e));
            return (int)out.nodes.size() - 1;
          }
          if (ax0.isVar()) {
            // target inside the image of a context point
            if (inSub(img, target)) {
              const SigmaRelation& A2 = V.axioms[n.axiom];
              size_t defBase = A2.context.edges.size() + A2.context.fam.size();
              return go(n.prem[defBase + ax0.var], target);
            }
            return std::nullopt;
          }
          for (size_t j = 0; j < ax0.args.size(); j++) {
            auto p2 = path;
            p2.push_back((int)j);
            if (auto r = hunt(ax0.args[j], p2)) return r;
          }
          // images of distinct axiom subterms can coincide; fall through
          return std::nullopt;
        };
        if (n.rule == LProofNode::IAr) {
          if (auto r = hunt(*g, basePath)) return r;
        } else {
          if (auto r = hunt(*g, {})) return r;
        }
        // target only occurs inside substitution images
        const SigmaRelation& A2 = V.axioms[n.axiom];
        size_t defBase = A2.context.edges.size() + A2.context.fam.size();
        for (size_t y = 0; y < n.tau.size(); y++)
          if (inSub(n.tau[y], target)) return go(n.prem[defBase + y], target);
        return std::nullopt;
      }
      default:
        return std::nullopt;
    }
  };
  bool found = false;
  for (auto& t : p.nodes.back().concl.terms)
    if (inSub(t, u)) found = true;
  if (!found) {
    if (why) *why = "not a subterm of the conclusion";
    return std::nullopt;
  }
  if (u.isVar()) {
    LProofNode v;
    v.rule = LProofNode::Var;
    v.concl = LJudgement::def(u);
    out.nodes.push_back(std::move(v));
    return out;
  }
  auto r = go((int)p.nodes.size() - 1, u);
  if (!r) {
    if (why) *why = "no definedness derivation recoverable for the subterm";
    return std::nullopt;
  }
  if (*r != (int)out.nodes.size() - 1) {
    std::map<int, int> memo;
    LProof tmp;
    tmp.nodes = out.nodes;
    out.nodes.clear();
    graft(out.nodes, tmp, *r, memo);
  }
  return out;
}

std::optional<LProof> admissibleSubstitute(const Variety& V, const Structure& X,
                                           const Structure& Y, const std::vector<STerm>& tau,
                                           const std::vector<LProof>& edgeProofs,
                                           const std::vector<LProof>& defProofs, const LProof& p,
                                           std::string* why) {
  size_t ne = Y.edges.size() + Y.fam.size();
  if (edgeProofs.size() != ne || defProofs.size() != Y.points.size()) {
    if (why) *why = "wrong number of admissibility premises";
    return std::nullopt;
  }
  // validate premise conclusions
  {
    size_t i = 0;
    for (auto& e : Y.edges) {
      std::vector<STerm> a;
      for (int q : e.pts) a.push_back(tau[q]);
      if (edgeProofs[i++].conclusion() != LJudgement::rel(e.sym, std::nullopt, a)) {
        if (why) *why = "edge premise proves the wrong judgement";
        return std::nullopt;
      }
    }
    for (auto& [k, fv] : Y.fam) {
      auto [sym, a, b] = k;
      if (edgeProofs[i++].conclusion() != LJudgement::rel(sym, fv.v, {tau[a], tau[b]})) {
        if (why) *why = "family premise proves the wrong judgement";
        return std::nullopt;
      }
    }
    for (size_t y = 0; y < Y.points.size(); y++)
      if (defProofs[y].conclusion() != LJudgement::def(tau[y])) {
        if (why) *why = "definedness premise proves the wrong judgement";
        return std::nullopt;
      }
  }
  LProof out;
  std::vector<int> given(ne, -1);
  std::vector<int> givenDef(Y.points.size(), -1);
  auto edgeAt = [&](size_t i) {
    if (given[i] < 0) {
      std::map<int, int> memo;
      given[i] = graft(out.nodes, edgeProofs[i], (int)edgeProofs[i].nodes.size() - 1, memo);
    }
    return given[i];
  };
  auto defAt = [&](size_t y) {
    if (givenDef[y] < 0) {
      std::map<int, int> memo;
      givenDef[y] = graft(out.nodes, defProofs[y], (int)defProofs[y].nodes.size() - 1, memo);
    }
    return givenDef[y];
  };
  auto subTerm = [&](const STerm& t) { return substitute(t, tau); };

  std::map<int, int> memo;
  std::function<std::optional<int>(int)> tr = [&](int idx) -> std::optional<int> {
    auto it = memo.find(idx);
    if (it != memo.end()) return it->second;
    const LProofNode& n = p.nodes[idx];
    std::optional<int> res;
    switch (n.rule) {
      case LProofNode::Var:
        res = defAt(n.concl.terms[0].var);
        break;
      case LProofNode::Ctx:
      case LProofNode::Lim: {
        // locate the stored item of Y; Lim and exact-value Ctx map to the
        // given premise, larger Ctx indices weaken it
        size_t i = 0;
        std::vector<int> pts;
        for (auto& t : n.concl.terms) pts.push_back(t.var);
        for (auto& e : Y.edges) {
          if (!n.concl.idx && e.sym == n.concl.sym && e.pts == pts) {
            res = edgeAt(i);
            break;
          }
          i++;
        }
        if (!res && n.concl.idx) {
          for (auto& [k, fv] : Y.fam) {
            auto [sym, a, b] = k;
            if (sym == n.concl.sym && a == pts[0] && b == pts[1]) {
              int base = edgeAt(i);
              if (fv.v == *n.concl.idx) {
                res = base;
              } else {
                int ai = V.theory->upAxiomFor(sym);
                if (ai < 0) break;
                const HornAxiom& ax = V.theory->axioms[ai];
                LProofNode w;
                w.rule = LProofNode::RelAx;
                w.axiom = ai;
                w.tau.resize(ax.varCount, subTerm(n.concl.terms[0]));
                w.tau[ax.premises[0].args[0]] = subTerm(n.concl.terms[0]);
                w.tau[ax.premises[0].args[1]] = subTerm(n.concl.terms[1]);
                w.ratBind[ax.premises[0].idx->vars[0]] = fv.v;
                Rat rest = *n.concl.idx - fv.v - ax.conclusion.idx->c;
                bool first = true;
                for (auto& v : ax.conclusion.idx->vars) {
                  if (v == ax.premises[0].idx->vars[0]) continue;
                  w.ratBind[v] = first ? rest : Rat::zero();
                  first = false;
                }
                if (first || rest < Rat::zero()) break;
                w.prem.push_back(base);
                for (int x : ax.conclusion.args)
                  w.prem.push_back(defAt(pts[x == ax.premises[0].args[0] ? 0 : 1]));
                w.concl = LJudgement::rel(sym, *n.concl.idx,
                                          {subTerm(n.concl.terms[0]), subTerm(n.concl.terms[1])});
                out.nodes.push_back(std::move(w));
                res = (int)out.nodes.size() - 1;
              }
              break;
            }
            i++;
          }
        }
        break;
      }
      default: {
        // structural rules: substitute the side data, transform premises
        LProofNode m = n;
        m.prem.clear();
        for (int q : n.prem) {
          auto r = tr(q);
          if (!r) return std::nullopt;
          m.prem.push_back(*r);
        }
        for (auto& t : m.tau) t = subTerm(t);
        for (auto& t : m.concl.terms) t = subTerm(t);
        out.nodes.push_back(std::move(m));
        res = (int)out.nodes.size() - 1;
        break;
      }
    }
    if (!res) return std::nullopt;
    memo[idx] = *res;
    return res;
  };
  auto r = tr((int)p.nodes.size() - 1);
  if (!r) {
    if (why) *why = "transformation failed (missing weakening or premise)";
    return std::nullopt;
  }
  if (*r != (int)out.nodes.size() - 1) {
    LProofNode m = out.nodes[*r];
    out.nodes.push_back(std::move(m));
  }
  return out;
}

// ===========================================================================

std::string judgementStr(const LJudgement& j, const Structure& ctx,
                         const std::vector<OpSymbol>& ops, const HornTheory& th) {
  std::ostringstream o;
  if (j.kind == LJudgement::Def) {
    o << "def " << termStr(j.terms[0], ctx, ops);
    return o.str();
  }
  o << th.symbols[j.sym].name;
  if (j.idx) o << "[" << j.idx->str() << "]";
  o << "(";
  for (size_t i = 0; i < j.terms.size(); i++)
    o << (i ? ", " : "") << termStr(j.terms[i], ctx, ops);
  o << ")";
  return o.str();
}

std::string printProof(const Variety& V, const Structure& ctx, const LProof& p) {
  static const char* names[] = {"Var", "Ctx", "Lim", "Mor", "E-Ar", "I-Ar", "RelAx", "Ax"};
  std::ostringstream o;
  for (size_t i = 0; i < p.nodes.size(); i++) {
    const LProofNode& n = p.nodes[i];
    o << i << ": (" << names[n.rule] << ") " << judgementStr(n.concl, ctx, V.ops, *V.theory);
    if (n.rule == LProofNode::RelAx) o << "  {" << V.theory->axioms[n.axiom].name << "}";
    if (n.rule == LProofNode::Ax || n.rule == LProofNode::IAr)
      o << "  {" << V.axioms[n.axiom].name << "}";
    if (!n.prem.empty()) {
      o << "  <-";
      for (int q : n.prem) o << " " << q;
    }
    o << "\n";
  }
  return o.str();
}

}  // namespace relat
