#include "theory.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace relat {

Rat parseRat(const std::string& s) {
  auto bad = [&] { throw std::invalid_argument("bad rational: '" + s + "'"); };
  if (s.empty()) bad();
  size_t slash = s.find('/');
  auto parseInt = [&](const std::string& t) -> long long {
    if (t.empty()) bad();
    size_t i = t[0] == '-' ? 1 : 0;
    if (i == t.size()) bad();
    for (; i < t.size(); i++)
      if (!isdigit((unsigned char)t[i])) bad();
    return std::stoll(t);
  };
  if (slash == std::string::npos) return Rat(parseInt(s));
  long long n = parseInt(s.substr(0, slash));
  long long d = parseInt(s.substr(slash + 1));
  if (d == 0) bad();
  return Rat(n, d);
}

Rat IndexExpr::eval(const std::map<std::string, Rat>& bind) const {
  Rat r = c;
  for (auto& v : vars) {
    auto it = bind.find(v);
    if (it == bind.end()) throw std::logic_error("unbound index metavariable " + v);
    r = cappedAdd(r, it->second);
  }
  return r;
}

std::string IndexExpr::str() const {
  std::string out;
  for (auto& v : vars) {
    if (!out.empty()) out += "+";
    out += v;
  }
  if (vars.empty() || !c.isZero()) {
    if (!out.empty()) out += "+";
    out += c.str();
  }
  return out;
}

bool SideCond::eval(const std::map<std::string, Rat>& bind) const {
  Rat a = lhs.eval(bind), b = rhs.eval(bind);
  switch (op) {
    case LT: return a < b;
    case LE: return a <= b;
    case GT: return a > b;
    case GE: return a >= b;
  }
  return false;
}

void Lattice::validate() const {
  size_t n = elems.size();
  if (n == 0) throw std::invalid_argument("empty lattice");
  if (leq.size() != n || meet.size() != n) throw std::invalid_argument("lattice table sizes");
  for (size_t i = 0; i < n; i++) {
    if (leq[i].size() != n || meet[i].size() != n) throw std::invalid_argument("lattice row sizes");
    if (!leq[i][i]) throw std::invalid_argument("lattice order not reflexive");
  }
  for (size_t i = 0; i < n; i++)
    for (size_t j = 0; j < n; j++) {
      int m = meet[i][j];
      if (m < 0 || (size_t)m >= n) throw std::invalid_argument("lattice meet out of range");
      if (!leq[m][i] || !leq[m][j]) throw std::invalid_argument("meet not a lower bound");
      for (size_t k = 0; k < n; k++)
        if (leq[k][i] && leq[k][j] && !leq[k][m])
          throw std::invalid_argument("meet not the greatest lower bound");
      if (leq[i][j] && leq[j][i] && i != j) throw std::invalid_argument("order not antisymmetric");
    }
  if (bottom < 0 || (size_t)bottom >= n) throw std::invalid_argument("lattice bottom missing");
  for (size_t i = 0; i < n; i++)
    if (!leq[bottom][i]) throw std::invalid_argument("bottom not least");
}

int Lattice::index(const std::string& e) const {
  for (size_t i = 0; i < elems.size(); i++)
    if (elems[i] == e) return (int)i;
  throw std::invalid_argument("unknown lattice element " + e);
}

int HornTheory::symIndex(const std::string& n) const {
  for (size_t i = 0; i < symbols.size(); i++)
    if (symbols[i].name == n) return (int)i;
  return -1;
}

bool HornTheory::hasLimitRule(LimitRule::Kind k) const {
  for (auto& r : limitRules)
    if (r.kind == k) return true;
  return false;
}

void HornTheory::validate() const {
  for (auto& s : symbols) {
    if (s.arity < 1) throw std::invalid_argument("relation " + s.name + " has arity < 1");
    if (s.family && s.arity != 2)
      throw std::invalid_argument("indexed family " + s.name + " must be binary");
  }
  auto checkAtom = [&](const Atom& a, const HornAxiom& ax, bool premise) {
    if (a.sym == kEqSym) {
      if (a.idx) throw std::invalid_argument("equality atom with index in axiom " + ax.name);
      if (a.args.size() != 2) throw std::invalid_argument("equality atom arity in axiom " + ax.name);
    } else {
      if (a.sym < 0 || (size_t)a.sym >= symbols.size())
        throw std::invalid_argument("unknown symbol in axiom " + ax.name);
      const RelSymbol& rs = symbols[a.sym];
      if ((int)a.args.size() != rs.arity)
        throw std::invalid_argument("arity mismatch in axiom " + ax.name);
      if (rs.family != a.idx.has_value())
        throw std::invalid_argument("index presence mismatch in axiom " + ax.name);
      if (premise && a.idx && !a.idx->vars.empty() &&
          (a.idx->vars.size() != 1 || !a.idx->c.isZero()))
        throw std::invalid_argument("premise index in axiom " + ax.name +
                                    " must be a constant or a bare metavariable");
      if (a.idx && a.idx->vars.empty() && (a.idx->c < Rat::zero() || a.idx->c > Rat::one()))
        throw std::invalid_argument("index constant out of [0,1] in axiom " + ax.name);
    }
    for (int v : a.args)
      if (v < 0 || v >= ax.varCount)
        throw std::invalid_argument("variable out of range in axiom " + ax.name);
  };
  for (auto& ax : axioms) {
    std::set<std::string> bound;
    for (auto& p : ax.premises) {
      checkAtom(p, ax, true);
      if (p.idx)
        for (auto& v : p.idx->vars) bound.insert(v);
    }
    checkAtom(ax.conclusion, ax, false);
    for (auto& sc : ax.conds)
      for (auto* e : {&sc.lhs, &sc.rhs})
        for (auto& v : e->vars)
          if (!bound.count(v))
            throw std::invalid_argument("side condition metavariable " + v + " unbound in axiom " +
                                        ax.name);
  }
  for (auto& w : eqWitness) {
    if (w.a < 0 || w.a > 1 || w.b < 0 || w.b > 1)
      throw std::invalid_argument("equality witness variables must be 0/1");
    if (w.sym != kEqSym) {
      if (w.sym < 0 || (size_t)w.sym >= symbols.size())
        throw std::invalid_argument("unknown symbol in equality witness");
      if (symbols[w.sym].arity != 2)
        throw std::invalid_argument("equality witness atoms must be binary");
      if (symbols[w.sym].family != w.idx.has_value())
        throw std::invalid_argument("index presence mismatch in equality witness");
    }
  }
  if (eqWitness.empty()) throw std::invalid_argument("theory lacks an equality witness");
  if (lattice) lattice->validate();
}

int HornTheory::upAxiomFor(int sym) const {
  for (size_t i = 0; i < axioms.size(); i++) {
    const HornAxiom& ax = axioms[i];
    if (ax.premises.size() != 1 || !ax.conds.empty()) continue;
    const Atom& p = ax.premises[0];
    const Atom& c = ax.conclusion;
    if (p.sym != sym || c.sym != sym) continue;
    if (!p.idx || !c.idx) continue;
    if (p.idx->vars.size() != 1 || !p.idx->c.isZero()) continue;
    if (p.args != c.args) continue;
    // conclusion e+e' (or e+e'+const) with the premise variable present and
    // at least one fresh variable
    const std::string& e = p.idx->vars[0];
    bool hasE = false, hasFresh = false;
    for (auto& v : c.idx->vars) (v == e ? hasE : hasFresh) = true;
    if (hasE && hasFresh) return (int)i;
  }
  return -1;
}

int Structure::pointIndex(const std::string& p) const {
  for (size_t i = 0; i < points.size(); i++)
    if (points[i] == p) return (int)i;
  return -1;
}

void Structure::addFam(int sym, int p, int q, FamVal v) {
  FamKey k{sym, p, q};
  auto it = fam.find(k);
  if (it == fam.end())
    fam.emplace(k, v);
  else
    it->second = FamVal::combine(it->second, v);
}

const FamVal* Structure::famVal(int sym, int p, int q) const {
  auto it = fam.find(FamKey{sym, p, q});
  return it == fam.end() ? nullptr : &it->second;
}

bool Structure::holdsFam(int sym, int p, int q, const Rat& idx) const {
  const FamVal* v = famVal(sym, p, q);
  return v && v->holds(idx);
}

// ---------------------------------------------------------------------------
// Builtins.

namespace {

// Closure of every relation under the equality witness, stated as explicit
// axioms: Eq(x1,y1),...,Eq(xk,yk), r(x...) => r(y...).
void addEqClosureAxioms(HornTheory& t) {
  for (size_t s = 0; s < t.symbols.size(); s++) {
    const RelSymbol& rs = t.symbols[s];
    HornAxiom ax;
    ax.name = "eq-closure-" + rs.name;
    ax.generated = true;
    ax.varCount = 2 * rs.arity;  // x_i = 2i, y_i = 2i+1
    for (int i = 0; i < rs.arity; i++)
      for (auto& w : t.eqWitness) {
        Atom a;
        a.sym = w.sym;
        if (w.idx) a.idx = IndexExpr::constant(*w.idx);
        a.args = {w.a == 0 ? 2 * i : 2 * i + 1, w.b == 0 ? 2 * i : 2 * i + 1};
        ax.premises.push_back(a);
      }
    Atom body;
    body.sym = (int)s;
    if (rs.family) body.idx = IndexExpr::var("e");
    for (int i = 0; i < rs.arity; i++) body.args.push_back(2 * i);
    ax.premises.push_back(body);
    ax.conclusion = body;
    ax.conclusion.args.clear();
    for (int i = 0; i < rs.arity; i++) ax.conclusion.args.push_back(2 * i + 1);
    t.axioms.push_back(std::move(ax));
  }
}

}  // namespace

void finalizeTheory(HornTheory& t) {
  addEqClosureAxioms(t);
  t.validate();
}

HornTheory theorySet() {
  HornTheory t;
  t.name = "set";
  t.eqWitness = {EqAtom{kEqSym, std::nullopt, 0, 1}};
  finalizeTheory(t);
  return t;
}

HornTheory theoryPos() {
  HornTheory t;
  t.name = "pos";
  t.symbols = {RelSymbol{"le", 2, false}};
  {
    HornAxiom ax;
    ax.name = "refl";
    ax.varCount = 1;
    ax.conclusion = Atom{0, std::nullopt, {0, 0}};
    t.axioms.push_back(ax);
  }
  {
    HornAxiom ax;
    ax.name = "trans";
    ax.varCount = 3;
    ax.premises = {Atom{0, std::nullopt, {0, 1}}, Atom{0, std::nullopt, {1, 2}}};
    ax.conclusion = Atom{0, std::nullopt, {0, 2}};
    t.axioms.push_back(ax);
  }
  {
    HornAxiom ax;
    ax.name = "antisym";
    ax.varCount = 2;
    ax.premises = {Atom{0, std::nullopt, {0, 1}}, Atom{0, std::nullopt, {1, 0}}};
    ax.conclusion = Atom{kEqSym, std::nullopt, {0, 1}};
    t.axioms.push_back(ax);
  }
  t.eqWitness = {EqAtom{0, std::nullopt, 0, 1}, EqAtom{0, std::nullopt, 1, 0}};
  finalizeTheory(t);
  return t;
}

HornTheory theoryMet() {
  HornTheory t;
  t.name = "met";
  t.symbols = {RelSymbol{"eq", 2, true}};
  auto fam = [&](IndexExpr e, int a, int b) { return Atom{0, std::move(e), {a, b}}; };
  {
    HornAxiom ax;
    ax.name = "refl";
    ax.varCount = 1;
    ax.conclusion = fam(IndexExpr::constant(Rat::zero()), 0, 0);
    t.axioms.push_back(ax);
  }
  {
    HornAxiom ax;
    ax.name = "equal";
    ax.varCount = 2;
    ax.premises = {fam(IndexExpr::constant(Rat::zero()), 0, 1)};
    ax.conclusion = Atom{kEqSym, std::nullopt, {0, 1}};
    t.axioms.push_back(ax);
  }
  {
    HornAxiom ax;
    ax.name = "sym";
    ax.varCount = 2;
    ax.premises = {fam(IndexExpr::var("e"), 0, 1)};
    ax.conclusion = fam(IndexExpr::var("e"), 1, 0);
    t.axioms.push_back(ax);
  }
  {
    HornAxiom ax;
    ax.name = "triang";
    ax.varCount = 3;
    ax.premises = {fam(IndexExpr::var("e"), 0, 1), fam(IndexExpr::var("e2"), 1, 2)};
    ax.conclusion = fam(IndexExpr{Rat::zero(), {"e", "e2"}}, 0, 2);
    t.axioms.push_back(ax);
  }
  {
    HornAxiom ax;
    ax.name = "up";
    ax.varCount = 2;
    ax.premises = {fam(IndexExpr::var("e"), 0, 1)};
    ax.conclusion = fam(IndexExpr{Rat::zero(), {"e", "e2"}}, 0, 1);
    t.axioms.push_back(ax);
  }
  {
    // Every pair is related at index 1; with this the models are exactly the
    // 1-bounded metric spaces and the distance of a pair is always defined.
    HornAxiom ax;
    ax.name = "total";
    ax.varCount = 2;
    ax.conclusion = fam(IndexExpr::constant(Rat::one()), 0, 1);
    t.axioms.push_back(ax);
  }
  t.limitRules = {LimitRule{LimitRule::MetArch, "met-arch"}};
  t.eqWitness = {EqAtom{0, Rat::zero(), 0, 1}};
  finalizeTheory(t);
  return t;
}

HornTheory theoryLValued(const Lattice& l) {
  l.validate();
  HornTheory t;
  t.name = "lvalued";
  t.lattice = l;
  int n = (int)l.elems.size();
  for (int i = 0; i < n; i++) {
    t.symbols.push_back(RelSymbol{"r_" + l.elems[i], 2, false});
    t.latticeElemOfSym[i] = i;
  }
  for (int p = 0; p < n; p++)
    for (int q = 0; q < n; q++)
      if (p != q && l.leq[p][q]) {
        HornAxiom ax;
        ax.name = "up-" + l.elems[p] + "-" + l.elems[q];
        ax.varCount = 2;
        ax.premises = {Atom{p, std::nullopt, {0, 1}}};
        ax.conclusion = Atom{q, std::nullopt, {0, 1}};
        t.axioms.push_back(ax);
      }
  int bot = l.bottom;
  {
    HornAxiom ax;
    ax.name = "refl";
    ax.varCount = 1;
    ax.conclusion = Atom{bot, std::nullopt, {0, 0}};
    t.axioms.push_back(ax);
  }
  {
    HornAxiom ax;
    ax.name = "equal";
    ax.varCount = 2;
    ax.premises = {Atom{bot, std::nullopt, {0, 1}}, Atom{bot, std::nullopt, {1, 0}}};
    ax.conclusion = Atom{kEqSym, std::nullopt, {0, 1}};
    t.axioms.push_back(ax);
  }
  t.limitRules = {LimitRule{LimitRule::LatticeArch, "lattice-arch"}};
  t.eqWitness = {EqAtom{bot, std::nullopt, 0, 1}, EqAtom{bot, std::nullopt, 1, 0}};
  finalizeTheory(t);
  return t;
}

HornTheory theoryPartial(const std::vector<std::pair<std::string, int>>& ops) {
  HornTheory t;
  t.name = "partial";
  for (auto& [name, ar] : ops) {
    if (ar < 0) throw std::invalid_argument("negative operation arity");
    t.symbols.push_back(RelSymbol{"alpha_" + name, ar + 1, false});
  }
  for (size_t s = 0; s < t.symbols.size(); s++) {
    int k = t.symbols[s].arity;
    HornAxiom ax;
    ax.name = "func-" + ops[s].first;
    ax.varCount = k + 1;  // args 0..k-2, results k-1 and k
    Atom a1{(int)s, std::nullopt, {}}, a2 = a1;
    for (int i = 0; i < k - 1; i++) {
      a1.args.push_back(i);
      a2.args.push_back(i);
    }
    a1.args.push_back(k - 1);
    a2.args.push_back(k);
    ax.premises = {a1, a2};
    ax.conclusion = Atom{kEqSym, std::nullopt, {k - 1, k}};
    t.axioms.push_back(ax);
  }
  t.eqWitness = {EqAtom{kEqSym, std::nullopt, 0, 1}};
  finalizeTheory(t);
  return t;
}

// ---------------------------------------------------------------------------
// Printing.

std::string varName(int i) {
  static const char* base[] = {"x", "y", "z", "w"};
  if (i < 4) return base[i];
  return "v" + std::to_string(i);
}

static std::string atomStr(const HornTheory& t, const Atom& a) {
  std::ostringstream o;
  if (a.sym == kEqSym) {
    o << varName(a.args[0]) << " = " << varName(a.args[1]);
    return o.str();
  }
  o << t.symbols[a.sym].name;
  if (a.idx) o << "[" << a.idx->str() << "]";
  o << "(";
  for (size_t i = 0; i < a.args.size(); i++) o << (i ? ", " : "") << varName(a.args[i]);
  o << ")";
  return o.str();
}

std::string printTheory(const HornTheory& t) {
  std::ostringstream o;
  o << "theory " << t.name << "\n";
  for (auto& s : t.symbols) {
    if (s.family)
      o << "relfam " << s.name << " rational\n";
    else
      o << "rel " << s.name << " " << s.arity << "\n";
  }
  for (auto& ax : t.axioms) {
    if (ax.generated) continue;
    o << "axiom ";
    for (size_t i = 0; i < ax.premises.size(); i++)
      o << (i ? ", " : "") << atomStr(t, ax.premises[i]);
    o << " => " << atomStr(t, ax.conclusion);
    for (auto& sc : ax.conds) {
      const char* op = sc.op == SideCond::LT   ? "<"
                       : sc.op == SideCond::LE ? "<="
                       : sc.op == SideCond::GT ? ">"
                                               : ">=";
      o << " where " << sc.lhs.str() << " " << op << " " << sc.rhs.str();
    }
    o << "\n";
  }
  for (auto& r : t.limitRules) o << "limitrule " << r.name << "\n";
  if (!t.eqWitness.empty()) {
    o << "eq ";
    for (size_t i = 0; i < t.eqWitness.size(); i++) {
      auto& w = t.eqWitness[i];
      if (i) o << ", ";
      if (w.sym == kEqSym) {
        o << varName(w.a) << " = " << varName(w.b);
      } else {
        o << t.symbols[w.sym].name;
        if (w.idx) o << "[" << w.idx->str() << "]";
        o << "(" << varName(w.a) << ", " << varName(w.b) << ")";
      }
    }
    o << "\n";
  }
  return o.str();
}

std::string printStructure(const HornTheory& t, const Structure& s) {
  std::ostringstream o;
  o << "structure " << (s.name.empty() ? std::string("S") : s.name) << " over " << t.name << "\n";
  o << "points";
  for (auto& p : s.points) o << " " << p;
  o << "\n";
  for (auto& e : s.edges) {
    o << "edge " << t.symbols[e.sym].name << "(";
    for (size_t i = 0; i < e.pts.size(); i++) o << (i ? ", " : "") << s.points[e.pts[i]];
    o << ")\n";
  }
  for (auto& [k, v] : s.fam) {
    auto [sym, p, q] = k;
    if (v.attained)
      o << "edge " << t.symbols[sym].name << "[" << v.v.str() << "](" << s.points[p] << ", "
        << s.points[q] << ")\n";
    else
      o << "edgefam " << t.symbols[sym].name << "[inf " << v.v.str() << "](" << s.points[p] << ", "
        << s.points[q] << ")\n";
  }
  return o.str();
}

}  // namespace relat
