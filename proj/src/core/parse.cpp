#include "parse.hpp"

#include <cctype>

namespace relat {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// Source lines with comments stripped and blanks dropped; keeps 1-based
// line numbers for errors.
struct Line {
  int no;
  std::string text;
};

std::vector<Line> lines(const std::string& text) {
  std::vector<Line> out;
  int no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t nl = text.find('\n', pos);
    std::string raw = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
    no++;
    size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (!raw.empty()) out.push_back({no, raw});
  }
  return out;
}

std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && isspace((unsigned char)s[i])) i++;
    size_t j = i;
    while (j < s.size() && !isspace((unsigned char)s[j])) j++;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

// Split on a separator at bracket depth zero; brackets are (), {}, [].
std::vector<std::string> splitTop(const std::string& s, const std::string& sep) {
  std::vector<std::string> out;
  int depth = 0;
  size_t start = 0, i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (c == ')' || c == '}' || c == ']') depth--;
    if (depth == 0 && s.compare(i, sep.size(), sep) == 0) {
      out.push_back(s.substr(start, i - start));
      i += sep.size();
      start = i;
      continue;
    }
    if (c == '(' || c == '{' || c == '[') depth++;
    i++;
  }
  out.push_back(s.substr(start));
  return out;
}

size_t findTop(const std::string& s, const std::string& sep) {
  int depth = 0;
  for (size_t i = 0; i < s.size(); i++) {
    char c = s[i];
    if (c == ')' || c == '}' || c == ']') depth--;
    if (depth == 0 && s.compare(i, sep.size(), sep) == 0) return i;
    if (c == '(' || c == '{' || c == '[') depth++;
  }
  return std::string::npos;
}

Rat ratIn01(const std::string& s, int ln) {
  Rat r;
  try {
    r = parseRat(s);
  } catch (std::exception& e) {
    throw ParseError(ln, e.what());
  }
  if (r < Rat::zero() || Rat::one() < r)
    throw ParseError(ln, "index " + s + " is outside [0,1]");
  return r;
}

bool isIdent(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!isalnum((unsigned char)c) && c != '_' && c != '-' && c != '.') return false;
  return isalpha((unsigned char)s[0]) || s[0] == '_';
}

IndexExpr parseIndexExpr(const std::string& s, int ln) {
  IndexExpr e;
  e.c = Rat::zero();
  bool sawConst = false;
  for (auto& piece : splitTop(s, "+")) {
    std::string p = trim(piece);
    if (p.empty()) throw ParseError(ln, "empty term in index expression '" + s + "'");
    if (isdigit((unsigned char)p[0])) {
      e.c = e.c + ratIn01(p, ln);
      sawConst = true;
    } else if (isIdent(p)) {
      e.vars.push_back(p);
    } else {
      throw ParseError(ln, "bad index expression term '" + p + "'");
    }
  }
  if (sawConst && Rat::one() < e.c)
    throw ParseError(ln, "index constant in '" + s + "' is outside [0,1]");
  return e;
}

// Axiom variables: canonical display names (x, y, z, w, vN) map back to
// their indices; other names are assigned in order of first use.
struct VarMap {
  std::map<std::string, int> byName;
  int maxIdx = -1;

  int get(const std::string& n, int ln) {
    auto it = byName.find(n);
    if (it != byName.end()) return it->second;
    if (!isIdent(n)) throw ParseError(ln, "bad variable name '" + n + "'");
    int idx = -1;
    if (n == "x") idx = 0;
    if (n == "y") idx = 1;
    if (n == "z") idx = 2;
    if (n == "w") idx = 3;
    if (n.size() > 1 && n[0] == 'v' && isdigit((unsigned char)n[1])) {
      bool num = true;
      for (size_t i = 1; i < n.size(); i++) num &= isdigit((unsigned char)n[i]) != 0;
      if (num) idx = std::stoi(n.substr(1));
    }
    if (idx < 0) idx = maxIdx + 1;
    for (auto& [o, i] : byName)
      if (i == idx) throw ParseError(ln, "variables '" + o + "' and '" + n + "' collide");
    byName[n] = idx;
    maxIdx = std::max(maxIdx, idx);
    return idx;
  }
};

// `sym(x, y)`, `sym[e+1/2](x, y)`, or `x = y`.
Atom parseAtom(const std::string& s, int ln, const HornTheory& th, VarMap& vars) {
  size_t paren = findTop(s, "(");
  if (paren == std::string::npos) {
    auto sides = splitTop(s, "=");
    if (sides.size() != 2) throw ParseError(ln, "bad atom '" + s + "'");
    return Atom{kEqSym, std::nullopt,
                {vars.get(trim(sides[0]), ln), vars.get(trim(sides[1]), ln)}};
  }
  if (s.empty() || s.back() != ')') throw ParseError(ln, "bad atom '" + s + "'");
  std::string head = trim(s.substr(0, paren));
  std::string inside = s.substr(paren + 1, s.size() - paren - 2);
  Atom a;
  size_t br = head.find('[');
  if (br != std::string::npos) {
    if (head.back() != ']') throw ParseError(ln, "bad atom '" + s + "'");
    a.idx = parseIndexExpr(head.substr(br + 1, head.size() - br - 2), ln);
    head = trim(head.substr(0, br));
  }
  a.sym = th.symIndex(head);
  if (a.sym < 0) throw ParseError(ln, "unknown relation symbol '" + head + "'");
  if (th.symbols[a.sym].family && !a.idx)
    throw ParseError(ln, "family symbol '" + head + "' needs an index");
  if (!th.symbols[a.sym].family && a.idx)
    throw ParseError(ln, "symbol '" + head + "' does not take an index");
  for (auto& arg : splitTop(inside, ",")) a.args.push_back(vars.get(trim(arg), ln));
  if ((int)a.args.size() != th.symbols[a.sym].arity)
    throw ParseError(ln, "symbol '" + head + "' expects " +
                             std::to_string(th.symbols[a.sym].arity) + " arguments, got " +
                             std::to_string(a.args.size()));
  return a;
}

void parseAxiomLine(const std::string& body, int ln, HornTheory& t) {
  size_t arrow = findTop(body, "=>");
  if (arrow == std::string::npos) throw ParseError(ln, "axiom needs '=>'");
  std::string premPart = trim(body.substr(0, arrow));
  auto wherePieces = splitTop(body.substr(arrow + 2), " where ");
  HornAxiom ax;
  ax.name = "a" + std::to_string(t.axioms.size() + 1);
  VarMap vars;
  if (!premPart.empty())
    for (auto& p : splitTop(premPart, ","))
      ax.premises.push_back(parseAtom(trim(p), ln, t, vars));
  ax.conclusion = parseAtom(trim(wherePieces[0]), ln, t, vars);
  for (size_t i = 1; i < wherePieces.size(); i++) {
    std::string w = trim(wherePieces[i]);
    SideCond sc;
    size_t at;
    if ((at = findTop(w, "<=")) != std::string::npos) sc.op = SideCond::LE;
    else if ((at = findTop(w, ">=")) != std::string::npos) sc.op = SideCond::GE;
    else if ((at = findTop(w, "<")) != std::string::npos) sc.op = SideCond::LT;
    else if ((at = findTop(w, ">")) != std::string::npos) sc.op = SideCond::GT;
    else throw ParseError(ln, "side condition needs a comparison: '" + w + "'");
    int opLen = sc.op == SideCond::LE || sc.op == SideCond::GE ? 2 : 1;
    sc.lhs = parseIndexExpr(trim(w.substr(0, at)), ln);
    sc.rhs = parseIndexExpr(trim(w.substr(at + opLen)), ln);
    ax.conds.push_back(sc);
  }
  ax.varCount = vars.maxIdx + 1;
  t.axioms.push_back(std::move(ax));
}

EqAtom parseEqAtom(const std::string& s, int ln, const HornTheory& th) {
  VarMap vars;
  Atom a = parseAtom(s, ln, th, vars);
  if (a.args.size() != 2 || vars.maxIdx > 1)
    throw ParseError(ln, "equality witness must relate exactly x and y: '" + s + "'");
  EqAtom w;
  w.sym = a.sym;
  if (a.idx) {
    if (!a.idx->vars.empty())
      throw ParseError(ln, "equality witness index must be constant: '" + s + "'");
    w.idx = a.idx->c;
  }
  w.a = a.args[0];
  w.b = a.args[1];
  return w;
}

// `edge sym(a, b)`, `edge fam[1/3](a, b)`, `edgefam fam[inf 1/3](a, b)`.
void parseEdgeLine(const std::string& text, int ln, const HornTheory& th, Structure& s) {
  bool famLine = text.compare(0, 8, "edgefam ") == 0;
  std::string body = trim(text.substr(famLine ? 8 : 5));
  size_t paren = findTop(body, "(");
  if (paren == std::string::npos || body.back() != ')')
    throw ParseError(ln, "bad edge '" + body + "'");
  std::string head = trim(body.substr(0, paren));
  std::string inside = body.substr(paren + 1, body.size() - paren - 2);
  std::optional<Rat> idx;
  bool attained = true;
  size_t br = head.find('[');
  if (br != std::string::npos) {
    if (head.back() != ']') throw ParseError(ln, "bad edge '" + body + "'");
    std::string ix = trim(head.substr(br + 1, head.size() - br - 2));
    if (ix.compare(0, 4, "inf ") == 0) {
      attained = false;
      ix = trim(ix.substr(4));
    }
    idx = ratIn01(ix, ln);
    head = trim(head.substr(0, br));
  }
  int sym = th.symIndex(head);
  if (sym < 0) throw ParseError(ln, "unknown relation symbol '" + head + "'");
  if (famLine && (!idx || attained))
    throw ParseError(ln, "edgefam needs an 'inf' index: '" + body + "'");
  if (th.symbols[sym].family != idx.has_value())
    throw ParseError(ln, th.symbols[sym].family
                             ? "family symbol '" + head + "' needs an index"
                             : "symbol '" + head + "' does not take an index");
  std::vector<int> pts;
  for (auto& p : splitTop(inside, ",")) {
    std::string name = trim(p);
    int i = s.pointIndex(name);
    if (i < 0) throw ParseError(ln, "undeclared point '" + name + "'");
    pts.push_back(i);
  }
  if ((int)pts.size() != th.symbols[sym].arity)
    throw ParseError(ln, "symbol '" + head + "' expects " +
                             std::to_string(th.symbols[sym].arity) + " arguments, got " +
                             std::to_string(pts.size()));
  if (idx)
    s.addFam(sym, pts[0], pts[1], FamVal{*idx, attained});
  else
    s.addEdge(sym, pts);
}

void parsePointsLine(const std::string& text, int ln, Structure& s) {
  if (!s.points.empty()) throw ParseError(ln, "duplicate points line");
  auto w = words(text);
  for (size_t i = 1; i < w.size(); i++) {
    if (s.pointIndex(w[i]) >= 0) throw ParseError(ln, "duplicate point '" + w[i] + "'");
    s.points.push_back(w[i]);
  }
}

}  // namespace

std::optional<HornTheory> builtinTheory(const std::string& name) {
  if (name == "set") return theorySet();
  if (name == "pos") return theoryPos();
  if (name == "met") return theoryMet();
  return std::nullopt;
}

HornTheory parseTheory(const std::string& text) {
  HornTheory t;
  bool sawHeader = false;
  for (auto& [ln, s] : lines(text)) {
    auto w = words(s);
    if (!sawHeader) {
      if (w.size() != 2 || w[0] != "theory")
        throw ParseError(ln, "expected 'theory <name>'");
      t.name = w[1];
      sawHeader = true;
    } else if (w[0] == "rel") {
      if (w.size() != 3) throw ParseError(ln, "expected 'rel <name> <arity>'");
      if (t.symIndex(w[1]) >= 0) throw ParseError(ln, "duplicate symbol '" + w[1] + "'");
      int ar;
      try {
        ar = std::stoi(w[2]);
      } catch (std::exception&) {
        throw ParseError(ln, "bad arity '" + w[2] + "'");
      }
      t.symbols.push_back(RelSymbol{w[1], ar, false});
    } else if (w[0] == "relfam") {
      if (w.size() != 3 || w[2] != "rational")
        throw ParseError(ln, "expected 'relfam <name> rational'");
      if (t.symIndex(w[1]) >= 0) throw ParseError(ln, "duplicate symbol '" + w[1] + "'");
      t.symbols.push_back(RelSymbol{w[1], 2, true});
    } else if (w[0] == "axiom") {
      parseAxiomLine(trim(s.substr(5)), ln, t);
    } else if (w[0] == "limitrule") {
      if (w.size() != 2) throw ParseError(ln, "expected 'limitrule <name>'");
      if (w[1] == "met-arch")
        t.limitRules.push_back(LimitRule{LimitRule::MetArch, w[1]});
      else if (w[1] == "lattice-arch")
        t.limitRules.push_back(LimitRule{LimitRule::LatticeArch, w[1]});
      else
        throw ParseError(ln, "unknown limit rule '" + w[1] + "'");
    } else if (w[0] == "eq") {
      if (!t.eqWitness.empty()) throw ParseError(ln, "duplicate eq line");
      for (auto& a : splitTop(trim(s.substr(2)), ","))
        t.eqWitness.push_back(parseEqAtom(trim(a), ln, t));
      if (t.eqWitness.empty()) throw ParseError(ln, "empty equality witness");
    } else {
      throw ParseError(ln, "unexpected '" + w[0] + "' in a theory file");
    }
  }
  if (!sawHeader) throw ParseError(0, "empty theory file");
  try {
    finalizeTheory(t);
  } catch (std::exception& e) {
    throw ParseError(0, e.what());
  }
  return t;
}

Structure parseStructure(const std::string& text, const HornTheory& th) {
  Structure s;
  bool sawHeader = false;
  for (auto& [ln, raw] : lines(text)) {
    auto w = words(raw);
    if (!sawHeader) {
      if (w.size() != 4 || w[0] != "structure" || w[2] != "over")
        throw ParseError(ln, "expected 'structure <name> over <theory>'");
      if (w[3] != th.name)
        throw ParseError(ln, "structure is over '" + w[3] + "', expected '" + th.name + "'");
      s.name = w[1];
      sawHeader = true;
    } else if (w[0] == "points") {
      parsePointsLine(raw, ln, s);
    } else if (w[0] == "edge" || w[0] == "edgefam") {
      parseEdgeLine(raw, ln, th, s);
    } else {
      throw ParseError(ln, "unexpected '" + w[0] + "' in a structure file");
    }
  }
  if (!sawHeader) throw ParseError(0, "empty structure file");
  return s;
}

STerm parseTerm(const std::string& text, const Structure& ctx,
                const std::vector<OpSymbol>& ops) {
  std::string s = trim(text);
  if (s.empty()) throw ParseError(0, "empty term");
  auto opNamed = [&](const std::string& n) {
    for (size_t i = 0; i < ops.size(); i++)
      if (ops[i].name == n) return (int)i;
    throw ParseError(0, "unknown operation '" + n + "'");
  };
  if (s.back() == '}') {
    size_t brace = findTop(s.substr(0, s.size() - 1), "{");
    if (brace == std::string::npos) throw ParseError(0, "unbalanced braces in '" + s + "'");
    int op = opNamed(trim(s.substr(0, brace)));
    const Structure& ar = ops[op].arity;
    std::vector<STerm> args(ar.size());
    std::vector<bool> seen(ar.size(), false);
    std::string inside = s.substr(brace + 1, s.size() - brace - 2);
    for (auto& b : splitTop(inside, ",")) {
      size_t sep = findTop(b, "->");
      if (sep == std::string::npos) throw ParseError(0, "binding needs '->': '" + b + "'");
      std::string key = trim(b.substr(0, sep));
      int p = ar.pointIndex(key);
      if (p < 0) throw ParseError(0, "unknown arity point '" + key + "'");
      if (seen[p]) throw ParseError(0, "duplicate binding for '" + key + "'");
      seen[p] = true;
      args[p] = parseTerm(b.substr(sep + 2), ctx, ops);
    }
    for (int p = 0; p < ar.size(); p++)
      if (!seen[p]) throw ParseError(0, "missing binding for arity point '" + ar.points[p] + "'");
    return STerm::mkApp(op, std::move(args));
  }
  if (s.back() == ')') {
    size_t paren = findTop(s.substr(0, s.size() - 1), "(");
    if (paren == std::string::npos) throw ParseError(0, "unbalanced parens in '" + s + "'");
    int op = opNamed(trim(s.substr(0, paren)));
    const Structure& ar = ops[op].arity;
    std::vector<STerm> args;
    std::string inside = s.substr(paren + 1, s.size() - paren - 2);
    if (!trim(inside).empty())
      for (auto& a : splitTop(inside, ",")) args.push_back(parseTerm(a, ctx, ops));
    if ((int)args.size() != ar.size())
      throw ParseError(0, "operation '" + ops[op].name + "' expects " +
                              std::to_string(ar.size()) + " arguments, got " +
                              std::to_string(args.size()));
    return STerm::mkApp(op, std::move(args));
  }
  int v = ctx.pointIndex(s);
  if (v < 0) throw ParseError(0, "unknown point '" + s + "'");
  return STerm::mkVar(v);
}

namespace {

// Relation head `sym` or `sym[1/2]` with a constant index, validated against
// the symbol's family flag.
std::pair<int, std::optional<Rat>> parseRelHead(std::string head, const HornTheory& th, int ln) {
  std::optional<Rat> idx;
  size_t br = head.find('[');
  if (br != std::string::npos) {
    if (head.back() != ']') throw ParseError(ln, "bad relation '" + head + "'");
    idx = ratIn01(trim(head.substr(br + 1, head.size() - br - 2)), ln);
    head = trim(head.substr(0, br));
  }
  int sym = th.symIndex(head);
  if (sym < 0) throw ParseError(ln, "unknown relation symbol '" + head + "'");
  if (th.symbols[sym].family != idx.has_value())
    throw ParseError(ln, th.symbols[sym].family
                             ? "family symbol '" + head + "' needs an index"
                             : "symbol '" + head + "' does not take an index");
  return {sym, idx};
}

}  // namespace

Goal parseGoal(const std::string& text, const HornTheory& th, const Structure& s) {
  std::string body = trim(text);
  Goal g;
  size_t paren = findTop(body, "(");
  auto pointOf = [&](const std::string& n) {
    int i = s.pointIndex(trim(n));
    if (i < 0) throw ParseError(0, "unknown point '" + trim(n) + "'");
    return i;
  };
  if (paren == std::string::npos) {
    auto sides = splitTop(body, "=");
    if (sides.size() != 2) throw ParseError(0, "bad goal '" + body + "'");
    g.isEq = true;
    g.pts = {pointOf(sides[0]), pointOf(sides[1])};
    return g;
  }
  if (body.back() != ')') throw ParseError(0, "bad goal '" + body + "'");
  auto [sym, idx] = parseRelHead(trim(body.substr(0, paren)), th, 0);
  g.sym = sym;
  g.idx = idx;
  for (auto& a : splitTop(body.substr(paren + 1, body.size() - paren - 2), ","))
    g.pts.push_back(pointOf(a));
  if ((int)g.pts.size() != th.symbols[sym].arity)
    throw ParseError(0, "symbol '" + th.symbols[sym].name + "' expects " +
                            std::to_string(th.symbols[sym].arity) + " arguments, got " +
                            std::to_string(g.pts.size()));
  return g;
}

LJudgement parseJudgement(const std::string& text, const Variety& V, const Structure& ctx) {
  std::string body = trim(text);
  if (body.compare(0, 4, "def ") == 0)
    return LJudgement::def(parseTerm(body.substr(4), ctx, V.ops));
  size_t paren = findTop(body, "(");
  if (paren == std::string::npos || body.back() != ')')
    throw ParseError(0, "bad judgement '" + body + "'");
  std::string head = trim(body.substr(0, paren));
  // a bare term (operation head, no index) is shorthand for its definedness
  if (head.find('[') == std::string::npos && V.theory->symIndex(head) < 0)
    return LJudgement::def(parseTerm(body, ctx, V.ops));
  auto [sym, idx] = parseRelHead(head, *V.theory, 0);
  std::vector<STerm> terms;
  for (auto& a : splitTop(body.substr(paren + 1, body.size() - paren - 2), ","))
    terms.push_back(parseTerm(a, ctx, V.ops));
  if ((int)terms.size() != V.theory->symbols[sym].arity)
    throw ParseError(0, "symbol '" + V.theory->symbols[sym].name + "' expects " +
                            std::to_string(V.theory->symbols[sym].arity) + " arguments, got " +
                            std::to_string(terms.size()));
  return LJudgement::rel(sym, idx, std::move(terms));
}

Variety parseVariety(const std::string& text, std::shared_ptr<const HornTheory> ambient) {
  Variety V;
  bool sawHeader = false;
  std::map<std::string, Structure> blocks;
  Structure* cur = nullptr;
  std::vector<Line> opLines, axLines;
  std::vector<Line> src = lines(text);
  for (auto& L : src) {
    auto w = words(L.text);
    if (!sawHeader) {
      if (w.size() != 4 || w[0] != "variety" || w[2] != "over")
        throw ParseError(L.no, "expected 'variety <name> over <theory>'");
      V.name = w[1];
      if (ambient && ambient->name == w[3]) {
        V.theory = ambient;
      } else if (auto b = builtinTheory(w[3])) {
        V.theory = std::make_shared<HornTheory>(std::move(*b));
      } else {
        throw ParseError(L.no, "unknown theory '" + w[3] + "'");
      }
      sawHeader = true;
    } else if (w[0] == "structure") {
      if (w.size() != 2) throw ParseError(L.no, "expected 'structure <name>'");
      if (blocks.count(w[1])) throw ParseError(L.no, "duplicate structure '" + w[1] + "'");
      cur = &blocks[w[1]];
      cur->name = w[1];
    } else if (w[0] == "points" || w[0] == "edge" || w[0] == "edgefam") {
      if (!cur) throw ParseError(L.no, "'" + w[0] + "' outside a structure block");
      if (w[0] == "points")
        parsePointsLine(L.text, L.no, *cur);
      else
        parseEdgeLine(L.text, L.no, *V.theory, *cur);
    } else if (w[0] == "op") {
      opLines.push_back(L);
    } else if (w[0] == "axiom") {
      axLines.push_back(L);
    } else {
      throw ParseError(L.no, "unexpected '" + w[0] + "' in a variety file");
    }
  }
  if (!sawHeader) throw ParseError(0, "empty variety file");
  auto blockOf = [&](const std::string& n, int ln) -> const Structure& {
    auto it = blocks.find(n);
    if (it == blocks.end()) throw ParseError(ln, "unknown structure '" + n + "'");
    return it->second;
  };
  for (auto& L : opLines) {
    auto w = words(L.text);
    if (w.size() != 4 || w[2] != "arity")
      throw ParseError(L.no, "expected 'op <name> arity <structure>'");
    if (V.opIndex(w[1]) >= 0) throw ParseError(L.no, "duplicate operation '" + w[1] + "'");
    Structure ar = blockOf(w[3], L.no);
    ar.name.clear();
    V.ops.push_back({w[1], std::move(ar)});
  }
  for (auto& L : axLines) {
    // axiom context sK : sym[r](t, u)
    std::string body = trim(L.text.substr(5));
    if (body.compare(0, 8, "context ") != 0)
      throw ParseError(L.no, "expected 'axiom context <structure> : <relation>'");
    size_t colon = findTop(body, ":");
    if (colon == std::string::npos)
      throw ParseError(L.no, "expected ':' after the axiom context");
    std::string ctxName = trim(body.substr(8, colon - 8));
    SigmaRelation r;
    r.name = "a" + std::to_string(V.axioms.size() + 1);
    r.context = blockOf(ctxName, L.no);
    r.context.name.clear();
    std::string atom = trim(body.substr(colon + 1));
    size_t paren = findTop(atom, "(");
    if (paren == std::string::npos || atom.back() != ')')
      throw ParseError(L.no, "bad relation '" + atom + "'");
    std::string head = trim(atom.substr(0, paren));
    size_t br = head.find('[');
    if (br != std::string::npos) {
      if (head.back() != ']') throw ParseError(L.no, "bad relation '" + atom + "'");
      r.idx = ratIn01(trim(head.substr(br + 1, head.size() - br - 2)), L.no);
      head = trim(head.substr(0, br));
    }
    r.sym = V.theory->symIndex(head);
    if (r.sym < 0) throw ParseError(L.no, "unknown relation symbol '" + head + "'");
    if (V.theory->symbols[r.sym].family != r.idx.has_value())
      throw ParseError(L.no, V.theory->symbols[r.sym].family
                                 ? "family symbol '" + head + "' needs an index"
                                 : "symbol '" + head + "' does not take an index");
    std::string inside = atom.substr(paren + 1, atom.size() - paren - 2);
    for (auto& a : splitTop(inside, ",")) {
      try {
        r.args.push_back(parseTerm(a, r.context, V.ops));
      } catch (ParseError& e) {
        throw ParseError(L.no, e.what());
      }
    }
    if ((int)r.args.size() != V.theory->symbols[r.sym].arity)
      throw ParseError(L.no, "symbol '" + head + "' expects " +
                                 std::to_string(V.theory->symbols[r.sym].arity) +
                                 " arguments, got " + std::to_string(r.args.size()));
    V.axioms.push_back(std::move(r));
  }
  return V;
}

}  // namespace relat
