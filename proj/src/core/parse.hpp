#pragma once

#include <stdexcept>

#include "logic.hpp"

namespace relat {

// Line-anchored parse failure for the textual formats below.
struct ParseError : std::runtime_error {
  int line;  // 1-based; 0 when no line applies
  ParseError(int ln, const std::string& msg)
      : std::runtime_error(ln > 0 ? "line " + std::to_string(ln) + ": " + msg : msg), line(ln) {}
};

// Builtin theory lookup by name (set, pos, met); nullopt otherwise.
std::optional<HornTheory> builtinTheory(const std::string& name);

// Theory files: `theory N`, `rel sym k`, `relfam sym rational`,
// `axiom p1, p2 => c where e1 <= e2`, `limitrule name`, `eq atoms`.
// `#` starts a comment; the result is finalized and validated.
HornTheory parseTheory(const std::string& text);

// Structure files: `structure N over theoryname`, `points a b c`,
// `edge sym(a, b)`, `edge fam[1/3](a, b)`, `edgefam fam[inf 1/3](a, b)`.
Structure parseStructure(const std::string& text, const HornTheory& th);

// Variety files: `variety N over theoryname`, shared `structure sK` blocks
// (structure bodies), `op name arity sK`, `axiom context sK : sym(t, u)`.
// The `over` name resolves against `ambient` when given, else a builtin.
Variety parseVariety(const std::string& text,
                     std::shared_ptr<const HornTheory> ambient = nullptr);

// Terms over a context: a context point, `op{p->t,q->u}` keyed by arity
// point, or positional sugar `op(t, u)` in arity carrier order.
STerm parseTerm(const std::string& text, const Structure& ctx,
                const std::vector<OpSymbol>& ops);

// Entailment goals over a structure's points: `sym(a, b)`, `sym[1/2](a, b)`,
// or `a = b`.
Goal parseGoal(const std::string& text, const HornTheory& th, const Structure& s);

// Judgements over a variety context: `def <term>` or `sym(t, u)` /
// `sym[1/2](t, u)` over terms.
LJudgement parseJudgement(const std::string& text, const Variety& V, const Structure& ctx);

}  // namespace relat
