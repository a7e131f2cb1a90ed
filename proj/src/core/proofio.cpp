#include "proofio.hpp"

#include <json.hpp>

namespace relat {

namespace {

using nlohmann::json;

constexpr int kSchema = 1;

const char* kRuleNames[] = {"Var", "Ctx", "Lim", "Mor", "E-Ar", "I-Ar", "RelAx", "Ax"};

json ratJson(const Rat& r) { return r.str(); }

Rat ratOf(const json& j) {
  if (!j.is_string()) throw std::invalid_argument("proof document: rational must be a string");
  return parseRat(j.get<std::string>());
}

json termJson(const STerm& t) {
  if (t.isVar()) return json{{"v", t.var}};
  json args = json::array();
  for (auto& a : t.args) args.push_back(termJson(a));
  return json{{"op", t.op}, {"args", std::move(args)}};
}

STerm termOf(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("proof document: bad term");
  if (j.contains("v")) return STerm::mkVar(j.at("v").get<int>());
  std::vector<STerm> args;
  for (auto& a : j.at("args")) args.push_back(termOf(a));
  return STerm::mkApp(j.at("op").get<int>(), std::move(args));
}

json judgementJson(const LJudgement& g) {
  json o;
  o["kind"] = g.kind == LJudgement::Def ? "def" : "rel";
  if (g.kind == LJudgement::Rel) {
    o["sym"] = g.sym;
    if (g.idx) o["idx"] = ratJson(*g.idx);
  }
  json ts = json::array();
  for (auto& t : g.terms) ts.push_back(termJson(t));
  o["terms"] = std::move(ts);
  return o;
}

LJudgement judgementOf(const json& j) {
  LJudgement g;
  std::string k = j.at("kind").get<std::string>();
  if (k == "def")
    g.kind = LJudgement::Def;
  else if (k == "rel")
    g.kind = LJudgement::Rel;
  else
    throw std::invalid_argument("proof document: bad judgement kind '" + k + "'");
  if (g.kind == LJudgement::Rel) {
    g.sym = j.at("sym").get<int>();
    if (j.contains("idx")) g.idx = ratOf(j.at("idx"));
  }
  for (auto& t : j.at("terms")) g.terms.push_back(termOf(t));
  return g;
}

}  // namespace

std::string proofToJson(const LProof& p) {
  json nodes = json::array();
  for (auto& n : p.nodes) {
    json o;
    o["rule"] = kRuleNames[n.rule];
    o["concl"] = judgementJson(n.concl);
    if (!n.prem.empty()) o["prem"] = n.prem;
    if (n.op >= 0) o["op"] = n.op;
    if (n.axiom >= 0) o["axiom"] = n.axiom;
    if (!n.tau.empty()) {
      json ts = json::array();
      for (auto& t : n.tau) ts.push_back(termJson(t));
      o["tau"] = std::move(ts);
    }
    if (!n.ratBind.empty()) {
      json b = json::object();
      for (auto& [k, v] : n.ratBind) b[k] = ratJson(v);
      o["ratBind"] = std::move(b);
    }
    if (n.subArg >= 0) o["subArg"] = n.subArg;
    if (!n.subPath.empty()) o["subPath"] = n.subPath;
    if (n.aritySym >= 0) o["aritySym"] = n.aritySym;
    if (n.arityIdx) o["arityIdx"] = ratJson(*n.arityIdx);
    if (!n.arityPts.empty()) o["arityPts"] = n.arityPts;
    nodes.push_back(std::move(o));
  }
  json doc{{"schema", kSchema}, {"kind", "proof"}, {"nodes", std::move(nodes)}};
  return doc.dump(2) + "\n";
}

LProof proofFromJson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (json::exception& e) {
    throw std::invalid_argument(std::string("proof document: ") + e.what());
  }
  try {
    if (doc.at("schema").get<int>() != kSchema)
      throw std::invalid_argument("proof document: unsupported schema version");
    if (doc.at("kind").get<std::string>() != "proof")
      throw std::invalid_argument("proof document: kind must be 'proof'");
    LProof p;
    for (auto& o : doc.at("nodes")) {
      LProofNode n;
      std::string r = o.at("rule").get<std::string>();
      int rule = -1;
      for (int i = 0; i < 8; i++)
        if (r == kRuleNames[i]) rule = i;
      if (rule < 0) throw std::invalid_argument("proof document: unknown rule '" + r + "'");
      n.rule = (LProofNode::Rule)rule;
      n.concl = judgementOf(o.at("concl"));
      if (o.contains("prem")) n.prem = o.at("prem").get<std::vector<int>>();
      for (int i : n.prem)
        if (i < 0 || i >= (int)p.nodes.size())
          throw std::invalid_argument("proof document: premise index out of order");
      if (o.contains("op")) n.op = o.at("op").get<int>();
      if (o.contains("axiom")) n.axiom = o.at("axiom").get<int>();
      if (o.contains("tau"))
        for (auto& t : o.at("tau")) n.tau.push_back(termOf(t));
      if (o.contains("ratBind"))
        for (auto& [k, v] : o.at("ratBind").items()) n.ratBind[k] = ratOf(v);
      if (o.contains("subArg")) n.subArg = o.at("subArg").get<int>();
      if (o.contains("subPath")) n.subPath = o.at("subPath").get<std::vector<int>>();
      if (o.contains("aritySym")) n.aritySym = o.at("aritySym").get<int>();
      if (o.contains("arityIdx")) n.arityIdx = ratOf(o.at("arityIdx"));
      if (o.contains("arityPts")) n.arityPts = o.at("arityPts").get<std::vector<int>>();
      p.nodes.push_back(std::move(n));
    }
    if (p.nodes.empty()) throw std::invalid_argument("proof document: no nodes");
    return p;
  } catch (json::exception& e) {
    throw std::invalid_argument(std::string("proof document: ") + e.what());
  }
}

}  // namespace relat
