// Command-line front end. All core functionality is reached through the C
// API in relat/relat.h; this file only parses arguments, reads files and
// formats output. Exit codes: 0 success, 1 negative answer, 2 usage or
// parse error.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "relat/relat.h"

namespace {

using nlohmann::json;

constexpr int kSchema = 1;

struct Usage : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Usage("cannot read '" + path + "'");
  std::ostringstream o;
  o << in.rdbuf();
  return o.str();
}

std::string takeString(char* s) {
  std::string out = s ? s : "";
  relat_string_free(s);
  return out;
}

using TheoryPtr = std::unique_ptr<relat_theory, decltype(&relat_theory_free)>;
using StructPtr = std::unique_ptr<relat_structure, decltype(&relat_structure_free)>;
using VarietyPtr = std::unique_ptr<relat_variety, decltype(&relat_variety_free)>;
using ProofPtr = std::unique_ptr<relat_proof, decltype(&relat_proof_free)>;

[[noreturn]] void fail() { throw Usage(relat_last_error()); }

// A builtin name (set, pos, met) or a theory file path.
TheoryPtr loadTheory(const std::string& arg) {
  if (std::ifstream(arg).good()) {
    relat_theory* t = relat_theory_parse(readFile(arg).c_str());
    if (!t) fail();
    return {t, relat_theory_free};
  }
  relat_theory* t = relat_theory_builtin(arg.c_str());
  if (!t) throw Usage("'" + arg + "' is neither a readable file nor a builtin theory");
  return {t, relat_theory_free};
}

StructPtr loadStructure(const relat_theory* th, const std::string& path) {
  relat_structure* s = relat_structure_parse(th, readFile(path).c_str());
  if (!s) fail();
  return {s, relat_structure_free};
}

VarietyPtr loadVariety(const std::string& path, const relat_theory* ambient) {
  relat_variety* v = relat_variety_parse(readFile(path).c_str(), ambient);
  if (!v) fail();
  return {v, relat_variety_free};
}

// Shared state threaded through every subcommand.
struct Ctx {
  bool jsonOut = false;
  int depth = 2;
  long long guard = 0;  // 0: library default (or RELAT_GUARD)
  std::string theoryArg, structureArg, varietyArg, contextArg, goalArg, proofArg, carrierArg;
  std::vector<std::string> structureArgs, objectArgs, arityArgs, paletteArgs;
};

void emit(const Ctx& c, const std::string& command, json fields, const std::string& text) {
  if (c.jsonOut) {
    fields["schema"] = kSchema;
    fields["command"] = command;
    std::cout << fields.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

int cmdReflect(const Ctx& c) {
  auto th = loadTheory(c.theoryArg);
  auto st = loadStructure(th.get(), c.structureArg);
  relat_structure* r = relat_reflect(th.get(), st.get());
  if (!r) fail();
  StructPtr rp(r, relat_structure_free);
  std::string text = takeString(relat_structure_print(th.get(), r));
  emit(c, "reflect", {{"structure", text}, {"points", relat_structure_points(r)}}, text);
  return 0;
}

int cmdSaturate(const Ctx& c) {
  auto th = loadTheory(c.theoryArg);
  auto st = loadStructure(th.get(), c.structureArg);
  if (!c.goalArg.empty()) {
    char* deriv = nullptr;
    int r = relat_entails(th.get(), st.get(), c.goalArg.c_str(), c.guard, &deriv);
    std::string d = takeString(deriv);
    if (r == RELAT_ERR) fail();
    const char* status = r == RELAT_YES ? "derivable"
                         : r == RELAT_NO ? "not-derivable"
                                         : "fuel-exhausted";
    emit(c, "saturate", {{"goal", c.goalArg}, {"status", status}, {"derivation", d}},
         std::string(status) + "\n" + d);
    return r == RELAT_YES ? 0 : 1;
  }
  char* rep = relat_saturate_report(th.get(), st.get(), c.guard);
  if (!rep) fail();
  std::string text = takeString(rep);
  emit(c, "saturate", {{"report", text}}, text);
  return 0;
}

int cmdCheckModel(const Ctx& c) {
  auto th = loadTheory(c.theoryArg);
  auto st = loadStructure(th.get(), c.structureArg);
  int r = relat_is_model(th.get(), st.get());
  if (r == RELAT_ERR) fail();
  emit(c, "check-model", {{"model", r == RELAT_YES}},
       r == RELAT_YES ? "model: yes\n" : "model: no\n");
  return r == RELAT_YES ? 0 : 1;
}

VarietyPtr loadVarietyWithAmbient(const Ctx& c) {
  TheoryPtr ambient(nullptr, relat_theory_free);
  if (!c.theoryArg.empty()) ambient = loadTheory(c.theoryArg);
  return loadVariety(c.varietyArg, ambient.get());
}

int cmdDerive(const Ctx& c) {
  auto v = loadVarietyWithAmbient(c);
  TheoryPtr th(relat_variety_theory(v.get()), relat_theory_free);
  auto ctx = loadStructure(th.get(), c.contextArg);
  relat_proof* proof = nullptr;
  int r = relat_derive(v.get(), ctx.get(), c.goalArg.c_str(), c.depth, c.guard, &proof);
  if (r == RELAT_ERR) fail();
  ProofPtr pp(proof, relat_proof_free);
  const char* status = r == RELAT_YES ? "derived"
                       : r == RELAT_NO ? "not-derivable"
                                       : "depth-exhausted";
  json fields{{"goal", c.goalArg}, {"depth", c.depth}, {"status", status}};
  std::string text = std::string(status) + "\n";
  if (proof) {
    std::string doc = takeString(relat_proof_to_json(proof));
    if (!c.proofArg.empty()) {
      std::ofstream out(c.proofArg, std::ios::binary);
      if (!out) throw Usage("cannot write '" + c.proofArg + "'");
      out << doc;
    }
    fields["proof"] = json::parse(doc);
    text += takeString(relat_proof_print(v.get(), ctx.get(), proof));
  }
  emit(c, "derive", std::move(fields), text);
  return r == RELAT_YES ? 0 : 1;
}

int cmdCheckProof(const Ctx& c) {
  auto v = loadVarietyWithAmbient(c);
  TheoryPtr th(relat_variety_theory(v.get()), relat_theory_free);
  auto ctx = loadStructure(th.get(), c.contextArg);
  relat_proof* p = relat_proof_from_json(readFile(c.proofArg).c_str());
  if (!p) fail();
  ProofPtr pp(p, relat_proof_free);
  char* why = nullptr;
  int r = relat_check_proof(v.get(), ctx.get(), p, &why);
  std::string w = takeString(why);
  if (r == RELAT_ERR) fail();
  emit(c, "check-proof", {{"ok", r == RELAT_YES}, {"why", w}},
       r == RELAT_YES ? "proof ok\n" : "proof rejected: " + w + "\n");
  return r == RELAT_YES ? 0 : 1;
}

int cmdFree(const Ctx& c) {
  auto v = loadVarietyWithAmbient(c);
  TheoryPtr th(relat_variety_theory(v.get()), relat_theory_free);
  auto ctx = loadStructure(th.get(), c.contextArg);
  char* rep = nullptr;
  int r = relat_free_algebra(v.get(), ctx.get(), c.depth, c.guard, &rep);
  std::string text = takeString(rep);
  if (r == RELAT_ERR) fail();
  emit(c, "free", {{"stabilized", r == RELAT_YES}, {"report", text}}, text);
  return r == RELAT_YES ? 0 : 1;
}

int cmdCheckAlgebra(const Ctx& c) {
  auto v = loadVarietyWithAmbient(c);
  TheoryPtr th(relat_variety_theory(v.get()), relat_theory_free);
  auto carrier = loadStructure(th.get(), c.carrierArg);
  char* rep = nullptr;
  long long n = relat_count_algebras(v.get(), carrier.get(), c.guard, &rep);
  std::string text = takeString(rep);
  if (n < 0) fail();
  emit(c, "check-algebra", {{"algebras", n}, {"report", text}}, text);
  return n > 0 ? 0 : 1;
}

int cmdHomOrTensor(const Ctx& c, bool tensor) {
  auto th = loadTheory(c.theoryArg);
  if (c.structureArgs.size() != 2) throw Usage("expected exactly two structure files");
  auto x = loadStructure(th.get(), c.structureArgs[0]);
  auto y = loadStructure(th.get(), c.structureArgs[1]);
  relat_structure* r = tensor ? relat_tensor(th.get(), x.get(), y.get())
                              : relat_hom(th.get(), x.get(), y.get(), c.guard);
  if (!r) fail();
  StructPtr rp(r, relat_structure_free);
  std::string text = takeString(relat_structure_print(th.get(), r));
  emit(c, tensor ? "tensor" : "hom",
       {{"structure", text}, {"points", relat_structure_points(r)}}, text);
  return 0;
}

std::vector<StructPtr> loadAll(const relat_theory* th, const std::vector<std::string>& paths) {
  std::vector<StructPtr> out;
  for (auto& p : paths) out.push_back(loadStructure(th, p));
  return out;
}

std::vector<const relat_structure*> rawPtrs(const std::vector<StructPtr>& v) {
  std::vector<const relat_structure*> out;
  for (auto& p : v) out.push_back(p.get());
  return out;
}

int cmdMonadLaws(const Ctx& c) {
  auto v = loadVarietyWithAmbient(c);
  TheoryPtr th(relat_variety_theory(v.get()), relat_theory_free);
  auto objs = loadAll(th.get(), c.objectArgs);
  auto raw = rawPtrs(objs);
  char* rep = nullptr;
  int r = relat_monad_laws(v.get(), raw.data(), (int)raw.size(), c.depth, c.guard, c.guard, &rep);
  std::string text = takeString(rep);
  if (r == RELAT_ERR) fail();
  emit(c, "monad-laws", {{"ok", r == RELAT_YES}, {"report", text}}, text);
  return r == RELAT_YES ? 0 : 1;
}

int cmdExtract(const Ctx& c) {
  auto v = loadVarietyWithAmbient(c);
  TheoryPtr th(relat_variety_theory(v.get()), relat_theory_free);
  auto ars = loadAll(th.get(), c.arityArgs);
  auto raw = rawPtrs(ars);
  char* out = relat_extract(v.get(), raw.data(), (int)raw.size(), c.depth, c.guard, c.guard);
  if (!out) fail();
  std::string text = takeString(out);
  emit(c, "extract", {{"variety", text}}, text);
  return 0;
}

int cmdRoundtrip(const Ctx& c) {
  auto v = loadVarietyWithAmbient(c);
  TheoryPtr th(relat_variety_theory(v.get()), relat_theory_free);
  auto ars = loadAll(th.get(), c.arityArgs);
  auto pal = loadAll(th.get(), c.paletteArgs);
  auto rawA = rawPtrs(ars);
  auto rawP = rawPtrs(pal);
  char* rep = nullptr;
  int r = relat_roundtrip(v.get(), rawA.data(), (int)rawA.size(), rawP.data(), (int)rawP.size(),
                          c.depth, c.guard, c.guard, &rep);
  std::string text = takeString(rep);
  if (r == RELAT_ERR) fail();
  emit(c, "roundtrip", {{"ok", r == RELAT_YES}, {"report", text}}, text);
  return r == RELAT_YES ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for relational algebraic theories"};
  app.require_subcommand(1);

  Ctx c;
  if (const char* g = std::getenv("RELAT_GUARD")) c.guard = std::atoll(g);

  auto addCommon = [&](CLI::App* s) {
    s->add_flag("--json", c.jsonOut, "machine-readable output");
    s->add_option("--guard", c.guard, "enumeration guard / derivation fuel");
  };
  auto addDepth = [&](CLI::App* s) { s->add_option("--depth", c.depth, "term depth bound"); };

  CLI::App* reflect = app.add_subcommand("reflect", "quotient a pre-structure into a model");
  reflect->add_option("--theory", c.theoryArg, "theory file or builtin name")->required();
  reflect->add_option("--structure", c.structureArg, "structure file")->required();
  addCommon(reflect);

  CLI::App* saturate = app.add_subcommand("saturate", "saturation closure or goal entailment");
  saturate->add_option("--theory", c.theoryArg)->required();
  saturate->add_option("--structure", c.structureArg)->required();
  saturate->add_option("--goal", c.goalArg, "entailment goal over the structure's points");
  addCommon(saturate);

  CLI::App* checkModel = app.add_subcommand("check-model", "is the structure a model?");
  checkModel->add_option("--theory", c.theoryArg)->required();
  checkModel->add_option("--structure", c.structureArg)->required();
  addCommon(checkModel);

  CLI::App* derive = app.add_subcommand("derive", "derive a judgement over a variety context");
  derive->add_option("--variety", c.varietyArg)->required();
  derive->add_option("--theory", c.theoryArg, "ambient theory for the variety's over-clause");
  derive->add_option("--context", c.contextArg)->required();
  derive->add_option("--goal", c.goalArg)->required();
  derive->add_option("--proof", c.proofArg, "write the proof document here");
  addDepth(derive);
  addCommon(derive);

  CLI::App* checkProof = app.add_subcommand("check-proof", "replay a proof document");
  checkProof->add_option("--variety", c.varietyArg)->required();
  checkProof->add_option("--theory", c.theoryArg);
  checkProof->add_option("--context", c.contextArg)->required();
  checkProof->add_option("--proof", c.proofArg)->required();
  addCommon(checkProof);

  CLI::App* freeCmd = app.add_subcommand("free", "free algebra over a context");
  freeCmd->add_option("--variety", c.varietyArg)->required();
  freeCmd->add_option("--theory", c.theoryArg);
  freeCmd->add_option("--context", c.contextArg)->required();
  addDepth(freeCmd);
  addCommon(freeCmd);

  CLI::App* checkAlg = app.add_subcommand("check-algebra", "enumerate algebras on a carrier");
  checkAlg->add_option("--variety", c.varietyArg)->required();
  checkAlg->add_option("--theory", c.theoryArg);
  checkAlg->add_option("--carrier", c.carrierArg)->required();
  addCommon(checkAlg);

  CLI::App* hom = app.add_subcommand("hom", "internal hom [X, Y]");
  hom->add_option("--theory", c.theoryArg)->required();
  hom->add_option("structures", c.structureArgs, "two structure files")->expected(2);
  addCommon(hom);

  CLI::App* tensor = app.add_subcommand("tensor", "reflected tensor product");
  tensor->add_option("--theory", c.theoryArg)->required();
  tensor->add_option("structures", c.structureArgs, "two structure files")->expected(2);
  addCommon(tensor);

  CLI::App* monad = app.add_subcommand("monad-laws", "Kleisli laws of the free-algebra monad");
  monad->add_option("--variety", c.varietyArg)->required();
  monad->add_option("--theory", c.theoryArg);
  monad->add_option("--object", c.objectArgs, "object structure file (repeatable)")->required();
  addDepth(monad);
  addCommon(monad);

  CLI::App* extract = app.add_subcommand("extract", "theory induced by the free-algebra monad");
  extract->add_option("--variety", c.varietyArg)->required();
  extract->add_option("--theory", c.theoryArg);
  extract->add_option("--arity", c.arityArgs, "arity structure file (repeatable)")->required();
  addDepth(extract);
  addCommon(extract);

  CLI::App* roundtrip = app.add_subcommand("roundtrip", "monad-to-theory roundtrip check");
  roundtrip->add_option("--variety", c.varietyArg)->required();
  roundtrip->add_option("--theory", c.theoryArg);
  roundtrip->add_option("--arity", c.arityArgs)->required();
  roundtrip->add_option("--palette", c.paletteArgs, "carrier structure file (repeatable)")
      ->required();
  addDepth(roundtrip);
  addCommon(roundtrip);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int r = app.exit(e);
    return r == 0 ? 0 : 2;  // --help and friends exit 0
  }

  try {
    if (reflect->parsed()) return cmdReflect(c);
    if (saturate->parsed()) return cmdSaturate(c);
    if (checkModel->parsed()) return cmdCheckModel(c);
    if (derive->parsed()) return cmdDerive(c);
    if (checkProof->parsed()) return cmdCheckProof(c);
    if (freeCmd->parsed()) return cmdFree(c);
    if (checkAlg->parsed()) return cmdCheckAlgebra(c);
    if (hom->parsed()) return cmdHomOrTensor(c, false);
    if (tensor->parsed()) return cmdHomOrTensor(c, true);
    if (monad->parsed()) return cmdMonadLaws(c);
    if (extract->parsed()) return cmdExtract(c);
    if (roundtrip->parsed()) return cmdRoundtrip(c);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
