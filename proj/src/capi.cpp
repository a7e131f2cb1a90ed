#include "relat/relat.h"

#include <cstdlib>
#include <cstring>
#include <sstream>

#include "core/extract.hpp"
#include "core/parse.hpp"
#include "core/proofio.hpp"

using namespace relat;

struct relat_theory {
  std::shared_ptr<const HornTheory> p;
};
struct relat_structure {
  Structure s;
};
struct relat_variety {
  std::shared_ptr<const Variety> p;
};
struct relat_proof {
  LProof p;
};

namespace {

thread_local std::string tlError;

char* dupStr(const std::string& s) {
  char* out = (char*)std::malloc(s.size() + 1);
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void setOut(char** out, const std::string& s) {
  if (out) *out = dupStr(s);
}

// Runs f, converting exceptions into the thread-local error and `bad`.
template <class T, class F>
T guarded(T bad, F&& f) {
  try {
    tlError.clear();
    return f();
  } catch (std::exception& e) {
    tlError = e.what();
    return bad;
  } catch (...) {
    tlError = "unknown error";
    return bad;
  }
}

const char* req(const char* s, const char* what) {
  if (!s) throw std::invalid_argument(std::string("null ") + what);
  return s;
}

template <class H>
const H* req(const H* h, const char* what) {
  if (!h) throw std::invalid_argument(std::string("null ") + what);
  return h;
}

// Free-algebra monad oracle over the given arities; throws when an
// approximation does not stabilize.
MonadOracle freeOracle(std::shared_ptr<const Variety> V, const std::vector<Structure>& arities,
                       int depth, long long guard, long long fuel,
                       std::shared_ptr<std::vector<FreeAlgebraApprox>>* keep) {
  auto F = std::make_shared<std::vector<FreeAlgebraApprox>>();
  for (auto& X : arities) {
    F->push_back(freeAlgebra(V, X, depth, fuel));
    if (!F->back().stabilized)
      throw std::runtime_error("free algebra over '" + (X.name.empty() ? "arity" : X.name) +
                               "' did not stabilize at depth " + std::to_string(depth));
  }
  std::vector<Structure> t;
  std::vector<Morphism> unit;
  for (auto& f : *F) {
    t.push_back(f.carrier);
    unit.push_back(f.unit);
  }
  if (keep) *keep = F;
  return makeOracle(V->theory, arities, std::move(t), std::move(unit),
                    [F](int i, int j, const Morphism& f) {
                      std::string why;
                      auto e = kleisliExtension((*F)[i], (*F)[j], f, &why);
                      if (!e) throw std::runtime_error("kleisli extension failed: " + why);
                      return *e;
                    },
                    guard);
}

std::vector<Structure> collect(const relat_structure* const* hs, int n, const char* what) {
  if (n < 0 || (n > 0 && !hs)) throw std::invalid_argument(std::string("bad ") + what);
  std::vector<Structure> out;
  for (int i = 0; i < n; i++) out.push_back(req(hs[i], what)->s);
  return out;
}

}  // namespace

extern "C" {

const char* relat_last_error(void) { return tlError.c_str(); }

void relat_string_free(char* s) { std::free(s); }

relat_theory* relat_theory_builtin(const char* name) {
  return guarded<relat_theory*>(nullptr, [&] {
    auto t = builtinTheory(req(name, "name"));
    if (!t) throw std::invalid_argument("unknown builtin theory '" + std::string(name) + "'");
    return new relat_theory{std::make_shared<HornTheory>(std::move(*t))};
  });
}

relat_theory* relat_theory_parse(const char* text) {
  return guarded<relat_theory*>(nullptr, [&] {
    return new relat_theory{std::make_shared<HornTheory>(parseTheory(req(text, "text")))};
  });
}

char* relat_theory_print(const relat_theory* t) {
  return guarded<char*>(nullptr, [&] { return dupStr(printTheory(*req(t, "theory")->p)); });
}

void relat_theory_free(relat_theory* t) { delete t; }

relat_structure* relat_structure_parse(const relat_theory* t, const char* text) {
  return guarded<relat_structure*>(nullptr, [&] {
    return new relat_structure{parseStructure(req(text, "text"), *req(t, "theory")->p)};
  });
}

char* relat_structure_print(const relat_theory* t, const relat_structure* s) {
  return guarded<char*>(nullptr, [&] {
    return dupStr(printStructure(*req(t, "theory")->p, req(s, "structure")->s));
  });
}

int relat_structure_points(const relat_structure* s) {
  return guarded<int>(RELAT_ERR, [&] { return req(s, "structure")->s.size(); });
}

void relat_structure_free(relat_structure* s) { delete s; }

relat_variety* relat_variety_parse(const char* text, const relat_theory* ambient) {
  return guarded<relat_variety*>(nullptr, [&] {
    auto v = parseVariety(req(text, "text"), ambient ? ambient->p : nullptr);
    return new relat_variety{std::make_shared<Variety>(std::move(v))};
  });
}

char* relat_variety_print(const relat_variety* v) {
  return guarded<char*>(nullptr, [&] { return dupStr(printVariety(*req(v, "variety")->p)); });
}

relat_theory* relat_variety_theory(const relat_variety* v) {
  return guarded<relat_theory*>(nullptr,
                                [&] { return new relat_theory{req(v, "variety")->p->theory}; });
}

void relat_variety_free(relat_variety* v) { delete v; }

relat_proof* relat_proof_from_json(const char* text) {
  return guarded<relat_proof*>(nullptr,
                               [&] { return new relat_proof{proofFromJson(req(text, "text"))}; });
}

char* relat_proof_to_json(const relat_proof* p) {
  return guarded<char*>(nullptr, [&] { return dupStr(proofToJson(req(p, "proof")->p)); });
}

char* relat_proof_print(const relat_variety* v, const relat_structure* ctx,
                        const relat_proof* p) {
  return guarded<char*>(nullptr, [&] {
    return dupStr(
        printProof(*req(v, "variety")->p, req(ctx, "context")->s, req(p, "proof")->p));
  });
}

void relat_proof_free(relat_proof* p) { delete p; }

int relat_is_model(const relat_theory* t, const relat_structure* s) {
  return guarded<int>(RELAT_ERR, [&] {
    return isModel(*req(t, "theory")->p, req(s, "structure")->s) ? RELAT_YES : RELAT_NO;
  });
}

relat_structure* relat_reflect(const relat_theory* t, const relat_structure* s) {
  return guarded<relat_structure*>(nullptr, [&] {
    return new relat_structure{reflect(*req(t, "theory")->p, req(s, "structure")->s)};
  });
}

char* relat_saturate_report(const relat_theory* t, const relat_structure* s, long long fuel) {
  return guarded<char*>(nullptr, [&] {
    const HornTheory& th = *req(t, "theory")->p;
    const Structure& st = req(s, "structure")->s;
    SatResult r = saturate(th, st, fuel <= 0 ? kDefaultFuel : fuel);
    std::ostringstream o;
    if (r.fuelExhausted) o << "warning: fuel exhausted, closure may be incomplete\n";
    for (int p = 0; p < st.size(); p++)
      if (r.rep[p] != p) o << "identify " << st.points[p] << " = " << st.points[r.rep[p]] << "\n";
    o << printStructure(th, reflect(th, st));
    return dupStr(o.str());
  });
}

int relat_entails(const relat_theory* t, const relat_structure* s, const char* goal,
                  long long fuel, char** derivation_out) {
  return guarded<int>(RELAT_ERR, [&] {
    const HornTheory& th = *req(t, "theory")->p;
    const Structure& st = req(s, "structure")->s;
    Goal g = parseGoal(req(goal, "goal"), th, st);
    EntailResult r = entails(th, st, g, fuel <= 0 ? kDefaultFuel : fuel);
    if (r.status == EntailStatus::FuelExhausted) return (int)RELAT_EXHAUSTED;
    if (r.status == EntailStatus::NotDerivable) return (int)RELAT_NO;
    if (derivation_out && r.derivation)
      setOut(derivation_out, printDerivation(th, st, *r.derivation));
    return (int)RELAT_YES;
  });
}

relat_structure* relat_hom(const relat_theory* t, const relat_structure* x,
                           const relat_structure* y, long long guard) {
  (void)t;
  return guarded<relat_structure*>(nullptr, [&] {
    return new relat_structure{internalHom(req(x, "structure")->s, req(y, "structure")->s,
                                           guard <= 0 ? kDefaultGuard : guard)};
  });
}

relat_structure* relat_tensor(const relat_theory* t, const relat_structure* x,
                              const relat_structure* y) {
  return guarded<relat_structure*>(nullptr, [&] {
    return new relat_structure{
        manhattan(*req(t, "theory")->p, req(x, "structure")->s, req(y, "structure")->s)};
  });
}

int relat_derive(const relat_variety* v, const relat_structure* ctx, const char* goal,
                 int depth, long long fuel, relat_proof** proof_out) {
  return guarded<int>(RELAT_ERR, [&] {
    auto V = req(v, "variety")->p;
    const Structure& X = req(ctx, "context")->s;
    LJudgement j = parseJudgement(req(goal, "goal"), *V, X);
    DeriveResult r = derive(V, X, j, depth, fuel <= 0 ? 200000 : fuel);
    if (r.status == DeriveStatus::DepthExhausted) return (int)RELAT_EXHAUSTED;
    if (r.status == DeriveStatus::NotDerivable) return (int)RELAT_NO;
    if (proof_out) *proof_out = new relat_proof{std::move(*r.proof)};
    return (int)RELAT_YES;
  });
}

int relat_check_proof(const relat_variety* v, const relat_structure* ctx,
                      const relat_proof* p, char** why_out) {
  return guarded<int>(RELAT_ERR, [&] {
    std::string why;
    bool ok = checkProof(*req(v, "variety")->p, req(ctx, "context")->s, req(p, "proof")->p, &why);
    if (!ok) setOut(why_out, why);
    return ok ? (int)RELAT_YES : (int)RELAT_NO;
  });
}

int relat_free_algebra(const relat_variety* v, const relat_structure* ctx, int depth,
                       long long fuel, char** report_out) {
  return guarded<int>(RELAT_ERR, [&] {
    auto V = req(v, "variety")->p;
    const Structure& X = req(ctx, "context")->s;
    FreeAlgebraApprox F = freeAlgebra(V, X, depth, fuel <= 0 ? 200000 : fuel);
    std::ostringstream o;
    o << "stabilized: " << (F.stabilized ? "yes" : "no") << "\n";
    o << "classes: " << F.reps.size() << "\n";
    for (size_t i = 0; i < F.reps.size(); i++)
      o << "class " << i << ": " << termStr(F.reps[i], X, V->ops) << "\n";
    for (int x = 0; x < X.size(); x++) o << "unit " << X.points[x] << " -> class " << F.unit[x] << "\n";
    o << printStructure(*V->theory, F.carrier);
    setOut(report_out, o.str());
    return F.stabilized ? (int)RELAT_YES : (int)RELAT_NO;
  });
}

long long relat_count_algebras(const relat_variety* v, const relat_structure* carrier,
                               long long guard, char** report_out) {
  return guarded<long long>(RELAT_ERR, [&] {
    auto V = req(v, "variety")->p;
    auto algs = enumerateAlgebras(V, {req(carrier, "carrier")->s},
                                  guard <= 0 ? kDefaultGuard : guard, true);
    std::ostringstream o;
    o << "algebras: " << algs.size() << "\n";
    for (size_t a = 0; a < algs.size(); a++) {
      o << "algebra " << a << "\n";
      for (size_t op = 0; op < V->ops.size(); op++) {
        o << "  " << V->ops[op].name << ":";
        for (size_t j = 0; j < algs[a].homs[op].size(); j++) {
          o << " [";
          for (size_t k = 0; k < algs[a].homs[op][j].size(); k++)
            o << (k ? "," : "") << algs[a].homs[op][j][k];
          o << "]->" << algs[a].interp[op][j];
        }
        o << "\n";
      }
    }
    setOut(report_out, o.str());
    return (long long)algs.size();
  });
}

int relat_monad_laws(const relat_variety* v, const relat_structure* const* objs, int nobjs,
                     int depth, long long guard, long long fuel, char** report_out) {
  return guarded<int>(RELAT_ERR, [&] {
    auto V = req(v, "variety")->p;
    auto objects = collect(objs, nobjs, "object");
    if (objects.empty()) throw std::invalid_argument("no objects given");
    MonadLawReport r = checkMonadLaws(V, objects, depth, guard <= 0 ? kDefaultGuard : guard,
                                      fuel <= 0 ? 200000 : fuel);
    std::ostringstream o;
    if (r.ok)
      o << "unit checks: " << r.unitChecks << "\nassociativity checks: " << r.assocChecks
        << "\nenrichment checks: " << r.enrichChecks << "\n";
    else
      o << "violation: " << r.detail << "\n";
    setOut(report_out, o.str());
    return r.ok ? (int)RELAT_YES : (int)RELAT_NO;
  });
}

char* relat_extract(const relat_variety* v, const relat_structure* const* arities,
                    int narities, int depth, long long guard, long long fuel) {
  return guarded<char*>(nullptr, [&] {
    auto V = req(v, "variety")->p;
    auto ars = collect(arities, narities, "arity");
    if (ars.empty()) throw std::invalid_argument("no arities given");
    MonadOracle M = freeOracle(V, ars, depth, guard <= 0 ? kDefaultGuard : guard,
                               fuel <= 0 ? 200000 : fuel, nullptr);
    std::vector<int> idx(ars.size());
    for (size_t i = 0; i < idx.size(); i++) idx[i] = (int)i;
    InducedTheory I = induceTheory(M, idx, guard <= 0 ? kDefaultGuard : guard);
    return dupStr(printVariety(*I.variety));
  });
}

int relat_roundtrip(const relat_variety* v, const relat_structure* const* arities,
                    int narities, const relat_structure* const* palette, int npalette,
                    int depth, long long guard, long long fuel, char** report_out) {
  return guarded<int>(RELAT_ERR, [&] {
    auto V = req(v, "variety")->p;
    auto ars = collect(arities, narities, "arity");
    auto pal = collect(palette, npalette, "palette");
    if (ars.empty()) throw std::invalid_argument("no arities given");
    if (pal.empty()) throw std::invalid_argument("no palette carriers given");
    RoundtripReport r = verifyRoundtrip(V, ars, pal, depth, guard <= 0 ? kDefaultGuard : guard,
                                        fuel <= 0 ? 200000 : fuel);
    std::ostringstream o;
    if (r.ok)
      o << "canonical algebras verified: " << r.canonicalChecks
        << "\nuniversal extensions verified: " << r.extensionChecks << "\n";
    else
      o << "violation: " << r.detail << "\n";
    setOut(report_out, o.str());
    return r.ok ? (int)RELAT_YES : (int)RELAT_NO;
  });
}

}  // extern "C"
