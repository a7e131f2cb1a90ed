#ifndef RELAT_H
#define RELAT_H

/* C interface to the relational-theory workbench. All handles are opaque;
 * functions that can fail return NULL or a negative value and leave a
 * message in relat_last_error(). Strings returned as char* are owned by the
 * caller and released with relat_string_free(). */

#ifdef __cplusplus
extern "C" {
#endif

typedef struct relat_theory relat_theory;
typedef struct relat_structure relat_structure;
typedef struct relat_variety relat_variety;
typedef struct relat_proof relat_proof;

/* Outcome codes shared by query-style calls. */
enum {
  RELAT_YES = 0,       /* derivable / holds / succeeded */
  RELAT_NO = 1,        /* well-formed query answered negatively */
  RELAT_EXHAUSTED = 2, /* depth or fuel bound hit before an answer */
  RELAT_ERR = -1       /* invalid input; see relat_last_error() */
};

const char* relat_last_error(void);
void relat_string_free(char* s);

/* ---- theories ---- */
relat_theory* relat_theory_builtin(const char* name); /* set | pos | met */
relat_theory* relat_theory_parse(const char* text);
char* relat_theory_print(const relat_theory* t);
void relat_theory_free(relat_theory* t);

/* ---- structures ---- */
relat_structure* relat_structure_parse(const relat_theory* t, const char* text);
char* relat_structure_print(const relat_theory* t, const relat_structure* s);
int relat_structure_points(const relat_structure* s);
void relat_structure_free(relat_structure* s);

/* ---- varieties ---- */
/* `ambient` may be NULL; the `over` clause then resolves builtins only. */
relat_variety* relat_variety_parse(const char* text, const relat_theory* ambient);
char* relat_variety_print(const relat_variety* v);
relat_theory* relat_variety_theory(const relat_variety* v); /* new handle */
void relat_variety_free(relat_variety* v);

/* ---- proofs ---- */
relat_proof* relat_proof_from_json(const char* text);
char* relat_proof_to_json(const relat_proof* p);
char* relat_proof_print(const relat_variety* v, const relat_structure* ctx,
                        const relat_proof* p);
void relat_proof_free(relat_proof* p);

/* ---- horn-level operations ---- */
/* RELAT_YES when s is closed under every axiom of t, RELAT_NO otherwise. */
int relat_is_model(const relat_theory* t, const relat_structure* s);
/* Quotient by derivable equality carrying exactly the derivable edges. */
relat_structure* relat_reflect(const relat_theory* t, const relat_structure* s);
/* Report of the saturation fixpoint: identifications plus the closed
 * structure over representatives. */
char* relat_saturate_report(const relat_theory* t, const relat_structure* s,
                            long long fuel);
/* Goal text over the structure's points: `sym(a, b)`, `sym[1/2](a, b)`, or
 * `a = b`. Returns RELAT_YES/NO/EXHAUSTED; on YES, *derivation_out (when
 * non-NULL) receives the printed derivation tree. */
int relat_entails(const relat_theory* t, const relat_structure* s, const char* goal,
                  long long fuel, char** derivation_out);

/* ---- structure operations ---- */
relat_structure* relat_hom(const relat_theory* t, const relat_structure* x,
                           const relat_structure* y, long long guard);
/* Reflected tensor product (Manhattan product over the metric theory). */
relat_structure* relat_tensor(const relat_theory* t, const relat_structure* x,
                              const relat_structure* y);

/* ---- relational logic ---- */
/* Goal text: `def <term>` or `sym(t, u)` / `sym[1/2](t, u)` over terms
 * `point` | `op{p->t,q->u}` | `op(t, u)`. Returns RELAT_YES/NO/EXHAUSTED; on
 * YES, *proof_out (when non-NULL) receives the proof. */
int relat_derive(const relat_variety* v, const relat_structure* ctx, const char* goal,
                 int depth, long long fuel, relat_proof** proof_out);
/* RELAT_YES when the proof replays; RELAT_NO with the violation in
 * *why_out (when non-NULL). */
int relat_check_proof(const relat_variety* v, const relat_structure* ctx,
                      const relat_proof* p, char** why_out);

/* ---- free algebras ---- */
/* Report: class representatives, the carrier structure, the unit, and
 * whether the approximation stabilized (returned as RELAT_YES/NO). */
int relat_free_algebra(const relat_variety* v, const relat_structure* ctx, int depth,
                       long long fuel, char** report_out);

/* ---- algebras ---- */
/* Number of v-algebras on the carrier up to isomorphism; the report lists
 * each algebra's operation tables. */
long long relat_count_algebras(const relat_variety* v, const relat_structure* carrier,
                               long long guard, char** report_out);

/* ---- monads and induced theories ---- */
/* Kleisli laws and enrichment of the free-algebra monad of v over the given
 * objects. RELAT_YES/NO; report has per-law counts or the violation. */
int relat_monad_laws(const relat_variety* v, const relat_structure* const* objs, int nobjs,
                     int depth, long long guard, long long fuel, char** report_out);
/* The theory induced by the free-algebra monad of v over the given arities,
 * printed in the variety format. */
char* relat_extract(const relat_variety* v, const relat_structure* const* arities,
                    int narities, int depth, long long guard, long long fuel);
/* Full monad-to-theory roundtrip check against every induced-variety algebra
 * over the palette carriers. RELAT_YES/NO. */
int relat_roundtrip(const relat_variety* v, const relat_structure* const* arities,
                    int narities, const relat_structure* const* palette, int npalette,
                    int depth, long long guard, long long fuel, char** report_out);

#ifdef __cplusplus
}
#endif

#endif /* RELAT_H */
