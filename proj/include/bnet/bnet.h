/*
 * C interface to the bnet engine: discrete Bayesian-network structure
 * learning with bootstrap ensembles, exact posterior and what-if queries, and
 * SMOTE-balanced classifier evaluation.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every function returning bnet_status reports failures through the status
 * code; bnet_last_error() then describes the most recent failure on the
 * calling thread. Strings returned through char** are heap-allocated and must
 * be released with bnet_string_free.
 *
 * Handles are immutable after construction except where noted, and may be
 * shared across threads for concurrent read-only calls.
 */
#ifndef BNET_BNET_H
#define BNET_BNET_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BNET_BUILDING_LIBRARY)
#    define BNET_API __declspec(dllexport)
#  else
#    define BNET_API __declspec(dllimport)
#  endif
#else
#  define BNET_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bnet_status {
  BNET_OK = 0,
  BNET_ERR_INVALID_ARGUMENT = 1,
  BNET_ERR_IO = 2,
  BNET_ERR_PARSE = 3,
  BNET_ERR_CYCLE = 4,
  BNET_ERR_DUPLICATE_EDGE = 5,
  BNET_ERR_OVERLAP = 6,
  BNET_ERR_INCOMPLETE_ASSIGNMENT = 7,
  BNET_ERR_EMPTY_DATA = 8,
  BNET_ERR_CONSTRAINT_UNSATISFIABLE = 9,
  BNET_ERR_VAR_IN_EVIDENCE = 10,
  BNET_ERR_IMPOSSIBLE_EVIDENCE = 11,
  BNET_ERR_RAGGED_ROW = 12,
  BNET_ERR_UNKNOWN_STATE_LABEL = 13,
  BNET_ERR_EMPTY_TABLE = 14,
  BNET_ERR_MISSING_COLUMN = 15,
  BNET_ERR_UNSORTED_EDGES = 16,
  BNET_ERR_DEGENERATE_CLASS = 17,
  BNET_ERR_TOO_FEW_MINORITY = 18,
  BNET_ERR_NON_BINARY_LABEL = 19,
  BNET_ERR_SINGLE_CLASS_TRAIN = 20,
  BNET_ERR_SCHEMA_MISMATCH = 21,
  BNET_ERR_SINGLE_CLASS_LABELS = 22,
  BNET_ERR_UNKNOWN_VARIABLE = 23,
  BNET_ERR_UNKNOWN_STATE = 24,
  BNET_ERR_VALUE_OUT_OF_RANGE = 25,
  BNET_ERR_INTERNAL = 100
} bnet_status;

typedef struct bnet_table bnet_table;
typedef struct bnet_network bnet_network;
typedef struct bnet_ensemble bnet_ensemble;
typedef struct bnet_classifier bnet_classifier;

BNET_API const char* bnet_version(void);
/* Symbolic name of a status code, e.g. "ImpossibleEvidence". */
BNET_API const char* bnet_status_name(bnet_status status);
/* Message for the last failure on this thread; "" when none. */
BNET_API const char* bnet_last_error(void);
BNET_API void bnet_string_free(char* str);

/* ---- tables ---------------------------------------------------------- */

/* schema_json may be NULL (infer states) or a JSON array of
 * {name, states, ordered}. */
BNET_API bnet_status bnet_table_read_csv(const char* path, const char* schema_json, bnet_table** out);
BNET_API bnet_status bnet_table_write_csv(const bnet_table* table, const char* path);
BNET_API size_t bnet_table_rows(const bnet_table* table);
BNET_API size_t bnet_table_cols(const bnet_table* table);
BNET_API void bnet_table_free(bnet_table* table);

/* Appends an ordered `cvrics` column computed from a JSON score spec. */
BNET_API bnet_status bnet_table_append_cvrics(bnet_table* table, const char* spec_json);
/* counts_out must hold n_edges - 1 entries. */
BNET_API bnet_status bnet_table_histogram(const bnet_table* table, const char* column, const int* edges,
                                          size_t n_edges, size_t* counts_out);

/* ---- synthetic data -------------------------------------------------- */

/* Samples n rows from the bundled survey generator. Either output may be
 * NULL. cvrics_spec_json (optional) receives the matching score spec. */
BNET_API bnet_status bnet_synth(uint64_t n, uint64_t seed, bnet_table** table_out,
                                bnet_network** generator_out, char** cvrics_spec_json);
BNET_API bnet_status bnet_network_sample(const bnet_network* net, uint64_t n, uint64_t seed,
                                         bnet_table** out);

/* ---- networks -------------------------------------------------------- */

BNET_API bnet_status bnet_network_read(const char* path, bnet_network** out);
BNET_API bnet_status bnet_network_from_json(const char* json, bnet_network** out);
BNET_API bnet_status bnet_network_to_json(const bnet_network* net, char** json_out);
BNET_API bnet_status bnet_network_write(const bnet_network* net, const char* path);
/* Content hash of the canonical serialized form; identical for a network
 * and any copy written and read back. Owned by the handle. */
BNET_API const char* bnet_network_fingerprint(const bnet_network* net);
BNET_API size_t bnet_network_size(const bnet_network* net);
BNET_API void bnet_network_free(bnet_network* net);

/* JSON array of {name, states, ordered, parents}. */
BNET_API bnet_status bnet_network_variables(const bnet_network* net, char** json_out);
/* {nodes, edges:[{from,to,frequency?,support?}], replicates?}; ensemble
 * may be NULL. */
BNET_API bnet_status bnet_network_graph(const bnet_network* net, const bnet_ensemble* ensemble,
                                        char** json_out);

/* Posterior query. Request: {"target": {"variable": v, "state": s?},
 * "evidence": {name: label, ...}}. The response carries "fingerprint".
 * The key "soft_evidence" is reserved and rejected with
 * BNET_ERR_INVALID_ARGUMENT. */
BNET_API bnet_status bnet_query(const bnet_network* net, const char* request_json, char** response_json);
/* What-if query. Request: {"target": {"variable", "state"}, "evidence":
 * {...baseline}, "alternative": {...}}. */
BNET_API bnet_status bnet_whatif(const bnet_network* net, const char* request_json, char** response_json);

/* ---- structure learning ---------------------------------------------- */

typedef struct bnet_learn_options {
  uint64_t seed;
  int bootstraps;           /* default 101 */
  double threshold;         /* default 0.5 */
  double alpha;             /* default 1.0 */
  int max_parents;          /* default 4 */
  int restarts;             /* default 1 */
  unsigned threads;         /* 0 = hardware concurrency */
  const char* constraints_json; /* NULL or {forbidden, required, tiers, max_parents?} */
} bnet_learn_options;

BNET_API void bnet_learn_options_init(bnet_learn_options* options);
BNET_API bnet_status bnet_learn(const bnet_table* data, const bnet_learn_options* options,
                                bnet_ensemble** ensemble_out, bnet_network** network_out);

BNET_API bnet_status bnet_ensemble_to_json(const bnet_ensemble* ensemble, char** json_out);
BNET_API bnet_status bnet_ensemble_write(const bnet_ensemble* ensemble, const char* path);
/* Variable names are resolved against `net`. */
BNET_API bnet_status bnet_ensemble_read(const char* path, const bnet_network* net, bnet_ensemble** out);
BNET_API double bnet_ensemble_frequency(const bnet_ensemble* ensemble, const char* from, const char* to);
BNET_API void bnet_ensemble_free(bnet_ensemble* ensemble);

/* ---- classifiers ----------------------------------------------------- */

typedef enum bnet_model_kind {
  BNET_MODEL_FOREST = 0,
  BNET_MODEL_LOGISTIC = 1,
  BNET_MODEL_BOOSTED = 2
} bnet_model_kind;

typedef struct bnet_train_options {
  const char* label;
  bnet_model_kind kind;
  uint64_t seed;
  double train_fraction;    /* default 0.8 */
  int stratify;             /* default 1 */
  int smote;                /* default 1 */
  int smote_k;              /* default 5 */
  double smote_ratio;       /* default 1.0 */
  int trees;                /* forest, default 100 */
  int max_depth;            /* forest default 8; boosted uses boost_depth */
  int min_leaf;             /* default 1 */
  double feature_fraction;  /* <= 0 selects sqrt(m) */
  double learning_rate;     /* logistic, default 0.1 */
  int epochs;               /* logistic, default 1000 */
  double l2;                /* logistic, default 0.01 */
  int stages;               /* boosted, default 100 */
  int boost_depth;          /* boosted, default 3 */
  double shrinkage;         /* boosted, default 0.1 */
} bnet_train_options;

BNET_API void bnet_train_options_init(bnet_train_options* options);
/* Split -> SMOTE (training part only) -> fit. train_out/test_out may be NULL. */
BNET_API bnet_status bnet_train(const bnet_table* data, const bnet_train_options* options,
                                bnet_classifier** model_out, bnet_table** train_out, bnet_table** test_out);
BNET_API bnet_status bnet_classifier_read(const char* path, bnet_classifier** out);
BNET_API bnet_status bnet_classifier_to_json(const bnet_classifier* model, char** json_out);
BNET_API bnet_status bnet_classifier_write(const bnet_classifier* model, const char* path);
/* probabilities_out must hold bnet_table_rows(rows) entries. */
BNET_API bnet_status bnet_classifier_predict(const bnet_classifier* model, const bnet_table* rows,
                                             double* probabilities_out);
/* Column specs the model was trained on (label first), suitable as the
 * schema argument of bnet_table_read_csv. */
BNET_API bnet_status bnet_classifier_schema(const bnet_classifier* model, char** json_out);
BNET_API void bnet_classifier_free(bnet_classifier* model);

typedef struct bnet_eval_options {
  double threshold;         /* default 0.5 */
  int bootstrap;            /* default 1000 */
  uint64_t seed;
} bnet_eval_options;

BNET_API void bnet_eval_options_init(bnet_eval_options* options);
/* Metrics JSON: each metric as {value, ci95: [low, high]} plus curves. */
BNET_API bnet_status bnet_evaluate(const bnet_classifier* model, const bnet_table* test,
                                   const bnet_eval_options* options, char** metrics_json);

#ifdef __cplusplus
}  /* extern "C" */
#endif

#endif  /* BNET_BNET_H */
