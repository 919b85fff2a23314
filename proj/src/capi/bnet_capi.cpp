#include "bnet/bnet.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "bnet/error.hpp"
#include "bnet/serialize.hpp"
#include "bnet/synth.hpp"
#include "bnet/workflow.hpp"

struct bnet_table {
  bnet::DatasetTable table;
};

struct bnet_network {
  explicit bnet_network(bnet::BayesianNetwork n)
      : net(std::move(n)), canonical(bnet::dump(bnet::network_to_json(net))), hash(bnet::fingerprint(canonical)) {}
  bnet::BayesianNetwork net;
  std::string canonical;
  std::string hash;
};

struct bnet_ensemble {
  bnet::EnsembleSummary summary;
  std::vector<bnet::VariableSpec> variables;
};

struct bnet_classifier {
  bnet::Classifier model;
};

namespace {

thread_local std::string last_error;

bnet_status set_error(bnet_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
bnet_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return BNET_OK;
  } catch (const bnet::Error& e) {
    return set_error(static_cast<bnet_status>(e.kind()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return set_error(BNET_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(BNET_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(BNET_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(BNET_ERR_INTERNAL, "unknown failure");
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) bnet::fail(bnet::ErrorKind::InvalidArgument, std::string(what) + " must not be null");
}

char* copy_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void emit(char** out, const bnet::Json& doc) { *out = copy_string(bnet::dump(doc)); }

bnet::Json with_fingerprint(bnet::Json doc, const bnet_network* net) {
  doc["fingerprint"] = net->hash;
  return doc;
}

}  // namespace

extern "C" {

const char* bnet_version(void) { return BNET_VERSION_STRING; }

const char* bnet_status_name(bnet_status status) {
  if (status == BNET_OK) return "Ok";
  if (status == BNET_ERR_INTERNAL) return "Internal";
  if (status >= 1 && status <= BNET_ERR_VALUE_OUT_OF_RANGE) {
    return bnet::to_string(static_cast<bnet::ErrorKind>(status));
  }
  return "Unknown";
}

const char* bnet_last_error(void) { return last_error.c_str(); }

void bnet_string_free(char* str) { delete[] str; }

bnet_status bnet_table_read_csv(const char* path, const char* schema_json, bnet_table** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    std::optional<std::vector<bnet::VariableSpec>> schema;
    if (schema_json != nullptr) schema = bnet::variables_from_json(bnet::parse_json(schema_json));
    *out = new bnet_table{bnet::read_csv_file(path, schema)};
  });
}

bnet_status bnet_table_write_csv(const bnet_table* table, const char* path) {
  return guarded([&] {
    require(table, "table");
    require(path, "path");
    bnet::write_csv_file(path, table->table);
  });
}

size_t bnet_table_rows(const bnet_table* table) { return table ? table->table.rows() : 0; }
size_t bnet_table_cols(const bnet_table* table) { return table ? table->table.cols() : 0; }
void bnet_table_free(bnet_table* table) { delete table; }

bnet_status bnet_table_append_cvrics(bnet_table* table, const char* spec_json) {
  return guarded([&] {
    require(table, "table");
    require(spec_json, "spec_json");
    bnet::append_cvrics(table->table, bnet::cvrics_from_json(bnet::parse_json(spec_json)));
  });
}

bnet_status bnet_table_histogram(const bnet_table* table, const char* column, const int* edges, size_t n_edges,
                                 size_t* counts_out) {
  return guarded([&] {
    require(table, "table");
    require(column, "column");
    require(edges, "edges");
    require(counts_out, "counts_out");
    const std::size_t c = table->table.column_index(column);
    // Histogram over the numeric labels, not the state indices.
    std::vector<int> values;
    values.reserve(table->table.rows());
    const auto& spec = table->table.column(c);
    for (std::size_t r = 0; r < table->table.rows(); ++r) {
      const int s = table->table.at(r, c);
      if (s == bnet::kMissing) continue;
      try {
        std::size_t used = 0;
        const std::string& label = spec.states[s];
        const int v = std::stoi(label, &used);
        if (used != label.size()) throw std::invalid_argument(label);
        values.push_back(v);
      } catch (const std::logic_error&) {
        bnet::fail(bnet::ErrorKind::InvalidArgument, "column '" + spec.name + "' has non-integer state labels");
      }
    }
    const auto counts = bnet::histogram(values, std::span<const int>(edges, n_edges));
    std::copy(counts.begin(), counts.end(), counts_out);
  });
}

bnet_status bnet_synth(uint64_t n, uint64_t seed, bnet_table** table_out, bnet_network** generator_out,
                       char** cvrics_spec_json) {
  return guarded([&] {
    auto gen = bnet::survey_generator();
    std::optional<bnet::DatasetTable> table;
    if (table_out != nullptr) table = bnet::forward_sample(gen, n, seed);
    std::string spec = bnet::dump(bnet::cvrics_to_json(bnet::survey_cvrics_spec()));
    bnet_network* g = generator_out ? new bnet_network(std::move(gen)) : nullptr;
    if (table_out) *table_out = new bnet_table{std::move(*table)};
    if (generator_out) *generator_out = g;
    if (cvrics_spec_json) *cvrics_spec_json = copy_string(spec);
  });
}

bnet_status bnet_network_sample(const bnet_network* net, uint64_t n, uint64_t seed, bnet_table** out) {
  return guarded([&] {
    require(net, "net");
    require(out, "out");
    *out = new bnet_table{bnet::forward_sample(net->net, n, seed)};
  });
}

bnet_status bnet_network_read(const char* path, bnet_network** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new bnet_network(bnet::network_from_json(bnet::read_json_file(path)));
  });
}

bnet_status bnet_network_from_json(const char* json, bnet_network** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new bnet_network(bnet::network_from_json(bnet::parse_json(json)));
  });
}

bnet_status bnet_network_to_json(const bnet_network* net, char** json_out) {
  return guarded([&] {
    require(net, "net");
    require(json_out, "json_out");
    *json_out = copy_string(net->canonical);
  });
}

bnet_status bnet_network_write(const bnet_network* net, const char* path) {
  return guarded([&] {
    require(net, "net");
    require(path, "path");
    bnet::write_file(path, net->canonical);
  });
}

const char* bnet_network_fingerprint(const bnet_network* net) { return net ? net->hash.c_str() : ""; }
size_t bnet_network_size(const bnet_network* net) { return net ? static_cast<size_t>(net->net.size()) : 0; }
void bnet_network_free(bnet_network* net) { delete net; }

bnet_status bnet_network_variables(const bnet_network* net, char** json_out) {
  return guarded([&] {
    require(net, "net");
    require(json_out, "json_out");
    emit(json_out, bnet::describe_variables(net->net));
  });
}

bnet_status bnet_network_graph(const bnet_network* net, const bnet_ensemble* ensemble, char** json_out) {
  return guarded([&] {
    require(net, "net");
    require(json_out, "json_out");
    std::optional<bnet::EnsembleSummary> summary;
    if (ensemble) summary = ensemble->summary;
    emit(json_out, bnet::describe_graph(net->net, summary));
  });
}

bnet_status bnet_query(const bnet_network* net, const char* request_json, char** response_json) {
  return guarded([&] {
    require(net, "net");
    require(request_json, "request_json");
    require(response_json, "response_json");
    emit(response_json, with_fingerprint(bnet::run_query(net->net, bnet::parse_json(request_json)), net));
  });
}

bnet_status bnet_whatif(const bnet_network* net, const char* request_json, char** response_json) {
  return guarded([&] {
    require(net, "net");
    require(request_json, "request_json");
    require(response_json, "response_json");
    emit(response_json, with_fingerprint(bnet::run_whatif(net->net, bnet::parse_json(request_json)), net));
  });
}

void bnet_learn_options_init(bnet_learn_options* options) {
  if (options == nullptr) return;
  const bnet::LearnOptions d;
  options->seed = d.seed;
  options->bootstraps = d.bootstraps;
  options->threshold = d.threshold;
  options->alpha = d.alpha;
  options->max_parents = d.max_parents;
  options->restarts = d.restarts;
  options->threads = d.threads;
  options->constraints_json = nullptr;
}

bnet_status bnet_learn(const bnet_table* data, const bnet_learn_options* options, bnet_ensemble** ensemble_out,
                       bnet_network** network_out) {
  return guarded([&] {
    require(data, "data");
    require(options, "options");
    if (options->bootstraps < 1) bnet::fail(bnet::ErrorKind::InvalidArgument, "bootstraps must be >= 1");
    if (!(options->threshold >= 0.0 && options->threshold <= 1.0)) {
      bnet::fail(bnet::ErrorKind::InvalidArgument, "threshold must lie in [0, 1]");
    }
    if (!(options->alpha >= 0.0)) bnet::fail(bnet::ErrorKind::InvalidArgument, "alpha must be >= 0");
    bnet::LearnOptions opts;
    opts.seed = options->seed;
    opts.bootstraps = options->bootstraps;
    opts.threshold = options->threshold;
    opts.alpha = options->alpha;
    opts.max_parents = options->max_parents;
    opts.restarts = options->restarts;
    opts.threads = options->threads;
    if (options->constraints_json) opts.constraints = bnet::parse_json(options->constraints_json);
    auto result = bnet::learn_network(data->table, opts);
    bnet_network* net = network_out ? new bnet_network(std::move(*result.network)) : nullptr;
    if (ensemble_out) {
      try {
        *ensemble_out = new bnet_ensemble{std::move(result.ensemble), std::move(result.variables)};
      } catch (...) {
        delete net;
        throw;
      }
    }
    if (network_out) *network_out = net;
  });
}

bnet_status bnet_ensemble_to_json(const bnet_ensemble* ensemble, char** json_out) {
  return guarded([&] {
    require(ensemble, "ensemble");
    require(json_out, "json_out");
    emit(json_out, bnet::ensemble_to_json(ensemble->summary, ensemble->variables));
  });
}

bnet_status bnet_ensemble_write(const bnet_ensemble* ensemble, const char* path) {
  return guarded([&] {
    require(ensemble, "ensemble");
    require(path, "path");
    bnet::write_file(path, bnet::dump(bnet::ensemble_to_json(ensemble->summary, ensemble->variables)));
  });
}

bnet_status bnet_ensemble_read(const char* path, const bnet_network* net, bnet_ensemble** out) {
  return guarded([&] {
    require(path, "path");
    require(net, "net");
    require(out, "out");
    const auto& vars = net->net.variables();
    *out = new bnet_ensemble{bnet::ensemble_from_json(bnet::read_json_file(path), vars), vars};
  });
}

double bnet_ensemble_frequency(const bnet_ensemble* ensemble, const char* from, const char* to) {
  if (!ensemble || !from || !to) return 0.0;
  int a = -1, b = -1;
  for (std::size_t i = 0; i < ensemble->variables.size(); ++i) {
    if (ensemble->variables[i].name == from) a = static_cast<int>(i);
    if (ensemble->variables[i].name == to) b = static_cast<int>(i);
  }
  if (a < 0 || b < 0) return 0.0;
  return ensemble->summary.frequency(a, b);
}

void bnet_ensemble_free(bnet_ensemble* ensemble) { delete ensemble; }

void bnet_train_options_init(bnet_train_options* options) {
  if (options == nullptr) return;
  const bnet::TrainOptions d;
  options->label = nullptr;
  options->kind = BNET_MODEL_FOREST;
  options->seed = d.seed;
  options->train_fraction = d.train_fraction;
  options->stratify = d.stratify ? 1 : 0;
  options->smote = d.use_smote ? 1 : 0;
  options->smote_k = d.smote.k_neighbors;
  options->smote_ratio = d.smote.target_ratio;
  options->trees = d.forest.trees;
  options->max_depth = d.forest.tree.max_depth;
  options->min_leaf = d.forest.tree.min_leaf;
  options->feature_fraction = d.forest.tree.feature_fraction;
  options->learning_rate = d.logistic.learning_rate;
  options->epochs = d.logistic.epochs;
  options->l2 = d.logistic.l2;
  options->stages = d.boosted.stages;
  options->boost_depth = d.boosted.max_depth;
  options->shrinkage = d.boosted.shrinkage;
}

bnet_status bnet_train(const bnet_table* data, const bnet_train_options* options, bnet_classifier** model_out,
                       bnet_table** train_out, bnet_table** test_out) {
  return guarded([&] {
    require(data, "data");
    require(options, "options");
    require(options->label, "options->label");
    require(model_out, "model_out");
    bnet::TrainOptions opts;
    opts.label = options->label;
    switch (options->kind) {
      case BNET_MODEL_FOREST: opts.kind = bnet::ModelKind::Forest; break;
      case BNET_MODEL_LOGISTIC: opts.kind = bnet::ModelKind::Logistic; break;
      case BNET_MODEL_BOOSTED: opts.kind = bnet::ModelKind::Boosted; break;
      default: bnet::fail(bnet::ErrorKind::InvalidArgument, "unknown model kind");
    }
    opts.seed = options->seed;
    opts.train_fraction = options->train_fraction;
    opts.stratify = options->stratify != 0;
    opts.use_smote = options->smote != 0;
    opts.smote.k_neighbors = options->smote_k;
    opts.smote.target_ratio = options->smote_ratio;
    opts.forest.trees = options->trees;
    opts.forest.tree.max_depth = options->max_depth;
    opts.forest.tree.min_leaf = options->min_leaf;
    opts.forest.tree.feature_fraction = options->feature_fraction;
    opts.logistic.learning_rate = options->learning_rate;
    opts.logistic.epochs = options->epochs;
    opts.logistic.l2 = options->l2;
    opts.boosted.stages = options->stages;
    opts.boosted.max_depth = options->boost_depth;
    opts.boosted.min_leaf = options->min_leaf;
    opts.boosted.shrinkage = options->shrinkage;

    auto result = bnet::train_classifier(data->table, opts);
    auto model = std::make_unique<bnet_classifier>(bnet_classifier{std::move(result.model)});
    auto train = train_out ? std::make_unique<bnet_table>(bnet_table{std::move(result.train)}) : nullptr;
    auto test = test_out ? std::make_unique<bnet_table>(bnet_table{std::move(result.test)}) : nullptr;
    *model_out = model.release();
    if (train_out) *train_out = train.release();
    if (test_out) *test_out = test.release();
  });
}

bnet_status bnet_classifier_read(const char* path, bnet_classifier** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new bnet_classifier{bnet::classifier_from_json(bnet::read_json_file(path))};
  });
}

bnet_status bnet_classifier_to_json(const bnet_classifier* model, char** json_out) {
  return guarded([&] {
    require(model, "model");
    require(json_out, "json_out");
    emit(json_out, bnet::classifier_to_json(model->model));
  });
}

bnet_status bnet_classifier_write(const bnet_classifier* model, const char* path) {
  return guarded([&] {
    require(model, "model");
    require(path, "path");
    bnet::write_file(path, bnet::dump(bnet::classifier_to_json(model->model)));
  });
}

bnet_status bnet_classifier_predict(const bnet_classifier* model, const bnet_table* rows, double* probabilities_out) {
  return guarded([&] {
    require(model, "model");
    require(rows, "rows");
    require(probabilities_out, "probabilities_out");
    const auto p = bnet::predict_proba(model->model, rows->table);
    std::copy(p.begin(), p.end(), probabilities_out);
  });
}

bnet_status bnet_classifier_schema(const bnet_classifier* model, char** json_out) {
  return guarded([&] {
    require(model, "model");
    require(json_out, "json_out");
    const auto& schema = bnet::schema_of(model->model);
    std::vector<bnet::VariableSpec> columns{{schema.label, schema.label_states, false}};
    columns.insert(columns.end(), schema.features.begin(), schema.features.end());
    emit(json_out, bnet::variables_to_json(columns));
  });
}

void bnet_classifier_free(bnet_classifier* model) { delete model; }

void bnet_eval_options_init(bnet_eval_options* options) {
  if (options == nullptr) return;
  const bnet::EvalConfig d;
  options->threshold = d.threshold;
  options->bootstrap = d.bootstrap;
  options->seed = d.seed;
}

bnet_status bnet_evaluate(const bnet_classifier* model, const bnet_table* test, const bnet_eval_options* options,
                          char** metrics_json) {
  return guarded([&] {
    require(model, "model");
    require(test, "test");
    require(options, "options");
    require(metrics_json, "metrics_json");
    bnet::EvalConfig config;
    config.threshold = options->threshold;
    config.bootstrap = options->bootstrap;
    config.seed = options->seed;
    emit(metrics_json, bnet::metrics_to_json(bnet::evaluate_classifier(model->model, test->table, config)));
  });
}

}  // extern "C"
