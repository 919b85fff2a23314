// bnet command-line driver: synth, learn, query, whatif, cvrics, train, eval,
// serve. Exit codes: 0 success, 1 usage, 2 domain error, 3 I/O.

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bnet/bnet.h"
#include "service/service.hpp"

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr int kExitUsage = 1;
constexpr int kExitDomain = 2;
constexpr int kExitIo = 3;

// Carries a process exit code out of a subcommand.
struct Exit {
  int code;
};

[[noreturn]] void fail_status(bnet_status status, const std::string& context) {
  std::cerr << "bnet: " << context << ": " << bnet_status_name(status) << ": " << bnet_last_error() << "\n";
  throw Exit{status == BNET_ERR_IO ? kExitIo : kExitDomain};
}

void check(bnet_status status, const std::string& context) {
  if (status != BNET_OK) fail_status(status, context);
}

[[noreturn]] void fail_usage(const std::string& message) {
  std::cerr << "bnet: " << message << "\n";
  throw Exit{kExitUsage};
}

[[noreturn]] void fail_io(const std::string& message) {
  std::cerr << "bnet: " << message << "\n";
  throw Exit{kExitIo};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  bnet_string_free(s);
  return out;
}

std::string slurp(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_io("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), {}};
}

void spill(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !out.write(contents.data(), static_cast<std::streamsize>(contents.size()))) {
    fail_io("cannot write '" + path.string() + "'");
  }
}

fs::path make_out_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail_io("cannot create '" + dir + "': " + ec.message());
  return fs::path(dir);
}

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Table = Handle<bnet_table, bnet_table_free>;
using Network = Handle<bnet_network, bnet_network_free>;
using Ensemble = Handle<bnet_ensemble, bnet_ensemble_free>;
using Model = Handle<bnet_classifier, bnet_classifier_free>;

// "name=label" pairs into an evidence object.
Json parse_pairs(const std::vector<std::string>& pairs, const char* flag) {
  Json out = Json::object();
  for (const auto& p : pairs) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) fail_usage(std::string(flag) + " expects name=state, got '" + p + "'");
    out[p.substr(0, eq)] = p.substr(eq + 1);
  }
  return out;
}

Json parse_target(const std::string& target) {
  const auto eq = target.find('=');
  if (eq == std::string::npos) return Json{{"variable", target}};
  return Json{{"variable", target.substr(0, eq)}, {"state", target.substr(eq + 1)}};
}

struct QueryArgs {
  std::string model;
  std::string request;
  std::string target;
  std::vector<std::string> evidence;
  std::vector<std::string> alternative;
};

std::string build_request(const QueryArgs& a, bool whatif) {
  if (!a.request.empty()) {
    if (!a.target.empty() || !a.evidence.empty() || !a.alternative.empty()) {
      fail_usage("--request cannot be combined with --target/--evidence/--alternative");
    }
    return slurp(a.request);
  }
  if (a.target.empty()) fail_usage("either --request or --target is required");
  Json req{{"target", parse_target(a.target)}, {"evidence", parse_pairs(a.evidence, "--evidence")}};
  if (whatif) req["alternative"] = parse_pairs(a.alternative, "--alternative");
  return req.dump();
}

void run_query(const QueryArgs& a, bool whatif) {
  const std::string request = build_request(a, whatif);
  Network net;
  check(bnet_network_read(a.model.c_str(), net.out()), "reading model");
  char* out = nullptr;
  check(whatif ? bnet_whatif(net.get(), request.c_str(), &out) : bnet_query(net.get(), request.c_str(), &out),
        whatif ? "whatif" : "query");
  std::cout << take(out);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      fail_usage("expected a comma-separated integer list, got '" + text + "'");
    }
  }
  return out;
}

volatile std::sig_atomic_t g_stop = 0;
bnet::service::HttpServer* g_server = nullptr;

extern "C" void on_signal(int) {
  g_stop = 1;
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian-network survey analytics: structure learning, what-if queries and classifier evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(bnet_version()));

  std::uint64_t seed = 0;
  std::string out_dir = ".";

  // synth
  auto* synth = app.add_subcommand("synth", "Sample the bundled survey generator");
  std::uint64_t synth_n = 20000;
  synth->add_option("-n,--rows", synth_n, "Rows to sample")->capture_default_str();
  synth->add_option("--seed", seed, "Random seed")->required();
  synth->add_option("--out", out_dir, "Output directory")->capture_default_str();

  // learn
  auto* learn = app.add_subcommand("learn", "Bootstrap-ensemble structure learning and CPT fit");
  std::string learn_data, constraints_path;
  bnet_learn_options learn_opts;
  bnet_learn_options_init(&learn_opts);
  learn->add_option("--data", learn_data, "Input CSV")->required();
  learn->add_option("--seed", seed, "Random seed")->required();
  learn->add_option("--bootstraps", learn_opts.bootstraps, "Bootstrap replicates")
      ->capture_default_str()->check(CLI::PositiveNumber);
  learn->add_option("--threshold", learn_opts.threshold, "Averaging threshold")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  learn->add_option("--alpha", learn_opts.alpha, "Dirichlet smoothing pseudo-count")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  learn->add_option("--max-parents", learn_opts.max_parents, "Parent limit per node")
      ->capture_default_str()->check(CLI::NonNegativeNumber);
  learn->add_option("--restarts", learn_opts.restarts, "Hill-climbing restarts per replicate")
      ->capture_default_str()->check(CLI::PositiveNumber);
  learn->add_option("--threads", learn_opts.threads, "Worker threads (0 = all cores)")->capture_default_str();
  learn->add_option("--constraints", constraints_path, "Constraints JSON file");
  learn->add_option("--out", out_dir, "Output directory")->capture_default_str();

  // query / whatif
  QueryArgs qargs;
  auto add_query_options = [&](CLI::App* cmd, bool whatif) {
    cmd->add_option("--model", qargs.model, "Network JSON")->required();
    cmd->add_option("--request", qargs.request, "Request JSON file ('-' for stdin)");
    cmd->add_option("--target", qargs.target, whatif ? "Target as variable=state" : "Target as variable[=state]");
    cmd->add_option("--evidence", qargs.evidence, whatif ? "Baseline evidence name=state" : "Evidence name=state");
    if (whatif) cmd->add_option("--alternative", qargs.alternative, "Alternative evidence name=state");
  };
  auto* query = app.add_subcommand("query", "Posterior of a target given evidence");
  add_query_options(query, false);
  auto* whatif = app.add_subcommand("whatif", "Change in a target probability between two evidence sets");
  add_query_options(whatif, true);

  // cvrics
  auto* cvrics = app.add_subcommand("cvrics", "Append the composite coverage score and bin it");
  std::string cv_data, cv_spec, cv_bins = "0,7,12,31";
  cvrics->add_option("--data", cv_data, "Input CSV")->required();
  cvrics->add_option("--spec", cv_spec, "Score spec JSON")->required();
  cvrics->add_option("--bins", cv_bins, "Half-open bin edges")->capture_default_str();
  cvrics->add_option("--out", out_dir, "Output directory")->capture_default_str();

  // train
  auto* train = app.add_subcommand("train", "Split, balance the training part and fit a classifier");
  std::string train_data, label, kind = "forest";
  bool no_smote = false, no_stratify = false;
  bnet_train_options train_opts;
  bnet_train_options_init(&train_opts);
  train->add_option("--data", train_data, "Input CSV")->required();
  train->add_option("--label", label, "Binary label column")->required();
  train->add_option("--model", kind, "forest | logistic | boosted")
      ->capture_default_str()
      ->check(CLI::IsMember({"forest", "logistic", "boosted"}));
  train->add_option("--seed", seed, "Random seed")->required();
  train->add_option("--train-fraction", train_opts.train_fraction, "Training share")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  train->add_flag("--no-smote", no_smote, "Skip minority oversampling");
  train->add_flag("--no-stratify", no_stratify, "Plain random split");
  train->add_option("--smote-k", train_opts.smote_k, "SMOTE neighbours")->capture_default_str();
  train->add_option("--smote-ratio", train_opts.smote_ratio, "Target minority/majority ratio")->capture_default_str();
  train->add_option("--trees", train_opts.trees, "Forest size")->capture_default_str();
  train->add_option("--max-depth", train_opts.max_depth, "Forest tree depth")->capture_default_str();
  train->add_option("--min-leaf", train_opts.min_leaf, "Minimum rows per leaf")->capture_default_str();
  train->add_option("--feature-fraction", train_opts.feature_fraction, "Features per split (<=0: sqrt)")
      ->capture_default_str();
  train->add_option("--learning-rate", train_opts.learning_rate, "Logistic step size")->capture_default_str();
  train->add_option("--epochs", train_opts.epochs, "Logistic epochs")->capture_default_str();
  train->add_option("--l2", train_opts.l2, "Logistic L2 penalty")->capture_default_str();
  train->add_option("--stages", train_opts.stages, "Boosting stages")->capture_default_str();
  train->add_option("--boost-depth", train_opts.boost_depth, "Boosting tree depth")->capture_default_str();
  train->add_option("--shrinkage", train_opts.shrinkage, "Boosting shrinkage")->capture_default_str();
  train->add_option("--out", out_dir, "Output directory")->capture_default_str();

  // eval
  auto* eval = app.add_subcommand("eval", "Score a held-out table and report metrics with bootstrap intervals");
  std::string eval_model, eval_data;
  bool eval_out_given = false;
  bnet_eval_options eval_opts;
  bnet_eval_options_init(&eval_opts);
  eval->add_option("--model", eval_model, "Classifier JSON")->required();
  eval->add_option("--data", eval_data, "Test CSV")->required();
  eval->add_option("--seed", seed, "Random seed")->required();
  eval->add_option("--bootstrap", eval_opts.bootstrap, "Bootstrap resamples")->capture_default_str();
  eval->add_option("--threshold", eval_opts.threshold, "Decision threshold")
      ->capture_default_str()->check(CLI::Range(0.0, 1.0));
  auto* eval_out = eval->add_option("--out", out_dir, "Output directory (default: stdout)");

  // serve
  auto* serve = app.add_subcommand("serve", "HTTP JSON service over a fitted network");
  std::string serve_model, serve_ensemble, bind = "127.0.0.1:8080";
  serve->add_option("--model", serve_model, "Network JSON")->required();
  serve->add_option("--ensemble", serve_ensemble, "Ensemble JSON (edge frequencies for /graph)");
  serve->add_option("--bind", bind, "host:port")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*synth) {
      const fs::path dir = make_out_dir(out_dir);
      Table table;
      Network gen;
      char* spec = nullptr;
      check(bnet_synth(synth_n, seed, table.out(), gen.out(), &spec), "synth");
      const std::string spec_text = take(spec);
      check(bnet_table_write_csv(table.get(), (dir / "survey.csv").c_str()), "writing survey.csv");
      check(bnet_network_write(gen.get(), (dir / "generator.json").c_str()), "writing generator.json");
      spill(dir / "cvrics.json", spec_text);
    } else if (*learn) {
      std::string constraints;
      if (!constraints_path.empty()) {
        constraints = slurp(constraints_path);
        learn_opts.constraints_json = constraints.c_str();
      }
      learn_opts.seed = seed;
      Table table;
      check(bnet_table_read_csv(learn_data.c_str(), nullptr, table.out()), "reading '" + learn_data + "'");
      Ensemble ens;
      Network net;
      check(bnet_learn(table.get(), &learn_opts, ens.out(), net.out()), "learn");
      const fs::path dir = make_out_dir(out_dir);
      check(bnet_ensemble_write(ens.get(), (dir / "ensemble.json").c_str()), "writing ensemble.json");
      check(bnet_network_write(net.get(), (dir / "model.json").c_str()), "writing model.json");
    } else if (*query) {
      run_query(qargs, false);
    } else if (*whatif) {
      run_query(qargs, true);
    } else if (*cvrics) {
      const std::vector<int> edges = parse_int_list(cv_bins);
      if (edges.size() < 2) fail_usage("--bins needs at least two edges");
      const std::string spec = slurp(cv_spec);
      Table table;
      check(bnet_table_read_csv(cv_data.c_str(), nullptr, table.out()), "reading '" + cv_data + "'");
      check(bnet_table_append_cvrics(table.get(), spec.c_str()), "cvrics");
      std::vector<size_t> counts(edges.size() - 1);
      check(bnet_table_histogram(table.get(), "cvrics", edges.data(), edges.size(), counts.data()), "histogram");
      const fs::path dir = make_out_dir(out_dir);
      check(bnet_table_write_csv(table.get(), (dir / "scored.csv").c_str()), "writing scored.csv");
      Json bins = Json::array();
      for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        bins.push_back({{"low", edges[i]}, {"high", edges[i + 1]}, {"count", counts[i]}});
      }
      const Json hist{{"column", "cvrics"}, {"rows", bnet_table_rows(table.get())}, {"bins", std::move(bins)}};
      spill(dir / "cvrics_histogram.json", hist.dump(2) + "\n");
    } else if (*train) {
      train_opts.label = label.c_str();
      train_opts.seed = seed;
      train_opts.smote = no_smote ? 0 : 1;
      train_opts.stratify = no_stratify ? 0 : 1;
      train_opts.kind = kind == "logistic" ? BNET_MODEL_LOGISTIC
                        : kind == "boosted" ? BNET_MODEL_BOOSTED
                                            : BNET_MODEL_FOREST;
      Table table;
      check(bnet_table_read_csv(train_data.c_str(), nullptr, table.out()), "reading '" + train_data + "'");
      Model model;
      Table train_part, test_part;
      check(bnet_train(table.get(), &train_opts, model.out(), train_part.out(), test_part.out()), "train");
      const fs::path dir = make_out_dir(out_dir);
      check(bnet_classifier_write(model.get(), (dir / "classifier.json").c_str()), "writing classifier.json");
      check(bnet_table_write_csv(train_part.get(), (dir / "train.csv").c_str()), "writing train.csv");
      check(bnet_table_write_csv(test_part.get(), (dir / "test.csv").c_str()), "writing test.csv");
    } else if (*eval) {
      eval_out_given = eval_out->count() > 0;
      eval_opts.seed = seed;
      Model model;
      check(bnet_classifier_read(eval_model.c_str(), model.out()), "reading '" + eval_model + "'");
      char* schema = nullptr;
      check(bnet_classifier_schema(model.get(), &schema), "classifier schema");
      const std::string schema_text = take(schema);
      Table table;
      check(bnet_table_read_csv(eval_data.c_str(), schema_text.c_str(), table.out()), "reading '" + eval_data + "'");
      char* metrics = nullptr;
      check(bnet_evaluate(model.get(), table.get(), &eval_opts, &metrics), "eval");
      const std::string text = take(metrics);
      if (eval_out_given) {
        spill(make_out_dir(out_dir) / "metrics.json", text);
      } else {
        std::cout << text;
      }
    } else if (*serve) {
      const auto colon = bind.rfind(':');
      if (colon == std::string::npos) fail_usage("--bind expects host:port");
      const std::string host = bind.substr(0, colon);
      int port = 0;
      try {
        port = std::stoi(bind.substr(colon + 1));
      } catch (const std::logic_error&) {
        fail_usage("--bind expects host:port");
      }
      std::optional<std::string> ensemble;
      if (!serve_ensemble.empty()) ensemble = serve_ensemble;
      std::optional<bnet::service::QueryService> service;
      try {
        service.emplace(serve_model, ensemble);
      } catch (const std::runtime_error& e) {
        std::cerr << "bnet: " << e.what() << "\n";
        return fs::exists(serve_model) ? kExitDomain : kExitIo;
      }
      bnet::service::HttpServer server(*service);
      const int bound = server.bind(host, port);
      if (bound < 0) fail_io("cannot bind " + bind);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cerr << "bnet: serving " << service->fingerprint() << " on " << host << ":" << bound << "\n";
      server.listen();
      g_server = nullptr;
    }
  } catch (const Exit& e) {
    return e.code;
  }
  return 0;
}
