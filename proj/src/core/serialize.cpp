#include "bnet/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "bnet/error.hpp"

namespace bnet {

namespace {

const Json& field(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    fail(ErrorKind::Parse, std::string("missing field '") + key + "'");
  }
  return doc.at(key);
}

template <class T>
T get_as(const Json& value, const char* what) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::Parse, std::string("field '") + what + "' has the wrong type");
  }
}

NodeId lookup(const std::vector<VariableSpec>& variables, const std::string& name) {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == name) return static_cast<NodeId>(i);
  }
  fail(ErrorKind::UnknownVariable, "unknown variable '" + name + "'");
}

Edge edge_from_json(const Json& e, const std::vector<VariableSpec>& variables) {
  return {lookup(variables, get_as<std::string>(field(e, "from"), "from")),
          lookup(variables, get_as<std::string>(field(e, "to"), "to"))};
}

}  // namespace

Json variables_to_json(const std::vector<VariableSpec>& variables) {
  Json out = Json::array();
  for (const auto& v : variables) {
    out.push_back({{"name", v.name}, {"states", v.states}, {"ordered", v.ordered}});
  }
  return out;
}

std::vector<VariableSpec> variables_from_json(const Json& doc) {
  if (!doc.is_array()) fail(ErrorKind::Parse, "variables must be an array");
  std::vector<VariableSpec> out;
  for (const auto& v : doc) {
    VariableSpec spec;
    spec.name = get_as<std::string>(field(v, "name"), "name");
    spec.states = get_as<std::vector<std::string>>(field(v, "states"), "states");
    spec.ordered = v.contains("ordered") ? get_as<bool>(v.at("ordered"), "ordered") : false;
    out.push_back(std::move(spec));
  }
  return out;
}

Json network_to_json(const BayesianNetwork& net) {
  Json doc;
  doc["format_version"] = kNetworkFormatVersion;
  doc["variables"] = variables_to_json(net.variables());
  Json edges = Json::array();
  for (const auto& [p, c] : net.dag().edges()) {
    edges.push_back({{"from", net.variable(p).name}, {"to", net.variable(c).name}});
  }
  doc["edges"] = std::move(edges);
  Json cpts = Json::array();
  for (const Cpt& cpt : net.cpts()) {
    Json parents = Json::array();
    for (NodeId p : cpt.parents) parents.push_back(net.variable(p).name);
    Json rows = Json::array();
    for (std::size_t r = 0; r < cpt.row_count(); ++r) {
      auto row = cpt.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    cpts.push_back({{"variable", net.variable(cpt.child).name},
                    {"parents", std::move(parents)},
                    {"rows", std::move(rows)}});
  }
  doc["cpts"] = std::move(cpts);
  return doc;
}

BayesianNetwork network_from_json(const Json& doc) {
  const int version = get_as<int>(field(doc, "format_version"), "format_version");
  if (version != kNetworkFormatVersion) {
    fail(ErrorKind::Parse, "unsupported network format_version " + std::to_string(version));
  }
  auto variables = variables_from_json(field(doc, "variables"));
  Dag dag(static_cast<int>(variables.size()));
  for (const auto& e : field(doc, "edges")) {
    auto [p, c] = edge_from_json(e, variables);
    dag.add_edge(p, c);
  }
  std::vector<Cpt> cpts(variables.size());
  std::vector<char> seen(variables.size(), 0);
  for (const auto& entry : field(doc, "cpts")) {
    NodeId child = lookup(variables, get_as<std::string>(field(entry, "variable"), "variable"));
    if (seen[child]) fail(ErrorKind::Parse, "duplicate CPT for '" + variables[child].name + "'");
    seen[child] = 1;
    std::vector<NodeId> parents;
    for (const auto& p : field(entry, "parents")) {
      parents.push_back(lookup(variables, get_as<std::string>(p, "parents")));
    }
    auto rows = get_as<std::vector<std::vector<double>>>(field(entry, "rows"), "rows");
    cpts[child] = make_cpt(variables, child, std::move(parents), std::move(rows));
  }
  for (std::size_t v = 0; v < variables.size(); ++v) {
    if (!seen[v]) fail(ErrorKind::Parse, "no CPT for '" + variables[v].name + "'");
  }
  return BayesianNetwork(std::move(variables), std::move(dag), std::move(cpts));
}

Json ensemble_to_json(const EnsembleSummary& summary, const std::vector<VariableSpec>& variables) {
  if (static_cast<int>(variables.size()) != summary.node_count) {
    fail(ErrorKind::InvalidArgument, "variable list does not match the ensemble");
  }
  Json doc;
  doc["replicates"] = summary.replicates;
  Json names = Json::array();
  for (const auto& v : variables) names.push_back(v.name);
  doc["variables"] = std::move(names);
  doc["replicate_seeds"] = summary.replicate_seeds;
  Json edges = Json::array();
  for (const auto& [edge, count] : summary.edge_counts) {
    edges.push_back({{"from", variables[edge.first].name},
                     {"to", variables[edge.second].name},
                     {"frequency", static_cast<double>(count) / summary.replicates},
                     {"count", count}});
  }
  doc["edges"] = std::move(edges);
  return doc;
}

EnsembleSummary ensemble_from_json(const Json& doc, const std::vector<VariableSpec>& variables) {
  EnsembleSummary summary;
  summary.replicates = get_as<int>(field(doc, "replicates"), "replicates");
  if (summary.replicates < 1) fail(ErrorKind::Parse, "replicates must be positive");
  summary.node_count = static_cast<int>(variables.size());
  if (doc.contains("replicate_seeds")) {
    summary.replicate_seeds = get_as<std::vector<std::uint64_t>>(doc.at("replicate_seeds"), "replicate_seeds");
  }
  for (const auto& e : field(doc, "edges")) {
    Edge edge = edge_from_json(e, variables);
    int count;
    if (e.contains("count")) {
      count = get_as<int>(e.at("count"), "count");
    } else {
      const double f = get_as<double>(field(e, "frequency"), "frequency");
      count = static_cast<int>(std::lround(f * summary.replicates));
    }
    if (count < 0 || count > summary.replicates) fail(ErrorKind::Parse, "edge count out of range");
    summary.edge_counts[edge] = count;
  }
  return summary;
}

SearchConstraints constraints_from_json(const Json& doc, const std::vector<VariableSpec>& variables,
                                        int default_max_parents) {
  if (!doc.is_object()) fail(ErrorKind::Parse, "constraints must be a JSON object");
  SearchConstraints out;
  out.max_parents = doc.contains("max_parents") ? get_as<int>(doc.at("max_parents"), "max_parents")
                                                : default_max_parents;
  if (doc.contains("forbidden")) {
    for (const auto& e : doc.at("forbidden")) out.forbidden.insert(edge_from_json(e, variables));
  }
  if (doc.contains("required")) {
    for (const auto& e : doc.at("required")) out.required.insert(edge_from_json(e, variables));
  }
  if (doc.contains("tiers")) {
    const auto& tiers = doc.at("tiers");
    if (!tiers.is_object()) fail(ErrorKind::Parse, "tiers must map variable names to integers");
    out.tier_of.assign(variables.size(), 0);
    for (auto it = tiers.begin(); it != tiers.end(); ++it) {
      out.tier_of[lookup(variables, it.key())] = get_as<int>(it.value(), "tiers");
    }
  }
  validate_constraints(out, static_cast<int>(variables.size()));
  return out;
}

Json evidence_to_json(const BayesianNetwork& net, const EvidenceSet& evidence) {
  Json out = Json::object();
  for (auto [v, s] : evidence) out[net.variable(v).name] = net.variable(v).states[s];
  return out;
}

EvidenceSet evidence_from_json(const BayesianNetwork& net, const Json& doc) {
  EvidenceSet out;
  if (doc.is_null()) return out;
  if (!doc.is_object()) fail(ErrorKind::Parse, "evidence must map variable names to state labels");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const NodeId v = net.index_of(it.key());
    if (!it.value().is_string()) {
      fail(ErrorKind::Parse, "evidence for '" + it.key() + "' must be a state label");
    }
    out[v] = net.state_of(v, it.value().get<std::string>());
  }
  return out;
}

Json posterior_to_json(const BayesianNetwork& net, const PosteriorResult& result) {
  const auto& var = net.variable(result.variable);
  Json out;
  out["variable"] = var.name;
  out["states"] = var.states;
  out["distribution"] = result.distribution;
  out["evidence_probability"] = result.evidence_probability;
  out["evidence"] = evidence_to_json(net, result.evidence);
  return out;
}

Json delta_to_json(const BayesianNetwork& net, const InterventionDelta& delta) {
  const auto& var = net.variable(delta.target);
  Json out;
  out["target"] = {{"variable", var.name}, {"state", var.states[delta.target_state]}};
  out["baseline_evidence"] = evidence_to_json(net, delta.baseline_evidence);
  out["alternative_evidence"] = evidence_to_json(net, delta.alternative_evidence);
  out["baseline_prob"] = delta.baseline_prob;
  out["alternative_prob"] = delta.alternative_prob;
  out["delta"] = delta.delta;
  return out;
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::Parse, std::string("invalid JSON: ") + e.what());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  out << contents;
  if (!out) fail(ErrorKind::Io, "write to '" + path + "' failed");
}

Json read_json_file(const std::string& path) { return parse_json(read_file(path)); }

std::string fingerprint(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace bnet
