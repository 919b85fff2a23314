#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bnet/inference.hpp"
#include "bnet/network.hpp"
#include "bnet/structure.hpp"

namespace bnet {

using Json = nlohmann::ordered_json;

inline constexpr int kNetworkFormatVersion = 1;

// {format_version, variables[], edges[], cpts[]}; CPT rows in row-major
// parent-configuration order.
Json network_to_json(const BayesianNetwork& net);
// Throws Parse on malformed documents; InvalidArgument on invalid content.
BayesianNetwork network_from_json(const Json& doc);

Json variables_to_json(const std::vector<VariableSpec>& variables);
std::vector<VariableSpec> variables_from_json(const Json& doc);

// {replicates, variables, replicate_seeds, edges:[{from,to,frequency,count}]}
Json ensemble_to_json(const EnsembleSummary& summary, const std::vector<VariableSpec>& variables);
EnsembleSummary ensemble_from_json(const Json& doc, const std::vector<VariableSpec>& variables);

// {max_parents?, forbidden:[{from,to}], required:[{from,to}], tiers:{name:int}}
// with variables referenced by name. `max_parents` in the document overrides
// the default passed in.
SearchConstraints constraints_from_json(const Json& doc, const std::vector<VariableSpec>& variables,
                                        int default_max_parents);

Json evidence_to_json(const BayesianNetwork& net, const EvidenceSet& evidence);
// {variable: state-label}; throws UnknownVariable / UnknownState.
EvidenceSet evidence_from_json(const BayesianNetwork& net, const Json& doc);

Json posterior_to_json(const BayesianNetwork& net, const PosteriorResult& result);
Json delta_to_json(const BayesianNetwork& net, const InterventionDelta& delta);

// Canonical text form: two-space indentation and a trailing newline.
std::string dump(const Json& doc);
Json parse_json(const std::string& text);
Json read_json_file(const std::string& path);
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

// FNV-1a 64 of the bytes, as "fnv1a64:<16 hex digits>".
std::string fingerprint(const std::string& bytes);

}  // namespace bnet
