#include "bnet/synth.hpp"

#include <string>

namespace bnet {

namespace {

VariableSpec binary(const char* name) { return {name, {"no", "yes"}, false}; }

VariableSpec levels(const char* name, int count) {
  VariableSpec spec{name, {}, true};
  for (int i = 0; i < count; ++i) spec.states.push_back(std::to_string(i));
  return spec;
}

std::vector<double> yes(double p) { return {1.0 - p, p}; }

}  // namespace

BayesianNetwork survey_generator() {
  enum : NodeId {
    kState, kCoMember, kFinLiteracy, kInvestment, kFinPlan, kLegalEd, kGovtScheme, kSelfEfficacy,
    kDepression, kBuysSelf, kCondomUse, kHivTest, kSocialProtection, kFinSecurity, kCrisis, kCount
  };
  std::vector<VariableSpec> vars(kCount);
  vars[kState] = {"state", {"AP", "KA", "MH", "TN", "TS"}, false};
  vars[kCoMember] = binary("co_member");
  vars[kFinLiteracy] = binary("financial_literacy");
  vars[kInvestment] = binary("investment");
  vars[kFinPlan] = binary("financial_plan");
  vars[kLegalEd] = binary("legal_education");
  vars[kGovtScheme] = binary("govt_scheme");
  vars[kSelfEfficacy] = binary("high_self_efficacy");
  vars[kDepression] = binary("depression");
  vars[kBuysSelf] = binary("buys_condom_self");
  vars[kCondomUse] = binary("condom_use");
  vars[kHivTest] = binary("hiv_test");
  vars[kSocialProtection] = levels("social_protection", 6);
  vars[kFinSecurity] = levels("financial_security", 6);
  vars[kCrisis] = levels("crisis_count", 4);

  Dag dag(kCount);
  std::vector<Cpt> cpts(kCount);
  auto set = [&](NodeId child, std::vector<NodeId> parents, std::vector<std::vector<double>> rows) {
    for (NodeId p : parents) dag.add_edge(p, child);
    cpts[child] = make_cpt(vars, child, std::move(parents), std::move(rows));
  };
  set(kState, {}, {{0.2, 0.2, 0.2, 0.2, 0.2}});
  set(kCoMember, {kState}, {yes(0.55), yes(0.65), yes(0.50), yes(0.70), yes(0.60)});
  set(kFinLiteracy, {kCoMember}, {yes(0.25), yes(0.60)});
  set(kInvestment, {kFinLiteracy}, {yes(0.20), yes(0.55)});
  set(kFinPlan, {kFinLiteracy}, {yes(0.15), yes(0.50)});
  set(kLegalEd, {}, {yes(0.35)});
  set(kGovtScheme, {kState}, {yes(0.40), yes(0.50), yes(0.45), yes(0.60), yes(0.55)});
  set(kSelfEfficacy, {kGovtScheme}, {yes(0.55), yes(0.68)});
  set(kDepression, {}, {yes(0.30)});
  set(kBuysSelf, {kDepression}, {yes(0.75), yes(0.61)});
  set(kCondomUse, {kFinLiteracy}, {yes(0.80), yes(0.86)});
  // Rows enumerate (financial_plan, legal_education) with the latter fastest.
  set(kHivTest, {kFinPlan, kLegalEd}, {yes(0.45), yes(0.61), yes(0.57), yes(0.73)});
  set(kSocialProtection, {kGovtScheme},
      {{0.25, 0.25, 0.20, 0.15, 0.10, 0.05}, {0.05, 0.10, 0.15, 0.25, 0.25, 0.20}});
  set(kFinSecurity, {kInvestment},
      {{0.30, 0.25, 0.20, 0.12, 0.08, 0.05}, {0.05, 0.10, 0.20, 0.25, 0.25, 0.15}});
  set(kCrisis, {kDepression}, {{0.40, 0.30, 0.20, 0.10}, {0.15, 0.25, 0.30, 0.30}});
  return BayesianNetwork(std::move(vars), std::move(dag), std::move(cpts));
}

CvricsSpec survey_cvrics_spec() {
  CvricsSpec spec;
  CvricsComponent social{"social_protection", {}};
  CvricsComponent financial{"financial_security", {}};
  for (int level = 0; level <= 5; ++level) {
    social.scores.emplace_back(std::to_string(level), 2 * level);
    financial.scores.emplace_back(std::to_string(level), 2 * level);
  }
  CvricsComponent crisis{"crisis_count", {{"0", 10}, {"1", 6}, {"2", 3}, {"3", 0}}};
  spec.components = {social, financial, crisis};
  return spec;
}

}  // namespace bnet
