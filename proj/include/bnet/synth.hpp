#pragma once

#include "bnet/network.hpp"
#include "bnet/pipeline.hpp"

namespace bnet {

// Survey-like generator with planted conditional-probability gaps:
//   financial_literacy -> condom_use          +0.06
//   depression -> buys_condom_self             -0.14
//   legal_education -> hiv_test                +0.16
//   financial_plan -> hiv_test                 +0.12
//   govt_scheme -> high_self_efficacy          +0.13
// Each gap is exact for the marginal query P(target | source) because the
// sources of a shared child are independent and the child CPT is additive.
BayesianNetwork survey_generator();

// Scores social_protection and financial_security (0-5, two points per
// level) and crisis_count (0-3, fewer crises score higher) into 0-30.
CvricsSpec survey_cvrics_spec();

}  // namespace bnet
