#pragma once

#include <json.hpp>

#include "ddopt/drawdown.hpp"
#include "ddopt/models.hpp"
#include "ddopt/oracle.hpp"
#include "ddopt/pontryagin.hpp"
#include "ddopt/simulate.hpp"
#include "ddopt/valuation.hpp"

// JSON forms (strict: unknown keys are rejected):
//   model:    {"kind":"bm","mu":..,"sigma":..,"q":..}
//             {"kind":"gbm","alpha":..,"beta":..,"eps":..,"q":..,"x0":..}
//   drawdown: {"kind":"affine","xi":..,"d0":..}
//             {"a":..,"d_a":..,"breakpoints":[..],"slopes":[..],("u_max":..)}
namespace ddopt {

using nlohmann::json;

TransformModel model_from_json(const json& j);
json model_to_json(const TransformModel& tm);

DrawdownFn drawdown_from_json(const json& j, double default_a = 0.0);
json drawdown_to_json(const DrawdownFn& dd);

json value_breakdown_to_json(const ValueBreakdown& vb);
json sim_result_to_json(const SimResult& r);
json pmp_solution_to_json(const PMPSolution& sol);
json pmp_report_to_json(const PMPVerifyReport& rep);
json oracle_result_to_json(const OracleResult& res);
json oracle_compare_to_json(const OracleCompareReport& rep);

// throws ValidationError when j carries a key outside allowed
void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const char* where);

} // namespace ddopt
