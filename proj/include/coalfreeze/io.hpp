// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <json.hpp>

#include <string>

#include "coalfreeze/chains.hpp"
#include "coalfreeze/coalescent.hpp"
#include "coalfreeze/decrement.hpp"
#include "coalfreeze/eppf.hpp"
#include "coalfreeze/mc.hpp"
#include "coalfreeze/measures.hpp"

namespace coalfreeze {

inline constexpr const char* kFormatVersion = "coalfreeze-v1";

// Measure spec: {"atoms":[{"x":"1/2","w":"1"}],
//                "beta":[{"a":1,"b":1,"w":"1"}], "rho":"1/2"}.
// Rationals are "p/q" strings; bare JSON numbers are converted exactly from
// their binary value and mark the measure "exact": false.
FreezeMeasure measure_from_json(const nlohmann::json& j);
nlohmann::json measure_to_json(const FreezeMeasure& m);

// {"flavor":"mohle","rows":[["1"],["1/2","1/2"], ...]}
DecrementMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const DecrementMatrix& q);
std::string matrix_to_csv(const DecrementMatrix& q);  // columns b,k,q

// {"n_max":3,"values":[{"partition":[2,1],"p":"1/6"}, ...]}
EppfTable eppf_from_json(const nlohmann::json& j);
nlohmann::json eppf_to_json(const EppfTable& p);
std::string eppf_to_csv(const EppfTable& p);  // partition,m,p_exact,p_float

nlohmann::json empirical_to_json(const EmpiricalEppf& emp,
                                 const EppfTable* exact = nullptr);
std::string empirical_to_csv(const EmpiricalEppf& emp,
                             const EppfTable* exact = nullptr);

// Set partitions as sorted block lists, e.g. [[1,3],[2]].
nlohmann::json set_partition_to_json(const SetPartition& sp);
nlohmann::json distribution_to_json(const Distribution& dist);

nlohmann::json trajectory_to_json(const Trajectory& t);

nlohmann::json phi_ladder_to_json(const PhiLadder& ladder);
nlohmann::json positivity_report_to_json(const PositivityReport& report);

nlohmann::json load_json_file(const std::string& path);

}  // namespace coalfreeze
