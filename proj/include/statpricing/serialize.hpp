#pragma once

#include <json.hpp>

#include "statpricing/demand.hpp"
#include "statpricing/dynamic.hpp"
#include "statpricing/experiment.hpp"
#include "statpricing/markov.hpp"
#include "statpricing/sim.hpp"
#include "statpricing/static_policy.hpp"

namespace statpricing {

// JSON views used by the CLI and the JSON report. Optional values serialize as null.
void to_json(nlohmann::json& j, const DemandModel& d);
void from_json(const nlohmann::json& j, DemandModel& d);
void to_json(nlohmann::json& j, const QueueInstance& inst);
void from_json(const nlohmann::json& j, QueueInstance& inst);
void to_json(nlohmann::json& j, const Policy& p);
void to_json(nlohmann::json& j, const PolicyMetrics& m);
void to_json(nlohmann::json& j, const SolveResult& r);
void to_json(nlohmann::json& j, const StaticChoice& s);
void to_json(nlohmann::json& j, const SimResult& s);
void to_json(nlohmann::json& j, const ComparisonReport& r);
void to_json(nlohmann::json& j, const GuaranteeBundle& g);
void to_json(nlohmann::json& j, const Ratios& r);
void to_json(nlohmann::json& j, const RatioRow& r);
void to_json(nlohmann::json& j, const CellSummary& c);
void to_json(nlohmann::json& j, const TightnessRow& r);
void to_json(nlohmann::json& j, const SojournExample& s);

}  // namespace statpricing
