#pragma once

#include "courtvec/evaluation.hpp"
#include "courtvec/lineup_opt.hpp"
#include "courtvec/sim.hpp"

#include <json.hpp>

namespace courtvec {

using Json = nlohmann::ordered_json;

Json lineup_json(const Lineup& lineup);

/// [{class, label, points}] for all 23 outcome classes.
Json outcome_table();

/// [{class, label, probability}] in class order.
Json distribution_json(const Distribution& dist);

Json series_json(const SeriesResult& result);
Json fifth_man_json(const FifthManRow& row);
Json validation_json(const ValidationReport& report);

}  // namespace courtvec
