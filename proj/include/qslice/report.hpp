#pragma once

#include <string>

#include <json.hpp>

#include "qslice/stats.hpp"
#include "qslice/tangency.hpp"
#include "qslice/variety.hpp"

namespace qslice {

// All report writers use ordered JSON with keys inserted in a fixed order so a
// given run renders byte-identically.
using Json = nlohmann::ordered_json;

Json variety_json(const VarietySpec& spec);
Json rational_json(const Rational& r);
Json histogram_json(const IntersectionHistogram& hist, int d);

Json levels_report_json(const VarietySpec& spec, const std::vector<ConvergenceRow>& rows,
                        const std::vector<Rational>& limit);
std::string levels_report_csv(const VarietySpec& spec, const std::vector<ConvergenceRow>& rows,
                              const std::vector<Rational>& limit);

Json formula_json(int d, int e);
std::string formula_csv(int d, int e);

Json mu_json(const VarietySpec& spec, const MuReport& report);
std::string mu_csv(const MuReport& report);

Json tangency_json(const VarietySpec& spec, const TangencyReport& report, const FieldCtx& witness_field,
                   const FieldCtx& base);
std::string tangency_csv(const TangencyReport& report);

Json probe_json(const VarietySpec& spec, const ConjectureProbe& probe);
std::string probe_csv(const ConjectureProbe& probe);

// Two-column plot data: q^N and the deviation from the limit, one level per line.
std::string plot_data(const Variety& var, const std::vector<ConvergenceRow>& rows);

}  // namespace qslice
