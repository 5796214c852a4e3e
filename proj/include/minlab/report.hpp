#ifndef MINLAB_REPORT_HPP
#define MINLAB_REPORT_HPP

#include <nlohmann/json.hpp>

#include "minlab/dominance.hpp"
#include "minlab/minimal.hpp"
#include "minlab/montecarlo.hpp"
#include "minlab/regularity.hpp"
#include "minlab/uniformization.hpp"

namespace minlab {

inline constexpr int kReportVersion = 1;

/// Rounds to 12 significant digits so dumped reports diff cleanly.
/// Non-finite values become null.
nlohmann::json num(double v);

nlohmann::json to_json(const BracketedValue& b, bool with_trace = false);
nlohmann::json to_json(const DominanceWitness& w);
nlohmann::json to_json(const DominanceReport& r);
nlohmann::json to_json(const KirsteinReport& r);
nlohmann::json to_json(const SingleBirthReport& r);
nlohmann::json to_json(const RegularityVerdict& v);
nlohmann::json to_json(const TruncatedComparison& c);
nlohmann::json to_json(const SimulationResult& r, State max_state = 10);
nlohmann::json to_json(const TransitionKernel& k);

/// JSON text with sorted keys and two-space indent.
std::string dump(const nlohmann::json& j);

}  // namespace minlab

#endif
