#pragma once

#include <ostream>
#include <vector>

#include "isopyc/config.hpp"
#include "isopyc/elliptic.hpp"
#include "isopyc/state.hpp"

namespace isopyc {

/// Raw (unprojected) initial fields from the config's init block:
/// equilibrium, a single (k,n) eta mode, seeded smooth random fields, or the
/// layer-steepening configuration used by the blow-up demonstration.
struct RawInit {
    std::vector<Field> V;
    Field w;
    Field eta;
};
RawInit raw_initial_fields(const RunConfig& cfg);

/// Projected admissible initial state.
FlowState build_initial_state(const RunConfig& cfg, const StratificationProfile& prof,
                              PressureSolver& solver);

/// Time-steps the configured run to t_end or blow-up, writing the energy CSV
/// and snapshots. Returns the process exit code: 0 completed, 1 config
/// error, 2 solver failure, 3 blow-up detected (final report written).
int run_simulation(const RunConfig& cfg, std::ostream& log);

} // namespace isopyc
