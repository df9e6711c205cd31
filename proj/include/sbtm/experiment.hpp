#pragma once

#include "sbtm/config.hpp"

namespace sbtm {

/// Concrete objects for one configured run.
struct Experiment {
    TargetDensity target;
    InitialDensity initial;
    AnnealingSchedule schedule;
    RunOptions options;
};

TargetDensity build_target(const TargetSpec& spec);
InitialDensity build_initial(const InitialSpec& spec, int dim);

/// Resolves defaults (schedule duration 0 -> T, t_min 0 -> dt) and wires everything up.
Experiment build_experiment(const RunConfig& config);

}  // namespace sbtm
