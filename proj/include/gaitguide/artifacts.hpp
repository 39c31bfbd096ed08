#pragma once

#include <string>

#include "gaitguide/simulate.hpp"

namespace gaitguide {

class IoFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Write the run artifacts into out_dir: trace.csv, trajectory.svg (world,
/// true and estimated paths, step and audio events), rope.svg (both rope
/// channels with the heading response below), and map.pgm when a SLAM grid
/// is present. Refuses empty traces before touching the filesystem.
void emit_artifacts(const RunResult& result, const WorldModel& world,
                    const std::string& out_dir);

}  // namespace gaitguide
