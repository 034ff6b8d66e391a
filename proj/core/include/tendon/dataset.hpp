#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tendon/kinematics.hpp"
#include "tendon/perception.hpp"
#include "tendon/plant.hpp"
#include "tendon/types.hpp"

namespace tendon {

/// One recorded command/measurement pair. valid=false marks a dropped
/// perception frame whose q_phy carries the last valid estimate forward.
struct DataPair {
    JointConfig q_cmd;
    JointConfig q_phy;
    bool valid = true;
};

struct DatasetMeta {
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    bool perception = false;
    std::string split_tag;
};

struct HysteresisDataset {
    std::vector<DataPair> pairs;
    DatasetMeta meta;

    std::size_t size() const { return pairs.size(); }
};

/// Random joint-space waypoints inside the limits, with q4 <= q5 so the grip
/// opening stays non-negative.
std::vector<JointConfig> random_waypoints(int count, const ManipulatorSpec& spec,
                                          std::mt19937_64& rng);

/// Uniform joint-space interpolation: between consecutive waypoints, insert
/// points spaced exactly step_l2 (default 3*sqrt(5) deg) along the straight
/// line, keeping the waypoints themselves and dropping an interior point that
/// would coincide with the next waypoint.
std::vector<JointConfig> interpolate(const std::vector<JointConfig>& waypoints,
                                     double step_per_joint = 3.0, int dims = 5);

/// Drive the plant through the trajectory, optionally measuring q_phy through
/// the synthetic perception pipeline. Perception failures become flagged
/// pairs carrying the last valid estimate.
HysteresisDataset collect(const std::vector<JointConfig>& trajectory,
                          HysteresisPlant& plant,
                          const PerceptionPipeline* perception,
                          std::mt19937_64& perception_rng);

/// Contiguous temporal split; train is the first floor(train_frac * n) pairs.
std::pair<HysteresisDataset, HysteresisDataset> split(const HysteresisDataset& ds,
                                                      double train_frac = 0.8);

/// Replace dropped frames by carrying the last valid measurement forward
/// (leading invalid frames keep their recorded values).
HysteresisDataset carry_forward_invalid(const HysteresisDataset& ds);

/// CSV persistence: header t,q1_cmd..q5_cmd,q1_phy..q5_phy,valid plus a JSON
/// metadata sidecar next to the file (path + ".meta.json").
void write_dataset_csv(const std::string& path, const HysteresisDataset& ds);
HysteresisDataset read_dataset_csv(const std::string& path);

/// FNV-1a over the serialized pair stream; stable across runs.
std::uint64_t dataset_hash(const HysteresisDataset& ds);

}  // namespace tendon
