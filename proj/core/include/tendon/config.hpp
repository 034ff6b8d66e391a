#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tendon/cable.hpp"
#include "tendon/compensate.hpp"
#include "tendon/kinematics.hpp"
#include "tendon/model.hpp"
#include "tendon/perception.hpp"
#include "tendon/plant.hpp"
#include "tendon/train.hpp"
#include "tendon/trajectory.hpp"

namespace tendon {

struct DatasetConfig {
    int waypoints = 130;
    double step_deg = 3.0;
    double train_frac = 0.8;
    bool perception = false;
    PerceptionNoise perception_noise{};
};

struct TrainConfig {
    ModelKind kind = ModelKind::Tcn;
    int L = 80;
    int channels = 5;
    int hidden = 128;
    int epochs = 500;
    double lr = 0.001;
    int batch = 32;
    int patience = 100;
    std::vector<int> sweep_lengths{10, 50, 65, 80, 100, 120};
    int sweep_repeats = 3;
};

struct EvalConfig {
    std::vector<TrajectoryKind> kinds{TrajectoryKind::Random, TrajectoryKind::Circle,
                                      TrajectoryKind::Zigzag};
    TrajectoryParams trajectory{};
    int repeats = 5;
};

/// Everything one experiment needs; serialized as a single JSON file with
/// strict key checking. All randomness flows from `seed` through named
/// sub-streams.
struct RunConfig {
    std::uint64_t seed = 42;
    std::string out_dir = "out";
    ManipulatorSpec manipulator{};
    double cable_pitch_circle_diameter = 4.0;
    DecouplingOptions decoupling{};
    HysteresisPlantParams plant = HysteresisPlantParams::shipping_defaults();
    MarkerRig rig{};
    DatasetConfig dataset{};
    TrainConfig train{};
    CompensatorConfig compensator{};
    EvalConfig eval{};

    /// Desk-scale defaults: small dataset, 500 epochs, effective alpha.
    static RunConfig desk_default();
    /// Full-scale settings mirroring the hardware experiment dimensions.
    static RunConfig full_default();

    std::vector<CableSpec> cables() const {
        return default_cable_routing(cable_pitch_circle_diameter);
    }

    std::string to_json() const;
    static RunConfig from_json(const std::string& text);
    static RunConfig load(const std::string& path);
    void save(const std::string& path) const;

    /// FNV-1a over the canonical serialized form.
    std::uint64_t hash() const;

    /// Cross-field invariants (limits ordered, L consistent, plant valid).
    void validate() const;
};

}  // namespace tendon
