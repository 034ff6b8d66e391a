#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "tendon/types.hpp"

namespace tendon {

/// Parameters of the synthetic hysteresis plant:
/// q_phy = gain .* Play_beta(DeadZone_delta(C * q_cmd)) + drift + noise.
struct HysteresisPlantParams {
    Vec5 backlash = Vec5::Zero();   // beta_j, full band width, deg
    Vec5 dead_zone = Vec5::Zero();  // delta_j, deg
    Vec5 gain = Vec5::Ones();       // g_j in [0.5, 1.5]
    Mat5 coupling = Mat5::Identity();
    double drift_per_1000 = 0.0;    // deg per 1000 steps
    double noise_sd = 0.0;          // deg
    std::uint64_t seed = 42;

    /// Defaults tuned so a 5,000-step random command sequence lands each
    /// joint's command-vs-physical MAE inside the reference band.
    static HysteresisPlantParams shipping_defaults();
    static HysteresisPlantParams identity();

    bool valid() const;
};

/// Classical backlash (play) operator memory plus drift/noise state.
struct HysteresisPlantState {
    Vec5 play = Vec5::Zero();
    std::uint64_t step_count = 0;
    double drift = 0.0;  // accumulated, deg
    std::mt19937_64 rng;
};

class HysteresisPlant {
public:
    explicit HysteresisPlant(const HysteresisPlantParams& params);

    /// Advance one step: apply coupling, dead zone, play, gain, drift, noise.
    JointConfig step(const JointConfig& q_cmd);

    void reset();
    const HysteresisPlantParams& params() const { return params_; }
    const HysteresisPlantState& state() const { return state_; }

private:
    HysteresisPlantParams params_;
    HysteresisPlantState state_;
};

/// Scalar play operator: advance memory y against input u with band width
/// beta (deg). Returns the new memory value.
double play_operator(double u, double y_prev, double beta);

/// Scalar dead zone: zero inside +-delta, shifted toward zero outside.
double dead_zone(double u, double delta);

/// Reference per-joint command-vs-physical statistics the shipping defaults
/// are tuned against (hardware measurements on the physical manipulator).
struct CalibrationReference {
    Vec5 mae;
    Vec5 sd;
    static CalibrationReference hardware();
};

struct CalibrationReport {
    Vec5 mae = Vec5::Zero();
    Vec5 sd = Vec5::Zero();
    Vec5 reference_mae = Vec5::Zero();
    std::array<bool, 5> within_band{};  // MAE within +-50% of the reference
    bool all_within_band = false;
    std::string to_table() const;
};

/// Run a command sequence through a freshly seeded plant and report per-joint
/// MAE/SD of (q_phy - q_cmd) against the reference band.
CalibrationReport calibrate_plant(const HysteresisPlantParams& params,
                                  const std::vector<JointConfig>& commands);

}  // namespace tendon
