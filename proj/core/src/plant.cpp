#include "tendon/plant.hpp"

#include <cmath>
#include <cstdio>

namespace tendon {

double play_operator(double u, double y_prev, double beta) {
    const double r = 0.5 * beta;
    return std::max(u - r, std::min(u + r, y_prev));
}

double dead_zone(double u, double delta) {
    if (u > delta) return u - delta;
    if (u < -delta) return u + delta;
    return 0.0;
}

bool HysteresisPlantParams::valid() const {
    for (int j = 0; j < 5; ++j) {
        if (backlash[j] < 0.0 || dead_zone[j] < 0.0) return false;
        if (gain[j] < 0.5 || gain[j] > 1.5) return false;
        if (std::abs(coupling(j, j) - 1.0) > 1e-12) return false;
        for (int i = 0; i < 5; ++i)
            if (i != j && std::abs(coupling(j, i)) > 0.3) return false;
    }
    return noise_sd >= 0.0;
}

HysteresisPlantParams HysteresisPlantParams::identity() {
    return HysteresisPlantParams{};
}

HysteresisPlantParams HysteresisPlantParams::shipping_defaults() {
    HysteresisPlantParams p;
    p.backlash << 30.0, 18.0, 20.0, 20.0, 24.0;
    p.dead_zone << 2.0, 1.5, 4.0, 1.5, 2.0;
    p.gain << 0.97, 0.96, 0.92, 0.97, 0.96;
    p.coupling = Mat5::Identity();
    p.coupling(2, 0) = 0.12;   // segment-1 pitch drags the wrist
    p.coupling(0, 2) = 0.04;
    p.coupling(3, 4) = 0.06;   // jaw pair cross-talk
    p.coupling(4, 3) = 0.06;
    p.coupling(3, 1) = 0.05;   // segment-1 yaw couples into the jaws
    p.coupling(4, 1) = 0.05;
    p.drift_per_1000 = 0.2;
    p.noise_sd = 0.25;
    p.seed = 42;
    return p;
}

HysteresisPlant::HysteresisPlant(const HysteresisPlantParams& params) : params_(params) {
    reset();
}

void HysteresisPlant::reset() {
    state_ = HysteresisPlantState{};
    state_.rng.seed(params_.seed);
}

JointConfig HysteresisPlant::step(const JointConfig& q_cmd) {
    const Vec5 coupled = params_.coupling * q_cmd.vec();
    Vec5 out;
    for (int j = 0; j < 5; ++j) {
        const double dz = dead_zone(coupled[j], params_.dead_zone[j]);
        state_.play[j] = play_operator(dz, state_.play[j], params_.backlash[j]);
        out[j] = params_.gain[j] * state_.play[j];
    }
    state_.step_count += 1;
    state_.drift = params_.drift_per_1000 * static_cast<double>(state_.step_count) / 1000.0;

    std::normal_distribution<double> noise(0.0, 1.0);
    for (int j = 0; j < 5; ++j) {
        out[j] += state_.drift;
        if (params_.noise_sd > 0.0) out[j] += params_.noise_sd * noise(state_.rng);
    }
    return JointConfig::from_vec(out);
}

CalibrationReference CalibrationReference::hardware() {
    CalibrationReference ref;
    ref.mae << 16.31, 10.09, 11.21, 12.02, 13.84;
    ref.sd << 11.59, 7.67, 7.56, 8.91, 10.37;
    return ref;
}

CalibrationReport calibrate_plant(const HysteresisPlantParams& params,
                                  const std::vector<JointConfig>& commands) {
    HysteresisPlant plant(params);
    const auto ref = CalibrationReference::hardware();

    Vec5 sum_abs = Vec5::Zero(), sum = Vec5::Zero(), sum_sq = Vec5::Zero();
    for (const auto& cmd : commands) {
        const JointConfig phy = plant.step(cmd);
        const Vec5 e = phy.vec() - cmd.vec();
        sum_abs += e.cwiseAbs();
        sum += e;
        sum_sq += e.cwiseProduct(e);
    }
    const double n = static_cast<double>(commands.size());

    CalibrationReport rep;
    rep.reference_mae = ref.mae;
    rep.all_within_band = true;
    for (int j = 0; j < 5; ++j) {
        rep.mae[j] = sum_abs[j] / n;
        const double mean = sum[j] / n;
        rep.sd[j] = std::sqrt(std::max(0.0, sum_sq[j] / n - mean * mean));
        rep.within_band[j] =
            rep.mae[j] >= 0.5 * ref.mae[j] && rep.mae[j] <= 1.5 * ref.mae[j];
        rep.all_within_band = rep.all_within_band && rep.within_band[j];
    }
    return rep;
}

std::string CalibrationReport::to_table() const {
    char buf[512];
    std::string s = "joint   MAE[deg]   SD[deg]   ref_MAE   in_band\n";
    for (int j = 0; j < 5; ++j) {
        std::snprintf(buf, sizeof(buf), "q%d      %8.2f  %8.2f  %8.2f   %s\n", j + 1,
                      mae[j], sd[j], reference_mae[j], within_band[j] ? "yes" : "NO");
        s += buf;
    }
    return s;
}

}  // namespace tendon
