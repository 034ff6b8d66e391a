#include "tendon/compensate.hpp"

#include <cmath>

namespace tendon {

CompensationResult compensate(const Eigen::MatrixXd& desired_window,
                              const SequenceModel& forward_model,
                              const SequenceModel& inverse_model,
                              const CompensatorConfig& cfg) {
    const int L = cfg.window_length;
    const Vec5 q_desired = desired_window.row(L - 1).transpose();

    CompensationResult res;
    if (cfg.bypass) {
        res.q_calibrated = JointConfig::from_vec(q_desired);
        res.within_threshold = true;
        return res;
    }

    // phase 1: inverse-model initialization
    Vec5 q_cal = inverse_model.predict(desired_window);

    // phase 2: refine against the forward model
    Eigen::MatrixXd window = desired_window;
    Vec5 loss = Vec5::Zero();
    int used = 0;
    for (int it = 0; it < cfg.max_iterations; ++it) {
        window.row(L - 1) = q_cal.transpose();
        loss = forward_model.predict(window) - q_desired;

        bool any_update = false;
        for (int j = 0; j < cfg.joint_count; ++j) {
            if (std::abs(loss[j]) > cfg.threshold) {
                q_cal[j] -= cfg.alpha * loss[j];
                any_update = true;
            }
        }
        used = it + 1;
        if (!any_update) break;  // every joint within the threshold
    }

    window.row(L - 1) = q_cal.transpose();
    res.final_loss = forward_model.predict(window) - q_desired;
    res.q_calibrated = JointConfig::from_vec(q_cal);
    res.iterations_used = used;
    res.within_threshold = res.final_loss.cwiseAbs().maxCoeff() <= cfg.threshold;
    return res;
}

CalibratedController::CalibratedController(const SequenceModel& forward_model,
                                           const SequenceModel& inverse_model,
                                           CompensatorConfig cfg)
    : forward_(forward_model), inverse_(inverse_model), cfg_(cfg) {}

void CalibratedController::reset() {
    desired_history_.clear();
    calibrated_history_.clear();
    last_ = CompensationResult{};
}

Eigen::MatrixXd CalibratedController::current_window(const JointConfig& q_desired) const {
    const int L = cfg_.window_length;
    const auto& hist = cfg_.use_calibrated_history ? calibrated_history_ : desired_history_;
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(L, 5);
    const int have = static_cast<int>(hist.size());
    for (int i = 0; i < L - 1; ++i) {
        const int idx = have - (L - 1) + i;
        if (idx >= 0) w.row(i) = hist[idx].transpose();
    }
    w.row(L - 1) = q_desired.vec().transpose();
    return w;
}

JointConfig CalibratedController::step(const JointConfig& q_desired) {
    const Eigen::MatrixXd window = current_window(q_desired);
    last_ = compensate(window, forward_, inverse_, cfg_);

    // history records what the user commanded, never the refined value
    desired_history_.push_back(q_desired.vec());
    calibrated_history_.push_back(last_.q_calibrated.vec());
    const std::size_t keep = static_cast<std::size_t>(cfg_.window_length) - 1;
    while (desired_history_.size() > keep) desired_history_.pop_front();
    while (calibrated_history_.size() > keep) calibrated_history_.pop_front();

    return last_.q_calibrated;
}

}  // namespace tendon
