#pragma once

#include <deque>

#include "tendon/model.hpp"
#include "tendon/types.hpp"

namespace tendon {

struct CompensatorConfig {
    int max_iterations = 50;    // M
    double alpha = 0.001;       // update step per degree of loss
    double threshold = 4.0;     // Thr, deg; strict inequality gates updates
    int window_length = 80;     // L, must match the trained models
    int joint_count = 5;        // Q
    bool use_calibrated_history = false;
    bool bypass = false;        // uncalibrated pass-through

    /// Step scale that makes the refinement loop effective at desk scale;
    /// the literal 0.001 preset is kept for parity.
    static constexpr double kAlphaEffective = 0.5;
};

struct CompensationResult {
    JointConfig q_calibrated;
    Vec5 final_loss = Vec5::Zero();      // forward-model loss after refinement
    int iterations_used = 0;
    bool within_threshold = false;       // all |loss| <= Thr at exit
};

/// Two-phase compensation: initialize from the inverse model, then refine the
/// candidate against the forward model, updating only joints whose |loss|
/// exceeds the threshold.
CompensationResult compensate(const Eigen::MatrixXd& desired_window,
                              const SequenceModel& forward_model,
                              const SequenceModel& inverse_model,
                              const CompensatorConfig& cfg);

/// Stateful controller: keeps the last L-1 desired configurations (zero
/// padded while underfull), compensates each incoming command, and records
/// the desired angle (not the calibrated one) into history.
class CalibratedController {
public:
    CalibratedController(const SequenceModel& forward_model,
                         const SequenceModel& inverse_model, CompensatorConfig cfg);

    JointConfig step(const JointConfig& q_desired);
    CompensationResult last_result() const { return last_; }
    Eigen::MatrixXd current_window(const JointConfig& q_desired) const;
    void reset();

private:
    const SequenceModel& forward_;
    const SequenceModel& inverse_;
    CompensatorConfig cfg_;
    std::deque<Vec5> desired_history_;     // oldest first, length <= L-1
    std::deque<Vec5> calibrated_history_;  // used when the flag is set
    CompensationResult last_;
};

}  // namespace tendon
