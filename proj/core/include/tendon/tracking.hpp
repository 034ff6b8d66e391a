#pragma once

#include <string>
#include <vector>

#include "tendon/cable.hpp"
#include "tendon/compensate.hpp"
#include "tendon/plant.hpp"
#include "tendon/trajectory.hpp"

namespace tendon {

enum class ControlMode { Uncalibrated, Calibrated };
std::string to_string(ControlMode m);

struct StepTrace {
    int repeat = 0;
    int t = 0;
    JointConfig q_desired, q_cmd, q_phy;
    Vec3 p_desired = Vec3::Zero(), p_achieved = Vec3::Zero();
    double pos_err = 0.0;
    double ori_err_deg = 0.0;
};

struct TrackingReport {
    TrajectoryKind kind = TrajectoryKind::Random;
    ControlMode mode = ControlMode::Uncalibrated;
    Vec3 axis_mae = Vec3::Zero();  // mean |dx|, |dy|, |dz|
    double pos_mae = 0.0, pos_sd = 0.0;
    double ori_mae_deg = 0.0, ori_sd_deg = 0.0;
    Vec5 joint_mae = Vec5::Zero(), joint_sd = Vec5::Zero();
    int runs = 0;
    std::size_t steps = 0;
    std::vector<StepTrace> traces;
};

struct TrackOptions {
    int repeats = 5;
    std::uint64_t seed = 0;  // plant reseeded per repeat from this
    bool keep_traces = true;
};

/// Run the trajectory through the plant `repeats` times in the given control
/// mode. Calibrated mode requires trained forward/inverse models; the cable
/// commands are computed along the way to exercise the drive path.
TrackingReport track(const TaskTrajectory& traj, ControlMode mode,
                     const HysteresisPlantParams& plant_params,
                     const ManipulatorSpec& spec, const std::vector<CableSpec>& cables,
                     const SequenceModel* forward_model,
                     const SequenceModel* inverse_model, const CompensatorConfig& comp,
                     const TrackOptions& opts);

struct ReportPaths {
    std::string per_step_csv;
    std::string aggregate_csv;
    std::string table_txt;
};

/// Emit per-step traces, the aggregate table (one row per kind x mode) and a
/// plain-text summary table. Throws on an empty report list.
void report_emit(const std::vector<TrackingReport>& reports, const ReportPaths& paths);

struct ImprovementSummary {
    double pos_ratio = 0.0;  // calibrated / uncalibrated combined position MAE
    double ori_ratio = 0.0;
};

/// Combined calibrated/uncalibrated error ratios across every kind present in
/// both modes.
ImprovementSummary improvement_summary(const std::vector<TrackingReport>& reports);

/// Plant external interface: step,q_cmd x5,q_phy x5 rows.
void write_plant_trace_csv(const std::string& path,
                           const std::vector<std::pair<JointConfig, JointConfig>>& trace);

}  // namespace tendon
