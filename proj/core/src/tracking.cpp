#include "tendon/tracking.hpp"

#include <cmath>
#include <stdexcept>

#include "tendon/io_util.hpp"
#include "tendon/rng.hpp"

namespace tendon {

std::string to_string(ControlMode m) {
    return m == ControlMode::Calibrated ? "calibrated" : "uncalibrated";
}

namespace {

JointConfig clamp_to_limits(const JointConfig& q, const JointLimits& lim) {
    Vec5 v = q.vec();
    for (int j = 0; j < 5; ++j) v[j] = std::clamp(v[j], lim.min[j], lim.max[j]);
    return JointConfig::from_vec(v);
}

struct Welford {
    double sum = 0.0, sum_sq = 0.0;
    std::size_t n = 0;
    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++n;
    }
    double mean() const { return n ? sum / n : 0.0; }
    double sd() const {
        if (!n) return 0.0;
        const double m = mean();
        return std::sqrt(std::max(0.0, sum_sq / n - m * m));
    }
};

}  // namespace

TrackingReport track(const TaskTrajectory& traj, ControlMode mode,
                     const HysteresisPlantParams& plant_params,
                     const ManipulatorSpec& spec, const std::vector<CableSpec>& cables,
                     const SequenceModel* forward_model,
                     const SequenceModel* inverse_model, const CompensatorConfig& comp,
                     const TrackOptions& opts) {
    if (mode == ControlMode::Calibrated && (!forward_model || !inverse_model))
        throw std::runtime_error("calibrated tracking requires trained models");

    TrackingReport report;
    report.kind = traj.kind;
    report.mode = mode;

    Welford pos, ori;
    Welford axis[3];
    Welford joints[5];

    for (int rep = 0; rep < opts.repeats; ++rep) {
        HysteresisPlantParams pp = plant_params;
        pp.seed = substream_seed(opts.seed, "track-rep-" + std::to_string(rep));
        HysteresisPlant plant(pp);

        CompensatorConfig ccfg = comp;
        ccfg.bypass = mode == ControlMode::Uncalibrated;
        // the uncalibrated path never touches the models
        static const struct Passthrough final : SequenceModel {
            Vec5 predict(const Eigen::MatrixXd& w) const override {
                return w.row(w.rows() - 1).transpose();
            }
            int window_length() const override { return 1; }
        } passthrough;
        const SequenceModel& fwd = forward_model ? *forward_model : passthrough;
        const SequenceModel& inv = inverse_model ? *inverse_model : passthrough;
        CalibratedController controller(fwd, inv, ccfg);

        for (std::size_t t = 0; t < traj.samples.size(); ++t) {
            const auto& sample = traj.samples[t];
            JointConfig q_cmd = mode == ControlMode::Calibrated
                                    ? controller.step(sample.q_desired)
                                    : sample.q_desired;
            q_cmd = clamp_to_limits(q_cmd, spec.joint_limits);
            (void)joints_to_cables(q_cmd, spec, cables);  // drive-path consistency

            const JointConfig q_phy = plant.step(q_cmd);
            const RigidTransform achieved = forward_kinematics(q_phy, spec);
            const RigidTransform& desired = sample.desired_pose;

            const Vec3 dp = achieved.p - desired.p;
            const double pe = dp.norm();
            const double oe = rotation_angle_deg(desired.R, achieved.R);

            pos.add(pe);
            ori.add(oe);
            for (int a = 0; a < 3; ++a) axis[a].add(std::abs(dp[a]));
            const Vec5 je = (q_phy.vec() - sample.q_desired.vec()).cwiseAbs();
            for (int j = 0; j < 5; ++j) joints[j].add(je[j]);

            if (opts.keep_traces) {
                StepTrace tr;
                tr.repeat = rep;
                tr.t = static_cast<int>(t);
                tr.q_desired = sample.q_desired;
                tr.q_cmd = q_cmd;
                tr.q_phy = q_phy;
                tr.p_desired = desired.p;
                tr.p_achieved = achieved.p;
                tr.pos_err = pe;
                tr.ori_err_deg = oe;
                report.traces.push_back(tr);
            }
        }
    }

    report.pos_mae = pos.mean();
    report.pos_sd = pos.sd();
    report.ori_mae_deg = ori.mean();
    report.ori_sd_deg = ori.sd();
    for (int a = 0; a < 3; ++a) report.axis_mae[a] = axis[a].mean();
    for (int j = 0; j < 5; ++j) {
        report.joint_mae[j] = joints[j].mean();
        report.joint_sd[j] = joints[j].sd();
    }
    report.runs = opts.repeats;
    report.steps = pos.n;
    return report;
}

void report_emit(const std::vector<TrackingReport>& reports, const ReportPaths& paths) {
    if (reports.empty()) throw std::runtime_error("refusing to emit an empty report");

    if (!paths.per_step_csv.empty()) {
        std::string out =
            "kind,mode,repeat,t,q1_des,q2_des,q3_des,q4_des,q5_des,"
            "q1_cmd,q2_cmd,q3_cmd,q4_cmd,q5_cmd,q1_phy,q2_phy,q3_phy,q4_phy,q5_phy,"
            "x_des,y_des,z_des,x_ach,y_ach,z_ach,pos_err,ori_err_deg\n";
        for (const auto& r : reports) {
            for (const auto& tr : r.traces) {
                out += to_string(r.kind) + "," + to_string(r.mode) + "," +
                       std::to_string(tr.repeat) + "," + std::to_string(tr.t);
                const Vec5 d = tr.q_desired.vec(), c = tr.q_cmd.vec(), p = tr.q_phy.vec();
                for (int j = 0; j < 5; ++j) out += "," + format_double(d[j]);
                for (int j = 0; j < 5; ++j) out += "," + format_double(c[j]);
                for (int j = 0; j < 5; ++j) out += "," + format_double(p[j]);
                for (int a = 0; a < 3; ++a) out += "," + format_double(tr.p_desired[a]);
                for (int a = 0; a < 3; ++a) out += "," + format_double(tr.p_achieved[a]);
                out += "," + format_double(tr.pos_err) + "," +
                       format_double(tr.ori_err_deg) + "\n";
            }
        }
        write_text_file(paths.per_step_csv, out);
    }

    if (!paths.aggregate_csv.empty()) {
        std::string out =
            "kind,mode,x_mae,y_mae,z_mae,pos_mae,pos_sd,ori_mae_deg,ori_sd_deg,"
            "q1_mae,q2_mae,q3_mae,q4_mae,q5_mae,q1_sd,q2_sd,q3_sd,q4_sd,q5_sd,runs,steps\n";
        for (const auto& r : reports) {
            out += to_string(r.kind) + "," + to_string(r.mode);
            for (int a = 0; a < 3; ++a) out += "," + format_double(r.axis_mae[a]);
            out += "," + format_double(r.pos_mae) + "," + format_double(r.pos_sd);
            out += "," + format_double(r.ori_mae_deg) + "," + format_double(r.ori_sd_deg);
            for (int j = 0; j < 5; ++j) out += "," + format_double(r.joint_mae[j]);
            for (int j = 0; j < 5; ++j) out += "," + format_double(r.joint_sd[j]);
            out += "," + std::to_string(r.runs) + "," + std::to_string(r.steps) + "\n";
        }
        write_text_file(paths.aggregate_csv, out);
    }

    if (!paths.table_txt.empty()) {
        char buf[256];
        std::string out = "MAE on tracked trajectories (position mm, orientation deg)\n";
        for (const auto& r : reports) {
            std::snprintf(buf, sizeof(buf),
                          "%-8s %-13s  X %6.2f  Y %6.2f  Z %6.2f  | pos %6.2f +- %5.2f"
                          "  | ori %6.2f +- %5.2f\n",
                          to_string(r.kind).c_str(), to_string(r.mode).c_str(),
                          r.axis_mae[0], r.axis_mae[1], r.axis_mae[2], r.pos_mae,
                          r.pos_sd, r.ori_mae_deg, r.ori_sd_deg);
            out += buf;
        }
        write_text_file(paths.table_txt, out);
    }
}

ImprovementSummary improvement_summary(const std::vector<TrackingReport>& reports) {
    double cal_pos = 0.0, unc_pos = 0.0, cal_ori = 0.0, unc_ori = 0.0;
    std::size_t cal_n = 0, unc_n = 0;
    for (const auto& r : reports) {
        const double w = static_cast<double>(r.steps);
        if (r.mode == ControlMode::Calibrated) {
            cal_pos += r.pos_mae * w;
            cal_ori += r.ori_mae_deg * w;
            cal_n += r.steps;
        } else {
            unc_pos += r.pos_mae * w;
            unc_ori += r.ori_mae_deg * w;
            unc_n += r.steps;
        }
    }
    ImprovementSummary s;
    if (cal_n && unc_n) {
        s.pos_ratio = (cal_pos / cal_n) / (unc_pos / unc_n);
        s.ori_ratio = (cal_ori / cal_n) / (unc_ori / unc_n);
    }
    return s;
}

void write_plant_trace_csv(const std::string& path,
                           const std::vector<std::pair<JointConfig, JointConfig>>& trace) {
    std::string out =
        "step,q1_cmd,q2_cmd,q3_cmd,q4_cmd,q5_cmd,q1_phy,q2_phy,q3_phy,q4_phy,q5_phy\n";
    for (std::size_t t = 0; t < trace.size(); ++t) {
        out += std::to_string(t);
        const Vec5 c = trace[t].first.vec(), p = trace[t].second.vec();
        for (int j = 0; j < 5; ++j) out += "," + format_double(c[j]);
        for (int j = 0; j < 5; ++j) out += "," + format_double(p[j]);
        out += "\n";
    }
    write_text_file(path, out);
}

}  // namespace tendon
