// Command-line front end for the hysteresis compensation pipeline:
// collect -> train/sweep -> track, plus a single-window compensation probe.

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "tendon/config.hpp"
#include "tendon/dataset.hpp"
#include "tendon/io_util.hpp"
#include "tendon/rng.hpp"
#include "tendon/tracking.hpp"
#include "tendon/train.hpp"

namespace fs = std::filesystem;
using namespace tendon;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    long long seed = -1;  // -1: config (or TENDON_HYST_SEED) decides
};

RunConfig load_config(const CommonArgs& args) {
    RunConfig cfg =
        args.config_path.empty() ? RunConfig::desk_default() : RunConfig::load(args.config_path);
    if (const char* env = std::getenv("TENDON_HYST_SEED")) cfg.seed = std::stoull(env);
    if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    cfg.plant.seed = substream_seed(cfg.seed, "plant");
    fs::create_directories(cfg.out_dir);
    return cfg;
}

std::uint64_t file_hash(const std::string& path) {
    const std::string bytes = read_text_file(path);
    return fnv1a(bytes.data(), bytes.size());
}

HysteresisDataset run_collect(const RunConfig& cfg, bool identity_plant, bool trace) {
    auto rng = make_rng(cfg.seed, "dataset");
    const auto waypoints = random_waypoints(cfg.dataset.waypoints, cfg.manipulator, rng);
    const auto trajectory = interpolate(waypoints, cfg.dataset.step_deg);

    HysteresisPlantParams pp =
        identity_plant ? HysteresisPlantParams::identity() : cfg.plant;
    pp.seed = substream_seed(cfg.seed, "plant");
    HysteresisPlant plant(pp);

    std::optional<PerceptionPipeline> perception;
    if (cfg.dataset.perception)
        perception.emplace(cfg.manipulator, cfg.rig, cfg.dataset.perception_noise);
    auto prng = make_rng(cfg.seed, "perception");

    HysteresisDataset ds =
        collect(trajectory, plant, perception ? &*perception : nullptr, prng);
    ds.meta.seed = cfg.seed;
    ds.meta.config_hash = cfg.hash();

    const std::string path = cfg.out_dir + "/dataset.csv";
    write_dataset_csv(path, ds);

    if (trace) {
        std::vector<std::pair<JointConfig, JointConfig>> tr;
        for (const auto& p : ds.pairs) tr.emplace_back(p.q_cmd, p.q_phy);
        write_plant_trace_csv(cfg.out_dir + "/plant_trace.csv", tr);
    }

    std::vector<JointConfig> cmds;
    for (const auto& p : ds.pairs) cmds.push_back(p.q_cmd);
    const CalibrationReport cal = calibrate_plant(pp, cmds);
    std::cout << "collected " << ds.pairs.size() << " pairs from "
              << waypoints.size() << " waypoints -> " << path << "\n";
    std::cout << cal.to_table();
    std::cout << "dataset_hash=" << std::hex << dataset_hash(ds) << std::dec << "\n";
    return ds;
}

int cmd_collect(const CommonArgs& common, bool identity_plant, bool trace) {
    const RunConfig cfg = load_config(common);
    run_collect(cfg, identity_plant, trace);
    return 0;
}

int cmd_train(const CommonArgs& common, std::string dataset_path, bool sweep,
              const std::string& direction) {
    const RunConfig cfg = load_config(common);
    if (dataset_path.empty()) dataset_path = cfg.out_dir + "/dataset.csv";
    if (!fs::exists(dataset_path)) {
        std::cerr << "error: dataset not found at " << dataset_path
                  << " (run `collect` first or pass --dataset)\n";
        return 1;
    }
    const HysteresisDataset ds = read_dataset_csv(dataset_path);
    const auto [train_ds, val_ds] = split(ds, cfg.dataset.train_frac);
    const Vec5 scale = joint_scale(cfg.manipulator);

    TrainOptions topts;
    topts.lr = cfg.train.lr;
    topts.batch = cfg.train.batch;
    topts.epochs = cfg.train.epochs;
    topts.patience = cfg.train.patience;

    if (sweep) {
        SweepOptions sopts;
        sopts.lengths = cfg.train.sweep_lengths;
        sopts.repeats = cfg.train.sweep_repeats;
        sopts.train = topts;
        sopts.channels = cfg.train.channels;
        sopts.hidden = cfg.train.hidden;
        const auto dir = model_direction_from(direction);
        const SweepReport report =
            sweep_L(train_ds, val_ds, dir, scale, cfg.seed, sopts);
        write_sweep_detail_csv(cfg.out_dir + "/sweep_detail.csv", report);
        write_sweep_summary_csv(cfg.out_dir + "/sweep_summary.csv", report);
        for (const auto& row : report.summary)
            std::cout << to_string(row.kind) << " L=" << row.L << " val_rmse "
                      << row.mean_rmse_deg << " +- " << row.sd_rmse_deg << " deg\n";
        std::cout << "sweep rows: " << report.summary.size() << " -> "
                  << cfg.out_dir << "/sweep_summary.csv\n";
        return 0;
    }

    for (const auto dir : {ModelDirection::Forward, ModelDirection::Inverse}) {
        const std::string tag = to_string(dir);
        Model init =
            cfg.train.kind == ModelKind::Tcn
                ? Model::make_tcn(TcnConfig{cfg.train.L, 3, 2, cfg.train.channels}, dir,
                                  scale, substream_seed(cfg.seed, "init-" + tag))
                : Model::make_fnn(FnnConfig{cfg.train.L, cfg.train.hidden}, dir, scale,
                                  substream_seed(cfg.seed, "init-" + tag));
        TrainOptions o = topts;
        o.seed = substream_seed(cfg.seed, "train-" + tag);
        const TrainResult res = train_model(std::move(init), train_ds, val_ds, o);

        const std::string path = cfg.out_dir + "/model_" + tag + ".json";
        res.model.save(path);
        std::cout << tag << ": best val RMSE " << res.model.meta.best_val_rmse_deg
                  << " deg at epoch " << res.model.meta.best_epoch << " -> " << path
                  << "\n";
        std::cout << tag << "_checkpoint_hash=" << std::hex << file_hash(path)
                  << std::dec << "\n";
    }
    return 0;
}

int cmd_track(const CommonArgs& common, const std::string& mode_arg,
              const std::string& kind_arg, int repeats_arg, const std::string& fwd_path,
              const std::string& inv_path) {
    const RunConfig cfg = load_config(common);

    std::vector<ControlMode> modes;
    if (mode_arg == "both") {
        modes = {ControlMode::Uncalibrated, ControlMode::Calibrated};
    } else if (mode_arg == "calibrated") {
        modes = {ControlMode::Calibrated};
    } else if (mode_arg == "uncalibrated") {
        modes = {ControlMode::Uncalibrated};
    } else {
        std::cerr << "error: unknown mode " << mode_arg << "\n";
        return 1;
    }

    std::vector<TrajectoryKind> kinds = cfg.eval.kinds;
    if (kind_arg != "all") kinds = {trajectory_kind_from(kind_arg)};

    std::optional<Model> fwd, inv;
    const bool need_models =
        std::find(modes.begin(), modes.end(), ControlMode::Calibrated) != modes.end();
    if (need_models) {
        const std::string f = fwd_path.empty() ? cfg.out_dir + "/model_forward.json" : fwd_path;
        const std::string i = inv_path.empty() ? cfg.out_dir + "/model_inverse.json" : inv_path;
        if (!fs::exists(f) || !fs::exists(i)) {
            std::cerr << "error: calibrated mode needs checkpoints (" << f << ", " << i
                      << "); run `train` first\n";
            return 1;
        }
        fwd = Model::load(f);
        inv = Model::load(i);
    }

    // the training waypoints define what "unseen" means for trajectories
    auto wrng = make_rng(cfg.seed, "dataset");
    const auto waypoints = random_waypoints(cfg.dataset.waypoints, cfg.manipulator, wrng);

    TrackOptions topts;
    topts.repeats = repeats_arg > 0 ? repeats_arg : cfg.eval.repeats;
    topts.seed = substream_seed(cfg.seed, "track");

    CompensatorConfig comp = cfg.compensator;
    if (fwd) comp.window_length = fwd->window_length();

    std::vector<TrackingReport> reports;
    for (const auto kind : kinds) {
        auto trng = make_rng(cfg.seed, "trajectory-" + to_string(kind));
        const TaskTrajectory traj =
            make_trajectory(kind, cfg.eval.trajectory, cfg.manipulator, trng, &waypoints);
        for (const auto mode : modes) {
            reports.push_back(track(traj, mode, cfg.plant, cfg.manipulator, cfg.cables(),
                                    fwd ? &*fwd : nullptr, inv ? &*inv : nullptr, comp,
                                    topts));
            const auto& r = reports.back();
            std::cout << to_string(kind) << " " << to_string(mode) << ": pos "
                      << r.pos_mae << " +- " << r.pos_sd << " mm, ori " << r.ori_mae_deg
                      << " +- " << r.ori_sd_deg << " deg\n";
        }
    }

    ReportPaths paths{cfg.out_dir + "/track_steps.csv", cfg.out_dir + "/track_aggregate.csv",
                      cfg.out_dir + "/track_table.txt"};
    report_emit(reports, paths);

    if (modes.size() == 2) {
        for (const auto kind : kinds) {
            std::vector<TrackingReport> per_kind;
            for (const auto& r : reports)
                if (r.kind == kind) per_kind.push_back(r);
            const ImprovementSummary s = improvement_summary(per_kind);
            std::cout << "improvement " << to_string(kind) << ": position ratio "
                      << s.pos_ratio << ", orientation ratio " << s.ori_ratio << "\n";
        }
        const ImprovementSummary all = improvement_summary(reports);
        std::cout << "improvement combined: position ratio " << all.pos_ratio
                  << ", orientation ratio " << all.ori_ratio << "\n";
    }
    std::cout << "reports -> " << cfg.out_dir << "/track_*.csv\n";
    return 0;
}

int cmd_compensate_one(const std::string& fwd_path, const std::string& inv_path,
                       const std::string& q_arg, int M, double alpha, double thr, int L,
                       bool bypass) {
    const Model fwd = Model::load(fwd_path);
    const Model inv = Model::load(inv_path);

    Vec5 qd = Vec5::Zero();
    {
        std::stringstream ss(q_arg);
        std::string tok;
        int i = 0;
        while (std::getline(ss, tok, ',') && i < 5) qd[i++] = std::stod(tok);
        if (i != 5) {
            std::cerr << "error: --q-desired needs 5 comma-separated degrees\n";
            return 1;
        }
    }

    CompensatorConfig cfg;
    cfg.max_iterations = M;
    cfg.alpha = alpha;
    cfg.threshold = thr;
    cfg.window_length = L > 0 ? L : fwd.window_length();
    cfg.bypass = bypass;

    // cold start: the desired angle preceded by zero padding
    Eigen::MatrixXd window = Eigen::MatrixXd::Zero(cfg.window_length, 5);
    window.row(cfg.window_length - 1) = qd.transpose();

    const CompensationResult res = compensate(window, fwd, inv, cfg);
    std::cout << "q_desired    =" << qd.transpose() << "\n";
    std::cout << "q_calibrated =" << res.q_calibrated.vec().transpose() << "\n";
    std::cout << "forward loss =" << res.final_loss.transpose() << "\n";
    std::cout << "iterations   =" << res.iterations_used
              << (res.within_threshold ? " (within threshold)" : " (budget exhausted)")
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hysteresis simulation, learning and compensation toolkit for a "
                 "dual-segment tendon-driven continuum manipulator"};
    app.require_subcommand(1);

    CommonArgs common;
    bool identity_plant = false, trace = false;

    auto add_common = [&common](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "JSON run configuration");
        sub->add_option("--out-dir", common.out_dir, "output directory override");
        sub->add_option("--seed", common.seed,
                        "global seed override (also: TENDON_HYST_SEED)");
    };

    auto* collect = app.add_subcommand("collect", "generate commands, drive the plant, "
                                                  "persist the dataset");
    add_common(collect);
    collect->add_flag("--plant-identity", identity_plant,
                      "use the identity plant instead of the shipping defaults");
    collect->add_flag("--trace", trace, "also dump the raw plant trace CSV");

    std::string dataset_path, sweep_direction = "forward";
    bool sweep = false;
    auto* train = app.add_subcommand("train", "fit forward and inverse sequence models");
    add_common(train);
    train->add_option("--dataset", dataset_path, "dataset CSV (default: out_dir/dataset.csv)");
    train->add_flag("--sweep", sweep, "run the sequence-length study instead");
    train->add_option("--direction", sweep_direction, "sweep direction: forward|inverse");

    auto* sweep_cmd = app.add_subcommand("sweep", "sequence-length study (alias of "
                                                  "`train --sweep`)");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--dataset", dataset_path, "dataset CSV");
    sweep_cmd->add_option("--direction", sweep_direction, "forward|inverse");

    std::string mode = "both", kind = "all", fwd_path, inv_path;
    int repeats = 0;
    auto* track_cmd = app.add_subcommand("track", "trajectory tracking comparison");
    add_common(track_cmd);
    track_cmd->add_option("--mode", mode, "calibrated|uncalibrated|both");
    track_cmd->add_option("--kind", kind, "random|circle|zigzag|all");
    track_cmd->add_option("--repeats", repeats, "tracking repeats (default from config)");
    track_cmd->add_option("--model-forward", fwd_path, "forward checkpoint path");
    track_cmd->add_option("--model-inverse", inv_path, "inverse checkpoint path");

    std::string q_desired = "0,0,0,0,0";
    int M = 50, L = 0;
    double alpha = CompensatorConfig::kAlphaEffective, thr = 4.0;
    bool bypass = false;
    auto* comp_one = app.add_subcommand("compensate-one",
                                        "run the compensation algorithm on one window");
    comp_one->add_option("--model-forward", fwd_path, "forward checkpoint")->required();
    comp_one->add_option("--model-inverse", inv_path, "inverse checkpoint")->required();
    comp_one->add_option("--q-desired", q_desired, "five comma-separated degrees");
    comp_one->add_option("--M", M, "refinement iteration budget");
    comp_one->add_option("--alpha", alpha, "refinement step scale");
    comp_one->add_option("--thr", thr, "per-joint loss threshold, deg");
    comp_one->add_option("--L", L, "window length (default: checkpoint)");
    comp_one->add_flag("--bypass", bypass, "uncalibrated pass-through");

    CLI11_PARSE(app, argc, argv);

    try {
        if (collect->parsed()) return cmd_collect(common, identity_plant, trace);
        if (train->parsed()) return cmd_train(common, dataset_path, sweep, sweep_direction);
        if (sweep_cmd->parsed()) return cmd_train(common, dataset_path, true, sweep_direction);
        if (track_cmd->parsed())
            return cmd_track(common, mode, kind, repeats, fwd_path, inv_path);
        if (comp_one->parsed())
            return cmd_compensate_one(fwd_path, inv_path, q_desired, M, alpha, thr, L,
                                      bypass);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
