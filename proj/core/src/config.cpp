#include "tendon/config.hpp"

#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "tendon/io_util.hpp"
#include "tendon/rng.hpp"

namespace tendon {
namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& known) {
    for (const auto& [key, _] : j.items())
        if (!known.count(key))
            throw std::runtime_error("config: unknown key '" + key + "' in " + where);
}

Vec5 vec5_from(const json& j, const std::string& where) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 5) throw std::runtime_error("config: " + where + " needs 5 entries");
    Vec5 out;
    for (int i = 0; i < 5; ++i) out[i] = v[i];
    return out;
}

std::vector<double> to_list(const Vec5& v) { return {v[0], v[1], v[2], v[3], v[4]}; }

}  // namespace

RunConfig RunConfig::desk_default() {
    RunConfig c;
    c.compensator.alpha = CompensatorConfig::kAlphaEffective;
    return c;
}

RunConfig RunConfig::full_default() {
    RunConfig c;
    c.dataset.waypoints = 1802;
    c.train.epochs = 8000;
    c.train.patience = 0;  // run the full budget like the reference experiment
    c.compensator.alpha = 0.001;
    c.eval.trajectory.samples = 400;
    return c;
}

std::string RunConfig::to_json() const {
    json j;
    j["seed"] = seed;
    j["out_dir"] = out_dir;

    j["manipulator"] = {
        {"n1", manipulator.n1},
        {"n2", manipulator.n2},
        {"hinge",
         {{"h", manipulator.hinge.h},
          {"l", manipulator.hinge.l},
          {"R", manipulator.hinge.R},
          {"t", manipulator.hinge.t},
          {"b", manipulator.hinge.b},
          {"r", manipulator.hinge.r}}},
        {"forceps_length", manipulator.forceps_length},
        {"joint_limits",
         {{"min", std::vector<double>(manipulator.joint_limits.min.begin(),
                                      manipulator.joint_limits.min.end())},
          {"max", std::vector<double>(manipulator.joint_limits.max.begin(),
                                      manipulator.joint_limits.max.end())}}}};

    j["cables"] = {{"pitch_circle_diameter", cable_pitch_circle_diameter},
                   {"decoupling", decoupling.enabled},
                   {"decouple_forceps_for_wrist", decoupling.forceps_seg2}};

    std::vector<std::vector<double>> C(5, std::vector<double>(5));
    for (int r = 0; r < 5; ++r)
        for (int cc = 0; cc < 5; ++cc) C[r][cc] = plant.coupling(r, cc);
    j["plant"] = {{"backlash", to_list(plant.backlash)},
                  {"dead_zone", to_list(plant.dead_zone)},
                  {"gain", to_list(plant.gain)},
                  {"coupling", C},
                  {"drift_per_1000", plant.drift_per_1000},
                  {"noise_sd", plant.noise_sd}};

    j["rig"] = {{"psi_deg", rad2deg(rig.psi)},
                {"a_prox", rig.a_prox},
                {"a_dist", rig.a_dist},
                {"base_half_spacing", rig.base_half_spacing},
                {"base_z_offset", rig.base_z_offset},
                {"base_marker_radius", rig.base_marker_radius},
                {"forceps_marker_radius", rig.forceps_marker_radius},
                {"L_base", std::vector<double>{rig.L_base[0], rig.L_base[1], rig.L_base[2]}},
                {"camera_distance", rig.base_in_camera.p[2]},
                {"psi_about_camera_x", rig.psi_about_camera_x},
                {"tip_axis_jaw1", rig.tip_axis_jaw1}};

    j["dataset"] = {{"waypoints", dataset.waypoints},
                    {"step_deg", dataset.step_deg},
                    {"train_frac", dataset.train_frac},
                    {"perception", dataset.perception},
                    {"perception_noise",
                     {{"points_per_marker", dataset.perception_noise.points_per_marker},
                      {"noise_sd", dataset.perception_noise.noise_sd},
                      {"outlier_frac", dataset.perception_noise.outlier_frac},
                      {"mislabel_frac", dataset.perception_noise.mislabel_frac},
                      {"ransac_iters", dataset.perception_noise.ransac_iters},
                      {"inlier_tol", dataset.perception_noise.inlier_tol}}}};

    j["train"] = {{"kind", to_string(train.kind)},
                  {"L", train.L},
                  {"channels", train.channels},
                  {"hidden", train.hidden},
                  {"epochs", train.epochs},
                  {"lr", train.lr},
                  {"batch", train.batch},
                  {"patience", train.patience},
                  {"sweep_lengths", train.sweep_lengths},
                  {"sweep_repeats", train.sweep_repeats}};

    j["compensator"] = {{"M", compensator.max_iterations},
                        {"alpha", compensator.alpha},
                        {"thr", compensator.threshold},
                        {"use_calibrated_history", compensator.use_calibrated_history}};

    std::vector<std::string> kinds;
    for (const auto k : eval.kinds) kinds.push_back(to_string(k));
    j["eval"] = {{"kinds", kinds},
                 {"samples", eval.trajectory.samples},
                 {"grip_deg", eval.trajectory.grip_deg},
                 {"repeats", eval.repeats},
                 {"random_waypoints", eval.trajectory.random_waypoints},
                 {"circle_radius_frac", eval.trajectory.circle_radius_frac},
                 {"zigzag_vertices", eval.trajectory.zigzag_vertices},
                 {"zigzag_amplitude_frac", eval.trajectory.zigzag_amplitude_frac}};

    return j.dump(2) + "\n";
}

RunConfig RunConfig::from_json(const std::string& text) {
    const json j = json::parse(text);
    check_keys(j, "root",
               {"seed", "out_dir", "manipulator", "cables", "plant", "rig", "dataset",
                "train", "compensator", "eval"});

    RunConfig c;
    c.seed = j.value("seed", c.seed);
    c.out_dir = j.value("out_dir", c.out_dir);

    if (j.contains("manipulator")) {
        const auto& m = j.at("manipulator");
        check_keys(m, "manipulator",
                   {"n1", "n2", "hinge", "forceps_length", "joint_limits"});
        c.manipulator.n1 = m.value("n1", c.manipulator.n1);
        c.manipulator.n2 = m.value("n2", c.manipulator.n2);
        if (m.contains("hinge")) {
            const auto& h = m.at("hinge");
            check_keys(h, "manipulator.hinge", {"h", "l", "R", "t", "b", "r"});
            c.manipulator.hinge.h = h.value("h", c.manipulator.hinge.h);
            c.manipulator.hinge.l = h.value("l", c.manipulator.hinge.l);
            c.manipulator.hinge.R = h.value("R", c.manipulator.hinge.R);
            c.manipulator.hinge.t = h.value("t", c.manipulator.hinge.t);
            c.manipulator.hinge.b = h.value("b", c.manipulator.hinge.b);
            c.manipulator.hinge.r = h.value("r", c.manipulator.hinge.r);
        }
        c.manipulator.forceps_length =
            m.value("forceps_length", c.manipulator.forceps_length);
        c.manipulator.joint_limits =
            ManipulatorSpec::default_limits(c.manipulator.n1, c.manipulator.n2);
        if (m.contains("joint_limits")) {
            const auto& lim = m.at("joint_limits");
            check_keys(lim, "manipulator.joint_limits", {"min", "max"});
            const auto mn = lim.at("min").get<std::vector<double>>();
            const auto mx = lim.at("max").get<std::vector<double>>();
            if (mn.size() != 5 || mx.size() != 5)
                throw std::runtime_error("config: joint_limits need 5 entries");
            for (int i = 0; i < 5; ++i) {
                c.manipulator.joint_limits.min[i] = mn[i];
                c.manipulator.joint_limits.max[i] = mx[i];
            }
        }
    }

    if (j.contains("cables")) {
        const auto& cb = j.at("cables");
        check_keys(cb, "cables",
                   {"pitch_circle_diameter", "decoupling", "decouple_forceps_for_wrist"});
        c.cable_pitch_circle_diameter =
            cb.value("pitch_circle_diameter", c.cable_pitch_circle_diameter);
        c.decoupling.enabled = cb.value("decoupling", c.decoupling.enabled);
        c.decoupling.forceps_seg2 =
            cb.value("decouple_forceps_for_wrist", c.decoupling.forceps_seg2);
    }

    if (j.contains("plant")) {
        const auto& p = j.at("plant");
        check_keys(p, "plant",
                   {"backlash", "dead_zone", "gain", "coupling", "drift_per_1000",
                    "noise_sd"});
        if (p.contains("backlash")) c.plant.backlash = vec5_from(p.at("backlash"), "plant.backlash");
        if (p.contains("dead_zone"))
            c.plant.dead_zone = vec5_from(p.at("dead_zone"), "plant.dead_zone");
        if (p.contains("gain")) c.plant.gain = vec5_from(p.at("gain"), "plant.gain");
        if (p.contains("coupling")) {
            const auto C = p.at("coupling").get<std::vector<std::vector<double>>>();
            if (C.size() != 5) throw std::runtime_error("config: coupling must be 5x5");
            for (int r = 0; r < 5; ++r) {
                if (C[r].size() != 5)
                    throw std::runtime_error("config: coupling must be 5x5");
                for (int cc = 0; cc < 5; ++cc) c.plant.coupling(r, cc) = C[r][cc];
            }
        }
        c.plant.drift_per_1000 = p.value("drift_per_1000", c.plant.drift_per_1000);
        c.plant.noise_sd = p.value("noise_sd", c.plant.noise_sd);
    }
    c.plant.seed = substream_seed(c.seed, "plant");

    if (j.contains("rig")) {
        const auto& r = j.at("rig");
        check_keys(r, "rig",
                   {"psi_deg", "a_prox", "a_dist", "base_half_spacing", "base_z_offset",
                    "base_marker_radius", "forceps_marker_radius", "L_base",
                    "camera_distance", "psi_about_camera_x", "tip_axis_jaw1"});
        c.rig.psi = deg2rad(r.value("psi_deg", rad2deg(c.rig.psi)));
        c.rig.a_prox = r.value("a_prox", c.rig.a_prox);
        c.rig.a_dist = r.value("a_dist", c.rig.a_dist);
        c.rig.base_half_spacing = r.value("base_half_spacing", c.rig.base_half_spacing);
        c.rig.base_z_offset = r.value("base_z_offset", c.rig.base_z_offset);
        c.rig.base_marker_radius = r.value("base_marker_radius", c.rig.base_marker_radius);
        c.rig.forceps_marker_radius =
            r.value("forceps_marker_radius", c.rig.forceps_marker_radius);
        if (r.contains("L_base")) {
            const auto lb = r.at("L_base").get<std::vector<double>>();
            if (lb.size() != 3) throw std::runtime_error("config: L_base needs 3 entries");
            c.rig.L_base = Vec3(lb[0], lb[1], lb[2]);
        }
        c.rig.base_in_camera =
            RigidTransform::translation({0.0, 0.0, r.value("camera_distance", 300.0)});
        c.rig.psi_about_camera_x = r.value("psi_about_camera_x", false);
        c.rig.tip_axis_jaw1 = r.value("tip_axis_jaw1", false);
    }
    c.rig.d_fcps = c.manipulator.forceps_length;
    c.rig.recompute_offsets();

    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        check_keys(d, "dataset",
                   {"waypoints", "step_deg", "train_frac", "perception",
                    "perception_noise"});
        c.dataset.waypoints = d.value("waypoints", c.dataset.waypoints);
        c.dataset.step_deg = d.value("step_deg", c.dataset.step_deg);
        c.dataset.train_frac = d.value("train_frac", c.dataset.train_frac);
        c.dataset.perception = d.value("perception", c.dataset.perception);
        if (d.contains("perception_noise")) {
            const auto& pn = d.at("perception_noise");
            check_keys(pn, "dataset.perception_noise",
                       {"points_per_marker", "noise_sd", "outlier_frac", "mislabel_frac",
                        "ransac_iters", "inlier_tol"});
            auto& n = c.dataset.perception_noise;
            n.points_per_marker = pn.value("points_per_marker", n.points_per_marker);
            n.noise_sd = pn.value("noise_sd", n.noise_sd);
            n.outlier_frac = pn.value("outlier_frac", n.outlier_frac);
            n.mislabel_frac = pn.value("mislabel_frac", n.mislabel_frac);
            n.ransac_iters = pn.value("ransac_iters", n.ransac_iters);
            n.inlier_tol = pn.value("inlier_tol", n.inlier_tol);
        }
    }

    if (j.contains("train")) {
        const auto& t = j.at("train");
        check_keys(t, "train",
                   {"kind", "L", "channels", "hidden", "epochs", "lr", "batch",
                    "patience", "sweep_lengths", "sweep_repeats"});
        c.train.kind = model_kind_from(t.value("kind", to_string(c.train.kind)));
        c.train.L = t.value("L", c.train.L);
        c.train.channels = t.value("channels", c.train.channels);
        c.train.hidden = t.value("hidden", c.train.hidden);
        c.train.epochs = t.value("epochs", c.train.epochs);
        c.train.lr = t.value("lr", c.train.lr);
        c.train.batch = t.value("batch", c.train.batch);
        c.train.patience = t.value("patience", c.train.patience);
        if (t.contains("sweep_lengths"))
            c.train.sweep_lengths = t.at("sweep_lengths").get<std::vector<int>>();
        c.train.sweep_repeats = t.value("sweep_repeats", c.train.sweep_repeats);
    }
    c.compensator.window_length = c.train.L;

    if (j.contains("compensator")) {
        const auto& cp = j.at("compensator");
        check_keys(cp, "compensator", {"M", "alpha", "thr", "use_calibrated_history"});
        c.compensator.max_iterations = cp.value("M", c.compensator.max_iterations);
        c.compensator.alpha = cp.value("alpha", c.compensator.alpha);
        c.compensator.threshold = cp.value("thr", c.compensator.threshold);
        c.compensator.use_calibrated_history =
            cp.value("use_calibrated_history", c.compensator.use_calibrated_history);
    }

    if (j.contains("eval")) {
        const auto& e = j.at("eval");
        check_keys(e, "eval",
                   {"kinds", "samples", "grip_deg", "repeats", "random_waypoints",
                    "circle_radius_frac", "zigzag_vertices", "zigzag_amplitude_frac"});
        if (e.contains("kinds")) {
            c.eval.kinds.clear();
            for (const auto& k : e.at("kinds"))
                c.eval.kinds.push_back(trajectory_kind_from(k.get<std::string>()));
        }
        c.eval.trajectory.samples = e.value("samples", c.eval.trajectory.samples);
        c.eval.trajectory.grip_deg = e.value("grip_deg", c.eval.trajectory.grip_deg);
        c.eval.repeats = e.value("repeats", c.eval.repeats);
        c.eval.trajectory.random_waypoints =
            e.value("random_waypoints", c.eval.trajectory.random_waypoints);
        c.eval.trajectory.circle_radius_frac =
            e.value("circle_radius_frac", c.eval.trajectory.circle_radius_frac);
        c.eval.trajectory.zigzag_vertices =
            e.value("zigzag_vertices", c.eval.trajectory.zigzag_vertices);
        c.eval.trajectory.zigzag_amplitude_frac =
            e.value("zigzag_amplitude_frac", c.eval.trajectory.zigzag_amplitude_frac);
    }

    c.validate();
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    return from_json(read_text_file(path));
}

void RunConfig::save(const std::string& path) const { write_text_file(path, to_json()); }

std::uint64_t RunConfig::hash() const {
    const std::string canon = to_json();
    return fnv1a(canon.data(), canon.size());
}

void RunConfig::validate() const {
    if (manipulator.n1 < 1 || manipulator.n2 < 1)
        throw std::runtime_error("config: hinge module counts must be >= 1");
    const FlexureHingeParams& h = manipulator.hinge;
    for (const double v : {h.h, h.l, h.R, h.t, h.b, h.r})
        if (v <= 0.0) throw std::runtime_error("config: hinge parameters must be > 0");

    const auto& lim = manipulator.joint_limits;
    for (int jnt = 0; jnt < 5; ++jnt)
        if (!(lim.min[jnt] < lim.max[jnt]))
            throw std::runtime_error("config: joint limits must satisfy min < max");
    const double seg1_bound = manipulator.n1 * 5.5;
    for (int jnt = 0; jnt < 2; ++jnt)
        if (lim.min[jnt] < -seg1_bound - 1e-9 || lim.max[jnt] > seg1_bound + 1e-9)
            throw std::runtime_error("config: q1/q2 limits exceed the hinge-count bound");

    if (!plant.valid()) throw std::runtime_error("config: plant parameters out of range");
    if (train.L < 2) throw std::runtime_error("config: train.L must be >= 2");
    if (compensator.window_length != train.L)
        throw std::runtime_error("config: compensator window length must equal train.L");
    if (dataset.train_frac <= 0.0 || dataset.train_frac >= 1.0)
        throw std::runtime_error("config: train_frac must lie in (0, 1)");
}

}  // namespace tendon
