#include "tendon/dataset.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "tendon/io_util.hpp"
#include "tendon/rng.hpp"

namespace tendon {

std::vector<JointConfig> random_waypoints(int count, const ManipulatorSpec& spec,
                                          std::mt19937_64& rng) {
    const auto& lim = spec.joint_limits;
    std::vector<JointConfig> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        Vec5 v;
        for (int j = 0; j < 5; ++j) {
            std::uniform_real_distribution<double> u(lim.min[j], lim.max[j]);
            v[j] = u(rng);
        }
        if (v[3] > v[4]) std::swap(v[3], v[4]);  // grip opening >= 0
        out.push_back(JointConfig::from_vec(v));
    }
    return out;
}

std::vector<JointConfig> interpolate(const std::vector<JointConfig>& waypoints,
                                     double step_per_joint, int dims) {
    const double step = step_per_joint * std::sqrt(static_cast<double>(dims));
    std::vector<JointConfig> out;
    if (waypoints.empty()) return out;
    out.push_back(waypoints.front());

    for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
        const Vec5 a = waypoints[i].vec();
        const Vec5 b = waypoints[i + 1].vec();
        const Vec5 d = b - a;
        const double dist = d.norm();
        if (dist > 1e-12) {
            const Vec5 dir = d / dist;
            const int m = static_cast<int>(std::floor(dist / step));
            for (int j = 1; j <= m; ++j) {
                const double along = step * j;
                if (dist - along < 1e-9) break;  // coincides with the waypoint
                out.push_back(JointConfig::from_vec(a + along * dir));
            }
        }
        out.push_back(waypoints[i + 1]);
    }
    return out;
}

HysteresisDataset collect(const std::vector<JointConfig>& trajectory,
                          HysteresisPlant& plant,
                          const PerceptionPipeline* perception,
                          std::mt19937_64& perception_rng) {
    HysteresisDataset ds;
    ds.meta.seed = plant.params().seed;
    ds.meta.perception = perception != nullptr;
    ds.pairs.reserve(trajectory.size());

    ReducedJointConfig ik_seed{};
    JointConfig last_valid{};
    bool have_valid = false;

    for (const auto& cmd : trajectory) {
        const JointConfig phy = plant.step(cmd);
        if (!perception) {
            ds.pairs.push_back({cmd, phy, true});
            continue;
        }
        try {
            const JointConfig measured = perception->observe(phy, ik_seed, perception_rng);
            ik_seed = ReducedJointConfig::from_full(measured);
            last_valid = measured;
            have_valid = true;
            ds.pairs.push_back({cmd, measured, true});
        } catch (const std::runtime_error&) {
            // dropped frame: flag it, carry the last valid estimate
            ds.pairs.push_back({cmd, have_valid ? last_valid : cmd, false});
            ik_seed = ReducedJointConfig::from_full(cmd);
        }
    }
    return ds;
}

std::pair<HysteresisDataset, HysteresisDataset> split(const HysteresisDataset& ds,
                                                      double train_frac) {
    const std::size_t n = ds.pairs.size();
    const auto n_train = static_cast<std::size_t>(std::floor(train_frac * n));
    HysteresisDataset train, val;
    train.meta = ds.meta;
    train.meta.split_tag = "train";
    val.meta = ds.meta;
    val.meta.split_tag = "val";
    train.pairs.assign(ds.pairs.begin(), ds.pairs.begin() + n_train);
    val.pairs.assign(ds.pairs.begin() + n_train, ds.pairs.end());
    return {std::move(train), std::move(val)};
}

HysteresisDataset carry_forward_invalid(const HysteresisDataset& ds) {
    HysteresisDataset out = ds;
    const JointConfig* last = nullptr;
    for (auto& pair : out.pairs) {
        if (pair.valid) {
            last = &pair.q_phy;
        } else if (last) {
            pair.q_phy = *last;
        }
    }
    return out;
}

void write_dataset_csv(const std::string& path, const HysteresisDataset& ds) {
    std::string out =
        "t,q1_cmd,q2_cmd,q3_cmd,q4_cmd,q5_cmd,q1_phy,q2_phy,q3_phy,q4_phy,q5_phy,valid\n";
    for (std::size_t t = 0; t < ds.pairs.size(); ++t) {
        const auto& pr = ds.pairs[t];
        out += std::to_string(t);
        const Vec5 c = pr.q_cmd.vec(), p = pr.q_phy.vec();
        for (int j = 0; j < 5; ++j) out += "," + format_double(c[j]);
        for (int j = 0; j < 5; ++j) out += "," + format_double(p[j]);
        out += pr.valid ? ",1\n" : ",0\n";
    }
    write_text_file(path, out);

    nlohmann::json meta{{"seed", ds.meta.seed},
                        {"config_hash", ds.meta.config_hash},
                        {"perception", ds.meta.perception},
                        {"split_tag", ds.meta.split_tag},
                        {"pairs", ds.pairs.size()}};
    write_text_file(path + ".meta.json", meta.dump(2) + "\n");
}

HysteresisDataset read_dataset_csv(const std::string& path) {
    const std::string text = read_text_file(path);
    std::stringstream ss(text);
    std::string line;
    HysteresisDataset ds;
    bool header = true;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 12) throw std::runtime_error("bad dataset row: " + line);
        DataPair pr;
        Vec5 c, p;
        for (int j = 0; j < 5; ++j) c[j] = std::stod(f[1 + j]);
        for (int j = 0; j < 5; ++j) p[j] = std::stod(f[6 + j]);
        pr.q_cmd = JointConfig::from_vec(c);
        pr.q_phy = JointConfig::from_vec(p);
        pr.valid = f[11] == "1";
        ds.pairs.push_back(pr);
    }
    try {
        const auto meta = nlohmann::json::parse(read_text_file(path + ".meta.json"));
        ds.meta.seed = meta.value("seed", std::uint64_t{0});
        ds.meta.config_hash = meta.value("config_hash", std::uint64_t{0});
        ds.meta.perception = meta.value("perception", false);
        ds.meta.split_tag = meta.value("split_tag", std::string{});
    } catch (const std::runtime_error&) {
        // sidecar optional on read
    }
    return ds;
}

std::uint64_t dataset_hash(const HysteresisDataset& ds) {
    std::uint64_t h = 1469598103934665603ull;
    for (const auto& pr : ds.pairs) {
        const Vec5 c = pr.q_cmd.vec(), p = pr.q_phy.vec();
        h = fnv1a(c.data(), 5 * sizeof(double), h);
        h = fnv1a(p.data(), 5 * sizeof(double), h);
        const char v = pr.valid ? 1 : 0;
        h = fnv1a(&v, 1, h);
    }
    return h;
}

}  // namespace tendon
