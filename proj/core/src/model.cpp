#include "tendon/model.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "tendon/io_util.hpp"

namespace tendon {

std::string to_string(ModelKind k) { return k == ModelKind::Fnn ? "fnn" : "tcn"; }
std::string to_string(ModelDirection d) {
    return d == ModelDirection::Forward ? "forward" : "inverse";
}
ModelKind model_kind_from(const std::string& s) {
    if (s == "fnn") return ModelKind::Fnn;
    if (s == "tcn") return ModelKind::Tcn;
    throw std::runtime_error("unknown model kind: " + s);
}
ModelDirection model_direction_from(const std::string& s) {
    if (s == "forward") return ModelDirection::Forward;
    if (s == "inverse") return ModelDirection::Inverse;
    throw std::runtime_error("unknown model direction: " + s);
}

int tcn_num_blocks(int L, int k, int d) {
    const double x = static_cast<double>(L - 1) * (d - 1) / (2.0 * k - 2.0) + 1.0;
    return static_cast<int>(std::ceil(std::log(x) / std::log(static_cast<double>(d)) -
                                      1e-9));
}

int tcn_receptive_field(int num_blocks, int k, int d) {
    int geo = 0, pow = 1;
    for (int b = 0; b < num_blocks; ++b) {
        geo += pow;
        pow *= d;
    }
    return 1 + 2 * (k - 1) * geo;
}

namespace {

Eigen::MatrixXd init_uniform(int rows, int cols, int fan_in, std::mt19937_64& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> u(-bound, bound);
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = u(rng);
    return m;
}

}  // namespace

Model Model::make_tcn(const TcnConfig& cfg, ModelDirection dir, const Vec5& scale,
                      std::uint64_t init_seed) {
    Model m;
    m.kind_ = ModelKind::Tcn;
    m.direction_ = dir;
    m.L_ = cfg.L;
    m.scale_ = scale;
    m.tcn_config = cfg;

    std::mt19937_64 rng(init_seed);
    const int c = cfg.channels, k = cfg.kernel;
    for (int b = 0; b < cfg.num_blocks(); ++b) {
        for (int conv = 0; conv < 2; ++conv) {
            m.params_.push_back(init_uniform(c, k * c, k * c, rng));  // weights
            m.params_.push_back(init_uniform(1, c, k * c, rng));      // bias
        }
    }
    return m;
}

Model Model::make_fnn(const FnnConfig& cfg, ModelDirection dir, const Vec5& scale,
                      std::uint64_t init_seed) {
    Model m;
    m.kind_ = ModelKind::Fnn;
    m.direction_ = dir;
    m.L_ = cfg.L;
    m.scale_ = scale;
    m.fnn_config = cfg;

    std::mt19937_64 rng(init_seed);
    const int in = 5 * cfg.L, h = cfg.hidden;
    m.params_.push_back(init_uniform(h, in, in, rng));
    m.params_.push_back(init_uniform(1, h, in, rng));
    m.params_.push_back(init_uniform(h, h, h, rng));
    m.params_.push_back(init_uniform(1, h, h, rng));
    m.params_.push_back(init_uniform(5, h, h, rng));
    m.params_.push_back(init_uniform(1, 5, h, rng));
    return m;
}

std::size_t Model::parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += static_cast<std::size_t>(p.size());
    return n;
}

Eigen::MatrixXd Model::normalize(const Eigen::MatrixXd& window_deg) const {
    Eigen::MatrixXd out = window_deg;
    for (int j = 0; j < 5; ++j) out.col(j) /= scale_[j];
    return out;
}

int Model::build_graph(Tape& tape, const Eigen::MatrixXd& inputs_norm, int batch,
                       std::vector<int>* param_nodes) const {
    std::vector<int> pn;
    pn.reserve(params_.size());
    for (const auto& p : params_) pn.push_back(tape.parameter(p));

    int x = tape.constant(inputs_norm);
    int out;
    if (kind_ == ModelKind::Tcn) {
        const auto& cfg = tcn_config;
        int dil = 1;
        int pi = 0;
        for (int b = 0; b < cfg.num_blocks(); ++b) {
            int h = tape.conv1d_causal(x, pn[pi], pn[pi + 1], cfg.kernel, dil, batch);
            h = tape.relu(h);
            h = tape.conv1d_causal(h, pn[pi + 2], pn[pi + 3], cfg.kernel, dil, batch);
            x = tape.add(x, h);  // identity skip
            pi += 4;
            dil *= cfg.dilation_base;
        }
        out = tape.block_last_rows(x, batch);
    } else {
        int h = tape.flatten_blocks(x, batch);
        h = tape.affine(h, pn[0], pn[1]);
        h = tape.relu(h);
        h = tape.affine(h, pn[2], pn[3]);
        h = tape.relu(h);
        out = tape.affine(h, pn[4], pn[5]);
    }
    if (param_nodes) *param_nodes = std::move(pn);
    return out;
}

Vec5 Model::predict(const Eigen::MatrixXd& window_deg) const {
    Tape tape;
    const int out = build_graph(tape, normalize(window_deg), 1, nullptr);
    Vec5 y = tape.value(out).row(0).transpose();
    return y.cwiseProduct(scale_);
}

Eigen::MatrixXd window_at(const std::vector<Vec5>& series, int t, int L) {
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(L, 5);
    for (int i = 0; i < L; ++i) {
        const int idx = t - L + 1 + i;
        if (idx >= 0 && idx < static_cast<int>(series.size()))
            w.row(i) = series[idx].transpose();
    }
    return w;
}

std::string Model::to_json() const {
    nlohmann::json j;
    j["kind"] = to_string(kind_);
    j["direction"] = to_string(direction_);
    if (kind_ == ModelKind::Tcn) {
        j["config"] = {{"L", tcn_config.L},
                       {"kernel", tcn_config.kernel},
                       {"dilation_base", tcn_config.dilation_base},
                       {"channels", tcn_config.channels}};
    } else {
        j["config"] = {{"L", fnn_config.L}, {"hidden", fnn_config.hidden}};
    }
    std::vector<double> scale(scale_.data(), scale_.data() + 5);
    j["scale"] = scale;

    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (const auto& p : params_)
        for (int r = 0; r < p.rows(); ++r)
            for (int c = 0; c < p.cols(); ++c) flat.push_back(p(r, c));
    j["weights"] = flat;

    j["meta"] = {{"epochs", meta.epochs},       {"lr", meta.lr},
                 {"batch", meta.batch},         {"seed", meta.seed},
                 {"best_val_rmse_deg", meta.best_val_rmse_deg},
                 {"best_epoch", meta.best_epoch}};
    return j.dump(2) + "\n";
}

Model Model::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    const auto kind = model_kind_from(j.at("kind").get<std::string>());
    const auto dir = model_direction_from(j.at("direction").get<std::string>());

    Vec5 scale;
    {
        const auto s = j.at("scale").get<std::vector<double>>();
        if (s.size() != 5) throw std::runtime_error("checkpoint scale must have 5 entries");
        for (int i = 0; i < 5; ++i) scale[i] = s[i];
    }

    Model m;
    if (kind == ModelKind::Tcn) {
        TcnConfig cfg;
        cfg.L = j.at("config").at("L").get<int>();
        cfg.kernel = j.at("config").at("kernel").get<int>();
        cfg.dilation_base = j.at("config").at("dilation_base").get<int>();
        cfg.channels = j.at("config").at("channels").get<int>();
        m = make_tcn(cfg, dir, scale, 0);
    } else {
        FnnConfig cfg;
        cfg.L = j.at("config").at("L").get<int>();
        cfg.hidden = j.at("config").at("hidden").get<int>();
        m = make_fnn(cfg, dir, scale, 0);
    }

    const auto flat = j.at("weights").get<std::vector<double>>();
    if (flat.size() != m.parameter_count())
        throw std::runtime_error("checkpoint weight count does not match architecture");
    std::size_t idx = 0;
    for (auto& p : m.params_)
        for (int r = 0; r < p.rows(); ++r)
            for (int c = 0; c < p.cols(); ++c) p(r, c) = flat[idx++];

    if (j.contains("meta")) {
        const auto& jm = j.at("meta");
        m.meta.epochs = jm.value("epochs", 0);
        m.meta.lr = jm.value("lr", 0.0);
        m.meta.batch = jm.value("batch", 0);
        m.meta.seed = jm.value("seed", std::uint64_t{0});
        m.meta.best_val_rmse_deg = jm.value("best_val_rmse_deg", 0.0);
        m.meta.best_epoch = jm.value("best_epoch", -1);
    }
    return m;
}

void Model::save(const std::string& path) const { write_text_file(path, to_json()); }

Model Model::load(const std::string& path) { return from_json(read_text_file(path)); }

}  // namespace tendon
