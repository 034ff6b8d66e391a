#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tendon/autodiff.hpp"
#include "tendon/types.hpp"

namespace tendon {

enum class ModelKind { Fnn, Tcn };
enum class ModelDirection { Forward, Inverse };

std::string to_string(ModelKind k);
std::string to_string(ModelDirection d);
ModelKind model_kind_from(const std::string& s);
ModelDirection model_direction_from(const std::string& s);

/// Residual-block count so the receptive field covers L:
/// ceil(log_d((L-1)(d-1)/(2k-2) + 1)).
int tcn_num_blocks(int L, int k = 3, int d = 2);

/// Receptive field of B blocks of two convs each: 1 + 2(k-1)(d^B - 1)/(d-1).
int tcn_receptive_field(int num_blocks, int k = 3, int d = 2);

struct TcnConfig {
    int L = 80;
    int kernel = 3;
    int dilation_base = 2;
    int channels = 5;  // matches the joint count; z_L is read as the output
    int num_blocks() const { return tcn_num_blocks(L, kernel, dilation_base); }
};

struct FnnConfig {
    int L = 80;
    int hidden = 128;  // two hidden layers
};

/// Anything that maps an L x 5 window of joint angles (deg, oldest first) to
/// a joint estimate. Trained networks and test doubles both implement this.
class SequenceModel {
public:
    virtual ~SequenceModel() = default;
    virtual Vec5 predict(const Eigen::MatrixXd& window_deg) const = 0;
    virtual int window_length() const = 0;
};

struct TrainMeta {
    int epochs = 0;
    double lr = 0.0;
    int batch = 0;
    std::uint64_t seed = 0;
    double best_val_rmse_deg = 0.0;
    int best_epoch = -1;
};

/// FNN or TCN with joint-range normalization baked in. Parameters live in a
/// fixed-order list of matrices so checkpoints and the optimizer see one flat
/// layout.
class Model : public SequenceModel {
public:
    Model() = default;  // empty shell; fill via the factories or from_json

    static Model make_tcn(const TcnConfig& cfg, ModelDirection dir, const Vec5& scale,
                          std::uint64_t init_seed);
    static Model make_fnn(const FnnConfig& cfg, ModelDirection dir, const Vec5& scale,
                          std::uint64_t init_seed);

    Vec5 predict(const Eigen::MatrixXd& window_deg) const override;
    int window_length() const override { return L_; }

    ModelKind kind() const { return kind_; }
    ModelDirection direction() const { return direction_; }
    const Vec5& scale() const { return scale_; }
    std::size_t parameter_count() const;

    std::vector<Eigen::MatrixXd>& params() { return params_; }
    const std::vector<Eigen::MatrixXd>& params() const { return params_; }

    /// Normalized network output for a batch of stacked windows
    /// (batch*L x 5, already divided by scale). Returns the prediction node;
    /// param_nodes receives tape ids aligned with params().
    int build_graph(Tape& tape, const Eigen::MatrixXd& inputs_norm, int batch,
                    std::vector<int>* param_nodes) const;

    /// Divide window columns by the joint scale.
    Eigen::MatrixXd normalize(const Eigen::MatrixXd& window_deg) const;

    TrainMeta meta;

    // checkpoint round trip
    std::string to_json() const;
    static Model from_json(const std::string& text);
    void save(const std::string& path) const;
    static Model load(const std::string& path);

    TcnConfig tcn_config;  // valid when kind()==Tcn
    FnnConfig fnn_config;  // valid when kind()==Fnn

private:
    ModelKind kind_ = ModelKind::Tcn;
    ModelDirection direction_ = ModelDirection::Forward;
    int L_ = 80;
    Vec5 scale_ = Vec5::Ones();
    std::vector<Eigen::MatrixXd> params_;
};

/// Window ending at index t (inclusive) with zero rows padded on the left
/// when fewer than L samples precede t.
Eigen::MatrixXd window_at(const std::vector<Vec5>& series, int t, int L);

}  // namespace tendon
