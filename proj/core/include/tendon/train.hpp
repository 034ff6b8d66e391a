#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tendon/dataset.hpp"
#include "tendon/model.hpp"

namespace tendon {

/// Per-joint normalization scale from the joint limits (max abs bound).
Vec5 joint_scale(const ManipulatorSpec& spec);

struct TrainOptions {
    double lr = 0.001;
    int batch = 32;
    int epochs = 500;
    int patience = 100;  // epochs without val improvement; <= 0 disables
    std::uint64_t seed = 0;
    // Adam moments
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct TrainHistory {
    std::vector<double> train_loss;    // mean normalized MSE per epoch
    std::vector<double> val_rmse_deg;  // per epoch
};

struct TrainResult {
    Model model;  // best-validation-epoch weights
    TrainHistory history;
};

/// Input/target series for one modeling direction. Dropped frames are
/// replaced by the last valid measurement before windowing.
struct DirectionSeries {
    std::vector<Vec5> inputs;
    std::vector<Vec5> targets;
};
DirectionSeries direction_series(const HysteresisDataset& ds, ModelDirection dir);

/// Minibatch Adam on MSE over causal windows. Keeps the weights of the best
/// validation epoch. Throws Diverged on non-finite loss.
TrainResult train_model(Model initial, const HysteresisDataset& train_ds,
                        const HysteresisDataset& val_ds, const TrainOptions& opts);

/// RMSE (deg) of a model over every window of a dataset.
double evaluate_rmse_deg(const Model& model, const HysteresisDataset& ds);

/// RMSE (deg) of predicting the per-joint mean of the same split; the
/// baseline any trained model must beat.
double constant_mean_rmse_deg(const HysteresisDataset& ds, ModelDirection dir);

struct SweepOptions {
    std::vector<ModelKind> kinds{ModelKind::Fnn, ModelKind::Tcn};
    std::vector<int> lengths{10, 50, 65, 80, 100, 120};
    int repeats = 3;
    TrainOptions train{};
    int channels = 5;
    int hidden = 128;
    int max_parallel = 0;  // 0: hardware_concurrency
};

struct SweepCell {
    ModelKind kind;
    int L = 0;
    int repeat = 0;
    double best_val_rmse_deg = 0.0;
};

struct SweepSummaryRow {
    ModelKind kind;
    int L = 0;
    double mean_rmse_deg = 0.0;
    double sd_rmse_deg = 0.0;
};

struct SweepReport {
    std::vector<SweepCell> cells;
    std::vector<SweepSummaryRow> summary;
};

/// Train every (kind, L, repeat) cell, in parallel across cells.
SweepReport sweep_L(const HysteresisDataset& train_ds, const HysteresisDataset& val_ds,
                    ModelDirection dir, const Vec5& scale, std::uint64_t seed,
                    const SweepOptions& opts);

/// Detail CSV: kind,L,repeat,best_val_rmse_deg. Summary CSV: one row per
/// (kind, L) with mean and SD.
void write_sweep_detail_csv(const std::string& path, const SweepReport& report);
void write_sweep_summary_csv(const std::string& path, const SweepReport& report);

}  // namespace tendon
