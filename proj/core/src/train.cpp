#include "tendon/train.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <thread>

#include "tendon/errors.hpp"
#include "tendon/io_util.hpp"
#include "tendon/rng.hpp"

namespace tendon {

Vec5 joint_scale(const ManipulatorSpec& spec) {
    Vec5 s;
    for (int j = 0; j < 5; ++j) s[j] = spec.joint_limits.span_max_abs(j);
    return s;
}

DirectionSeries direction_series(const HysteresisDataset& ds, ModelDirection dir) {
    const HysteresisDataset clean = carry_forward_invalid(ds);
    DirectionSeries out;
    out.inputs.reserve(clean.pairs.size());
    out.targets.reserve(clean.pairs.size());
    for (const auto& pr : clean.pairs) {
        if (dir == ModelDirection::Forward) {
            out.inputs.push_back(pr.q_cmd.vec());
            out.targets.push_back(pr.q_phy.vec());
        } else {
            out.inputs.push_back(pr.q_phy.vec());
            out.targets.push_back(pr.q_cmd.vec());
        }
    }
    return out;
}

namespace {

// Stack windows [t in idx] into a (n*L x 5) matrix, normalized by scale.
Eigen::MatrixXd stack_windows_norm(const std::vector<Vec5>& series,
                                   const std::vector<int>& idx, int L,
                                   const Vec5& scale) {
    Eigen::MatrixXd X(static_cast<int>(idx.size()) * L, 5);
    for (std::size_t b = 0; b < idx.size(); ++b) {
        const int t = idx[b];
        for (int i = 0; i < L; ++i) {
            const int s = t - L + 1 + i;
            if (s >= 0)
                X.row(static_cast<int>(b) * L + i) =
                    series[s].cwiseQuotient(scale).transpose();
            else
                X.row(static_cast<int>(b) * L + i).setZero();
        }
    }
    return X;
}

Eigen::MatrixXd stack_targets_norm(const std::vector<Vec5>& targets,
                                   const std::vector<int>& idx, const Vec5& scale) {
    Eigen::MatrixXd Y(static_cast<int>(idx.size()), 5);
    for (std::size_t b = 0; b < idx.size(); ++b)
        Y.row(static_cast<int>(b)) = targets[idx[b]].cwiseQuotient(scale).transpose();
    return Y;
}

double rmse_deg_on(const Model& model, const DirectionSeries& series) {
    const int n = static_cast<int>(series.inputs.size());
    const int L = model.window_length();
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);

    const Vec5 scale = model.scale();
    double ss = 0.0;
    const int chunk = 512;  // bound peak memory on large datasets
    for (int start = 0; start < n; start += chunk) {
        const std::vector<int> part(idx.begin() + start,
                                    idx.begin() + std::min(n, start + chunk));
        Tape tape;
        const int pred = model.build_graph(
            tape, stack_windows_norm(series.inputs, part, L, scale),
            static_cast<int>(part.size()), nullptr);
        const Eigen::MatrixXd err =
            tape.value(pred) - stack_targets_norm(series.targets, part, scale);
        for (int b = 0; b < err.rows(); ++b)
            for (int j = 0; j < 5; ++j) {
                const double e = err(b, j) * scale[j];
                ss += e * e;
            }
    }
    return std::sqrt(ss / (5.0 * n));
}

}  // namespace

double evaluate_rmse_deg(const Model& model, const HysteresisDataset& ds) {
    return rmse_deg_on(model, direction_series(ds, model.direction()));
}

double constant_mean_rmse_deg(const HysteresisDataset& ds, ModelDirection dir) {
    const DirectionSeries series = direction_series(ds, dir);
    Vec5 mean = Vec5::Zero();
    for (const auto& t : series.targets) mean += t;
    mean /= static_cast<double>(series.targets.size());
    double ss = 0.0;
    for (const auto& t : series.targets) ss += (t - mean).squaredNorm();
    return std::sqrt(ss / (5.0 * static_cast<double>(series.targets.size())));
}

TrainResult train_model(Model initial, const HysteresisDataset& train_ds,
                        const HysteresisDataset& val_ds, const TrainOptions& opts) {
    const DirectionSeries train = direction_series(train_ds, initial.direction());
    const DirectionSeries val = direction_series(val_ds, initial.direction());
    const int n = static_cast<int>(train.inputs.size());
    const int L = initial.window_length();
    const Vec5 scale = initial.scale();

    Model model = std::move(initial);
    auto& params = model.params();

    // Adam state
    std::vector<Eigen::MatrixXd> m1, m2;
    for (const auto& p : params) {
        m1.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
        m2.push_back(Eigen::MatrixXd::Zero(p.rows(), p.cols()));
    }
    long step = 0;

    std::mt19937_64 rng(substream_seed(opts.seed, "train-shuffle"));
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);

    TrainResult result;
    double best_rmse = std::numeric_limits<double>::infinity();
    std::vector<Eigen::MatrixXd> best_params = params;
    int best_epoch = -1;

    for (int epoch = 0; epoch < opts.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        int batches = 0;

        for (int start = 0; start < n; start += opts.batch) {
            const std::vector<int> idx(order.begin() + start,
                                       order.begin() + std::min(n, start + opts.batch));
            const int B = static_cast<int>(idx.size());

            Tape tape;
            std::vector<int> pnodes;
            const int pred = model.build_graph(
                tape, stack_windows_norm(train.inputs, idx, L, scale), B, &pnodes);
            const int target = tape.constant(stack_targets_norm(train.targets, idx, scale));
            const int loss = tape.mse(pred, target);

            const double loss_val = tape.value(loss)(0, 0);
            if (!std::isfinite(loss_val)) throw Diverged("training loss is not finite");
            epoch_loss += loss_val;
            ++batches;

            tape.backward(loss);
            ++step;
            const double bc1 = 1.0 - std::pow(opts.beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(opts.beta2, static_cast<double>(step));
            for (std::size_t i = 0; i < params.size(); ++i) {
                const Eigen::MatrixXd& g = tape.grad(pnodes[i]);
                m1[i] = opts.beta1 * m1[i] + (1.0 - opts.beta1) * g;
                m2[i] = opts.beta2 * m2[i] + (1.0 - opts.beta2) * g.cwiseProduct(g);
                const Eigen::ArrayXXd mhat = m1[i].array() / bc1;
                const Eigen::ArrayXXd vhat = m2[i].array() / bc2;
                params[i].array() -= opts.lr * mhat / (vhat.sqrt() + opts.eps);
            }
        }

        result.history.train_loss.push_back(epoch_loss / std::max(1, batches));
        const double vr = rmse_deg_on(model, val);
        result.history.val_rmse_deg.push_back(vr);

        if (vr < best_rmse) {
            best_rmse = vr;
            best_params = params;
            best_epoch = epoch;
        } else if (opts.patience > 0 && epoch - best_epoch >= opts.patience) {
            break;
        }
    }

    model.params() = best_params;
    model.meta.epochs = static_cast<int>(result.history.val_rmse_deg.size());
    model.meta.lr = opts.lr;
    model.meta.batch = opts.batch;
    model.meta.seed = opts.seed;
    model.meta.best_val_rmse_deg = best_rmse;
    model.meta.best_epoch = best_epoch;
    result.model = std::move(model);
    return result;
}

SweepReport sweep_L(const HysteresisDataset& train_ds, const HysteresisDataset& val_ds,
                    ModelDirection dir, const Vec5& scale, std::uint64_t seed,
                    const SweepOptions& opts) {
    struct Job {
        ModelKind kind;
        int L;
        int repeat;
    };
    std::vector<Job> jobs;
    for (const auto kind : opts.kinds)
        for (const int L : opts.lengths)
            for (int r = 0; r < opts.repeats; ++r) jobs.push_back({kind, L, r});

    auto run_job = [&](const Job& job) {
        const std::string tag = to_string(job.kind) + "/" + std::to_string(job.L) + "/" +
                                std::to_string(job.repeat);
        const std::uint64_t init_seed = substream_seed(seed, "init-" + tag);
        Model m = job.kind == ModelKind::Tcn
                      ? Model::make_tcn(TcnConfig{job.L, 3, 2, opts.channels}, dir,
                                        scale, init_seed)
                      : Model::make_fnn(FnnConfig{job.L, opts.hidden}, dir, scale,
                                        init_seed);
        TrainOptions topts = opts.train;
        topts.seed = substream_seed(seed, "shuffle-" + tag);
        const TrainResult res = train_model(std::move(m), train_ds, val_ds, topts);
        return SweepCell{job.kind, job.L, job.repeat, res.model.meta.best_val_rmse_deg};
    };

    const int workers = opts.max_parallel > 0
                            ? opts.max_parallel
                            : std::max(1u, std::thread::hardware_concurrency());
    SweepReport report;
    report.cells.resize(jobs.size());
    for (std::size_t start = 0; start < jobs.size(); start += workers) {
        std::vector<std::future<SweepCell>> futs;
        for (std::size_t i = start; i < std::min(jobs.size(), start + workers); ++i)
            futs.push_back(std::async(std::launch::async, run_job, jobs[i]));
        for (std::size_t i = 0; i < futs.size(); ++i)
            report.cells[start + i] = futs[i].get();
    }

    for (const auto kind : opts.kinds) {
        for (const int L : opts.lengths) {
            double sum = 0.0, sum2 = 0.0;
            int cnt = 0;
            for (const auto& c : report.cells) {
                if (c.kind != kind || c.L != L) continue;
                sum += c.best_val_rmse_deg;
                sum2 += c.best_val_rmse_deg * c.best_val_rmse_deg;
                ++cnt;
            }
            const double mean = sum / cnt;
            report.summary.push_back(
                {kind, L, mean, std::sqrt(std::max(0.0, sum2 / cnt - mean * mean))});
        }
    }
    return report;
}

void write_sweep_detail_csv(const std::string& path, const SweepReport& report) {
    std::string out = "kind,L,repeat,best_val_rmse_deg\n";
    for (const auto& c : report.cells)
        out += to_string(c.kind) + "," + std::to_string(c.L) + "," +
               std::to_string(c.repeat) + "," + format_double(c.best_val_rmse_deg) + "\n";
    write_text_file(path, out);
}

void write_sweep_summary_csv(const std::string& path, const SweepReport& report) {
    std::string out = "kind,L,mean_rmse_deg,sd_rmse_deg\n";
    for (const auto& r : report.summary)
        out += to_string(r.kind) + "," + std::to_string(r.L) + "," +
               format_double(r.mean_rmse_deg) + "," + format_double(r.sd_rmse_deg) + "\n";
    write_text_file(path, out);
}

}  // namespace tendon
