#include "qae3d/training.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "qae3d/rng.hpp"

namespace qae3d {

AdamState AdamState::init(int param_count, double lr) {
    AdamState s;
    s.m.assign(param_count, 0.0);
    s.v.assign(param_count, 0.0);
    s.lr = lr;
    return s;
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads,
               AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step size mismatch");
    for (double g : grads)
        if (!std::isfinite(g)) throw std::runtime_error("non-finite gradient entry");
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double m_hat = state.m[i] / bc1;
        const double v_hat = state.v[i] / bc2;
        params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
}

void schedule_update(ScheduleState& state, double loss, double& lr) {
    if (!std::isfinite(loss)) throw std::runtime_error("non-finite loss");
    if (loss < state.best_loss - state.improvement_threshold) {
        state.best_loss = loss;
        state.steps_since_improvement = 0;
        return;
    }
    state.steps_since_improvement += 1;
    if (state.steps_since_improvement >= state.patience) {
        lr = std::max(lr * state.factor, state.min_lr);
        state.steps_since_improvement = 0;
    }
}

void TrainLog::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write log: " + path);
    out.precision(17);
    out << "step,loss,lr\n";
    std::size_t eval_idx = 0;
    auto flush_evals = [&](long up_to_step) {
        while (eval_idx < evals.size() && evals[eval_idx].step <= up_to_step) {
            const EvalRecord& e = evals[eval_idx++];
            out << e.step << "," << e.split << "," << e.metric_cm << "\n";
        }
    };
    flush_evals(0);
    for (const TrainRecord& r : steps) {
        out << r.step << "," << r.loss << "," << r.lr << "\n";
        flush_evals(r.step);
    }
    flush_evals(std::numeric_limits<long>::max());
    if (!out) throw std::runtime_error("write failed: " + path);
}

TrainLog TrainLog::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open log: " + path);
    TrainLog log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "step,loss,lr") continue;
        std::stringstream ss(line);
        std::string f0, f1, f2;
        if (!std::getline(ss, f0, ',') || !std::getline(ss, f1, ',') ||
            !std::getline(ss, f2, ','))
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": malformed log row");
        if (f1 == "train" || f1 == "test")
            log.evals.push_back({std::stol(f0), f1, std::stod(f2)});
        else
            log.steps.push_back({std::stol(f0), std::stod(f1), std::stod(f2)});
    }
    return log;
}

double evaluate_mean_cm(const Model& model, const std::vector<PointCloud>& norm_frames,
                        const std::vector<PointCloud>& orig_frames,
                        std::vector<double>* per_frame) {
    if (norm_frames.size() != orig_frames.size())
        throw std::invalid_argument("split size mismatch");
    if (norm_frames.empty()) throw std::invalid_argument("empty split");
    if (per_frame) per_frame->clear();
    double acc = 0.0;
    for (std::size_t f = 0; f < norm_frames.size(); ++f) {
        const PointCloud pred_norm = model.predict_normalized(norm_frames[f]);
        const PointCloud pred = denormalize_cloud(pred_norm, model.normalization());
        const double d = mean_euclidean_distance_cm(pred, orig_frames[f]);
        if (per_frame) per_frame->push_back(d);
        acc += d;
    }
    return acc / static_cast<double>(norm_frames.size());
}

TrainLog train(Model& model, const std::vector<PointCloud>& train_norm,
               const std::vector<PointCloud>& train_orig,
               const std::vector<PointCloud>& test_norm,
               const std::vector<PointCloud>& test_orig, const TrainOptions& opts) {
    if (train_norm.empty()) throw std::invalid_argument("empty training split");
    TrainLog log;

    auto record_eval = [&](long step) {
        log.evals.push_back({step, "train", evaluate_mean_cm(model, train_norm, train_orig)});
        if (!test_norm.empty())
            log.evals.push_back({step, "test", evaluate_mean_cm(model, test_norm, test_orig)});
    };
    record_eval(0);
    if (model.param_count() == 0 || opts.epochs <= 0) return log;

    std::vector<double> params = model.parameters();
    AdamState adam = AdamState::init(model.param_count(), opts.lr);
    adam.beta1 = opts.beta1;
    adam.beta2 = opts.beta2;
    adam.eps = opts.eps;
    ScheduleState schedule;
    schedule.factor = opts.sched_factor;
    schedule.patience = opts.sched_patience;
    schedule.min_lr = opts.sched_min_lr;
    schedule.improvement_threshold = opts.sched_threshold;

    std::mt19937_64 shuffle_rng = substream_rng(opts.seed, "shuffle");
    std::vector<std::size_t> order(train_norm.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    std::vector<double> grads;
    double ema = 0.0;
    bool ema_started = false;
    long step = 0;
    bool done = false;
    for (long epoch = 0; epoch < opts.epochs && !done; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        for (std::size_t idx : order) {
            const double loss = model.loss_and_gradient(train_norm[idx], grads);
            if (!std::isfinite(loss)) throw std::runtime_error("non-finite loss");
            adam_step(params, grads, adam);
            model.set_parameters(params);
            ema = ema_started ? opts.ema_decay * ema + (1.0 - opts.ema_decay) * loss : loss;
            ema_started = true;
            schedule_update(schedule, ema, adam.lr);
            ++step;
            log.steps.push_back({step, loss, adam.lr});
            if (opts.eval_interval > 0 && step % opts.eval_interval == 0) record_eval(step);
            if (opts.checkpoint_interval > 0 && step % opts.checkpoint_interval == 0 &&
                !opts.checkpoint_dir.empty()) {
                save_checkpoint_file(model, opts.checkpoint_dir + "/checkpoint_" +
                                                std::to_string(step) + ".json");
            }
            if (opts.max_steps > 0 && step >= opts.max_steps) {
                done = true;
                break;
            }
        }
    }
    if (log.evals.back().step != step) record_eval(step);
    return log;
}

}  // namespace qae3d
