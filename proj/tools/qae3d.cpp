// qae3d: train, evaluate, and analyse the quantum point-cloud
// auto-encoder and its classical baselines from the command line.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qae3d/baselines.hpp"
#include "qae3d/config.hpp"
#include "qae3d/data.hpp"
#include "qae3d/experiment.hpp"
#include "qae3d/selfcheck.hpp"
#include "qae3d/svg.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

using namespace qae3d;

struct CommonFlags {
    std::string config_path;
    std::vector<std::string> overrides;
    bool has_seed = false;
    std::uint64_t seed = 0;
    std::string out;
};

TrainConfig resolve_config(const CommonFlags& flags) {
    TrainConfig config;
    if (!flags.config_path.empty()) config = parse_config_file(flags.config_path);
    for (const std::string& kv : flags.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
        apply_config_override(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (flags.has_seed) config.seed = flags.seed;
    if (!flags.out.empty()) config.out = flags.out;
    validate_config(config);
    return config;
}

void clamp_unit_cube(std::vector<PointCloud>& frames, const std::string& what) {
    bool clamped = false;
    for (PointCloud& pc : frames)
        for (Vec3& v : pc)
            for (int a = 0; a < 3; ++a) {
                if (v[a] < 0.0 || v[a] > 1.0) clamped = true;
                v[a] = std::clamp(v[a], 0.0, 1.0);
            }
    if (clamped)
        std::cerr << "warning: " << what
                  << " has normalised coordinates outside [0,1]; clamped\n";
}

int cmd_synth(int frames, int joints, std::uint64_t seed, double fps, double amplitude,
              const std::string& out_path) {
    const MotionDataset dataset = synthesize_chain(frames, joints, seed, fps, amplitude);
    save_csv(dataset, out_path);
    std::cout << "wrote " << dataset.frames.size() << " frames x "
              << dataset.n_vertices() << " joints to " << out_path << "\n";
    return 0;
}

int cmd_train(const CommonFlags& flags) {
    const TrainConfig config = resolve_config(flags);
    if (config.dataset.empty())
        throw std::invalid_argument("config key 'dataset' is required for train");
    const MotionDataset dataset = load_csv(config.dataset);
    std::filesystem::create_directories(config.out);
    const ExperimentResult result = run_experiment(dataset, config);
    save_checkpoint_file(*result.model, config.out + "/checkpoint.json");
    result.log.save_csv(config.out + "/log.csv");
    std::cout << "model=" << result.model->kind_name()
              << " params=" << result.param_count << "\n";
    std::cout << "final train metric: " << result.final_train_cm << " cm\n";
    std::cout << "final test metric: " << result.final_test_cm << " cm\n";
    return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& dataset_path,
             const std::string& split, double fps, double train_seconds,
             double test_seconds, const std::string& out_dir,
             const std::string& recon_path) {
    const auto model = load_checkpoint_file(checkpoint_path);
    MotionDataset dataset = load_csv(dataset_path);
    if (fps > 0.0) dataset.fps = fps;
    if (dataset.n_vertices() != model->n_vertices())
        throw std::runtime_error("dataset has " + std::to_string(dataset.n_vertices()) +
                                 " joints, checkpoint expects " +
                                 std::to_string(model->n_vertices()));
    if (split != "all") {
        auto [train, test] = chunked_split(dataset, {train_seconds, test_seconds});
        dataset = split == "train" ? std::move(train) : std::move(test);
    }
    std::vector<PointCloud> orig = dataset.frames;
    std::vector<PointCloud> norm;
    norm.reserve(orig.size());
    for (const PointCloud& pc : orig) norm.push_back(normalize_cloud(pc, model->normalization()));
    clamp_unit_cube(norm, "dataset");

    std::vector<double> per_frame;
    const double mean_cm = evaluate_mean_cm(*model, norm, orig, &per_frame);

    std::filesystem::create_directories(out_dir);
    {
        std::ofstream out(out_dir + "/metrics.csv");
        if (!out) throw std::runtime_error("cannot write metrics.csv");
        out.precision(17);
        out << "frame,metric_cm\n";
        for (std::size_t f = 0; f < per_frame.size(); ++f)
            out << f << "," << per_frame[f] << "\n";
        out << "mean," << mean_cm << "\n";
    }
    if (!recon_path.empty()) {
        MotionDataset recon;
        recon.fps = dataset.fps;
        for (const PointCloud& pc : norm)
            recon.frames.push_back(
                denormalize_cloud(model->predict_normalized(pc), model->normalization()));
        save_csv(recon, recon_path);
    }
    std::cout << "mean metric over " << per_frame.size() << " frames (" << split
              << "): " << mean_cm << " cm\n";
    return 0;
}

int cmd_sweep(const CommonFlags& flags, const std::string& grid,
              const std::vector<int>& values) {
    TrainConfig base = resolve_config(flags);
    if (base.dataset.empty())
        throw std::invalid_argument("config key 'dataset' is required for sweep");
    const MotionDataset dataset = load_csv(base.dataset);
    std::filesystem::create_directories(base.out);
    const std::string results_path = base.out + "/sweep.csv";
    std::ofstream out(results_path);
    if (!out) throw std::runtime_error("cannot write " + results_path);
    out.precision(17);
    out << "model,block_kind,architecture,init,blocks,n_discard,params,train_cm,test_cm\n";

    auto run_cell = [&](const TrainConfig& config) {
        const ExperimentResult r = run_experiment(dataset, config);
        out << config.model << "," << config.block_kind << "," << config.architecture
            << "," << config.init << "," << config.blocks << "," << config.n_discard
            << "," << r.param_count << "," << r.final_train_cm << "," << r.final_test_cm
            << "\n";
        std::cout << config.model << " " << config.block_kind << "/"
                  << config.architecture << "/" << config.init << " J=" << config.blocks
                  << " N_B=" << config.n_discard << " -> test " << r.final_test_cm
                  << " cm\n";
    };

    if (grid == "design" || grid == "design-matched") {
        // Reference parameter budget: kind-B cells at the base block count.
        const PreparedData probe = prepare_data(dataset, base);
        const int n_kept = probe.n_qubits - base.n_discard;
        const int budget = base.blocks * block_param_count(BlockKind::B, probe.n_qubits,
                                                           n_kept, base.n_discard);
        for (const char* arch : {"repeat", "inverse"})
            for (const char* init : {"random", "identity"})
                for (const char* kind : {"A", "B", "C", "D"}) {
                    TrainConfig cell = base;
                    cell.model = "quantum";
                    cell.block_kind = kind;
                    cell.architecture = arch;
                    cell.init = init;
                    if (grid == "design-matched")
                        cell.blocks = match_blocks(budget, block_kind_from_name(kind),
                                                   probe.n_qubits, n_kept,
                                                   base.n_discard);
                    run_cell(cell);
                }
    } else if (grid == "blocks") {
        if (values.empty()) throw std::invalid_argument("--values required for grid=blocks");
        for (int j : values) {
            TrainConfig cell = base;
            cell.blocks = j;
            run_cell(cell);
        }
    } else if (grid == "bottleneck") {
        if (values.empty())
            throw std::invalid_argument("--values required for grid=bottleneck");
        for (int nb : values) {
            TrainConfig cell = base;
            cell.n_discard = nb;
            run_cell(cell);
        }
    } else {
        throw std::invalid_argument("unknown grid '" + grid + "'");
    }
    std::cout << "wrote " << results_path << "\n";
    return 0;
}

int cmd_selfcheck(std::uint64_t seed, bool inject_fault) {
    const auto results = run_selfchecks(seed, inject_fault);
    bool all_passed = true;
    for (const CheckResult& r : results) {
        std::cout << r.name << " " << (r.passed ? "PASS" : "FAIL") << " worst=" << r.worst
                  << " tol=" << r.tolerance << "\n";
        all_passed = all_passed && r.passed;
    }
    std::cout << (all_passed ? "selfcheck: all checks passed"
                             : "selfcheck: FAILURES detected")
              << "\n";
    return all_passed ? 0 : kExitNumerical;
}

int cmd_plot(const std::string& log_path, const std::string& out_path) {
    const TrainLog log = TrainLog::load_csv(log_path);
    write_training_svg(log, out_path);
    std::cout << "wrote " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"3D point-cloud quantum auto-encoder pipeline"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic chain dataset CSV");
    int synth_frames = 1200, synth_joints = 16;
    std::uint64_t synth_seed = 0;
    double synth_fps = 12.0, synth_amplitude = 0.5;
    std::string synth_out = "data.csv";
    synth->add_option("--frames", synth_frames, "number of frames");
    synth->add_option("--joints", synth_joints, "number of joints (>= 2)");
    synth->add_option("--seed", synth_seed, "generator seed");
    synth->add_option("--fps", synth_fps, "frames per second");
    synth->add_option("--amplitude", synth_amplitude, "joint-angle oscillation amplitude");
    synth->add_option("-o,--out", synth_out, "output CSV path");

    auto add_common = [](CLI::App* cmd, CommonFlags& flags) {
        cmd->add_option("--config", flags.config_path, "flat key = value config file");
        cmd->add_option("--set", flags.overrides, "config override key=value (repeatable)");
        cmd->add_option("--seed", flags.seed, "run seed")
            ->each([&flags](const std::string&) { flags.has_seed = true; });
        cmd->add_option("--out", flags.out, "output directory");
    };

    // train
    auto* train_cmd = app.add_subcommand("train", "train a model and write checkpoint + log");
    CommonFlags train_flags;
    add_common(train_cmd, train_flags);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
    std::string eval_checkpoint, eval_dataset, eval_split = "all", eval_recon;
    std::string eval_out = "out";
    double eval_fps = 0.0, eval_train_seconds = 16.0, eval_test_seconds = 4.0;
    eval_cmd->add_option("--checkpoint", eval_checkpoint, "checkpoint JSON")->required();
    eval_cmd->add_option("--dataset", eval_dataset, "dataset CSV")->required();
    eval_cmd->add_option("--split", eval_split, "all | train | test")
        ->check(CLI::IsMember({"all", "train", "test"}));
    eval_cmd->add_option("--fps", eval_fps, "override dataset fps");
    eval_cmd->add_option("--train-seconds", eval_train_seconds, "split chunk train span");
    eval_cmd->add_option("--test-seconds", eval_test_seconds, "split chunk test span");
    eval_cmd->add_option("--out", eval_out, "output directory");
    eval_cmd->add_option("--recon", eval_recon, "also write reconstructions CSV here");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "train a grid of configurations");
    CommonFlags sweep_flags;
    std::string sweep_grid = "design";
    std::vector<int> sweep_values;
    add_common(sweep_cmd, sweep_flags);
    sweep_cmd->add_option("--grid", sweep_grid,
                          "design | design-matched | blocks | bottleneck");
    sweep_cmd->add_option("--values", sweep_values, "grid values for blocks/bottleneck");

    // selfcheck
    auto* selfcheck_cmd = app.add_subcommand("selfcheck", "run the invariant batteries");
    std::uint64_t selfcheck_seed = 0;
    bool inject_fault = false;
    selfcheck_cmd->add_option("--seed", selfcheck_seed, "battery seed");
    selfcheck_cmd->add_flag("--inject-fault", inject_fault,
                            "flip one angle sign in the inverse-law battery");

    // plot
    auto* plot_cmd = app.add_subcommand("plot", "render a training log as SVG");
    std::string plot_log, plot_out = "training.svg";
    plot_cmd->add_option("--log", plot_log, "training log CSV")->required();
    plot_cmd->add_option("-o,--out", plot_out, "output SVG path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (synth->parsed())
            return cmd_synth(synth_frames, synth_joints, synth_seed, synth_fps,
                             synth_amplitude, synth_out);
        if (train_cmd->parsed()) return cmd_train(train_flags);
        if (eval_cmd->parsed())
            return cmd_eval(eval_checkpoint, eval_dataset, eval_split, eval_fps,
                            eval_train_seconds, eval_test_seconds, eval_out, eval_recon);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep_flags, sweep_grid, sweep_values);
        if (selfcheck_cmd->parsed()) return cmd_selfcheck(selfcheck_seed, inject_fault);
        if (plot_cmd->parsed()) return cmd_plot(plot_log, plot_out);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        const std::string what = e.what();
        std::cerr << "error: " << what << "\n";
        if (what.find("non-finite") != std::string::npos ||
            what.find("degenerate") != std::string::npos)
            return kExitNumerical;
        return kExitData;
    }
    return kExitUsage;
}
