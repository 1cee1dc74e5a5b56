#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "qae3d/baselines.hpp"
#include "qae3d/config.hpp"
#include "qae3d/experiment.hpp"
#include "qae3d/loss.hpp"
#include "qae3d/svg.hpp"
#include "qae3d/training.hpp"

using namespace qae3d;

namespace {

PointCloud random_unit_cloud(int v, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PointCloud pc(v);
    for (Vec3& p : pc) p = {u(rng), u(rng), u(rng)};
    return pc;
}

// Direct Eq. 3 evaluation, written independently of the library.
double loss_oracle(const std::vector<double>& alpha, const PointCloud& pc, int n_qubits) {
    const int v = int(pc.size());
    const double scale = 1.0 / std::sqrt(3.0 * v);
    double total = 0.0;
    for (int i = 0; i < v; ++i) {
        double zeta = 0.0;
        for (int a = 0; a < 3; ++a) {
            const double r = alpha[3 * i + a] - pc[i][a] * scale;
            zeta += r * r;
        }
        total += std::sqrt(zeta);
        const double aux = std::sqrt(3.0 - pc[i][0] * pc[i][0] - pc[i][1] * pc[i][1] -
                                     pc[i][2] * pc[i][2]) * scale;
        total += std::abs(alpha[3 * v + i] - aux);
    }
    for (std::size_t j = 4 * std::size_t(v); j < (std::size_t{1} << n_qubits); ++j)
        total += std::abs(alpha[j]);
    return total;
}

}  // namespace

TEST_CASE("reconstruction loss: zero characterisation and Eq. 3 oracle") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        const int v = 1 + int(rng() % 16);
        const int n = qubits_for_vertices(v);
        const PointCloud pc = random_unit_cloud(v, rng);
        const auto target = encode_target_amplitudes(pc, n);
        CHECK(reconstruction_loss(target, pc, n) <= 1e-12);

        std::vector<double> alpha(target.size());
        std::uniform_real_distribution<double> u(0.0, 0.3);
        for (double& a : alpha) a = u(rng);
        CHECK(std::abs(reconstruction_loss(alpha, pc, n) - loss_oracle(alpha, pc, n)) <=
              1e-12);
    }
}

TEST_CASE("hand-derivable V=1 loss examples") {
    // target vertex (1,0,0), alpha = (0,0,0,1):
    // sqrt(zeta) = 1/sqrt(3), aux term = |1 - sqrt(2)/sqrt(3)|, no padding
    const PointCloud pc = {{1.0, 0.0, 0.0}};
    const double l = reconstruction_loss({0.0, 0.0, 0.0, 1.0}, pc, 2);
    CHECK(std::abs(l - 0.76085) <= 1e-4);
    const double exact = 1.0 / std::sqrt(3.0) + std::abs(1.0 - std::sqrt(2.0 / 3.0));
    CHECK(std::abs(l - exact) <= 1e-15);

    // N=3, all mass in padding slot 7 adds exactly 1
    std::vector<double> alpha8(8, 0.0);
    alpha8[7] = 1.0;
    const double l8 = reconstruction_loss(alpha8, pc, 3);
    const double zeta = 1.0 / std::sqrt(3.0);
    const double aux = std::sqrt(2.0 / 3.0);
    CHECK(std::abs(l8 - (zeta + aux + 1.0)) <= 1e-14);
}

TEST_CASE("loss gradients in alpha match finite differences") {
    std::mt19937_64 rng(7);
    const double h = 1e-6;
    const PointCloud pc = random_unit_cloud(4, rng);
    const int n = 4;
    std::vector<double> alpha(16);
    std::uniform_real_distribution<double> u(0.01, 0.3);
    for (double& a : alpha) a = u(rng);

    std::vector<double> grad;
    reconstruction_loss_grad(alpha, pc, n, grad);
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        std::vector<double> a = alpha;
        a[k] += h;
        const double up = reconstruction_loss(a, pc, n);
        a[k] -= 2 * h;
        const double dn = reconstruction_loss(a, pc, n);
        CHECK(std::abs(grad[k] - (up - dn) / (2 * h)) <= 1e-6);
    }

    std::vector<double> coords(12);
    for (double& c : coords) c = u(rng);
    std::vector<double> vgrad;
    vertex_loss_grad(coords, pc, vgrad);
    for (std::size_t k = 0; k < coords.size(); ++k) {
        std::vector<double> c = coords;
        c[k] += h;
        const double up = vertex_loss(c, pc);
        c[k] -= 2 * h;
        const double dn = vertex_loss(c, pc);
        CHECK(std::abs(vgrad[k] - (up - dn) / (2 * h)) <= 1e-6);
    }
}

TEST_CASE("adam_step worked examples") {
    SUBCASE("first step moves by ~ -lr * sign(g)") {
        std::vector<double> params = {1.0, -2.0};
        AdamState st = AdamState::init(2, 1e-2);
        adam_step(params, {0.5, -3.0}, st);
        CHECK(std::abs(params[0] - (1.0 - 1e-2)) < 1e-6);
        CHECK(std::abs(params[1] - (-2.0 + 1e-2)) < 1e-6);
    }
    SUBCASE("zero gradients leave parameters unchanged") {
        std::vector<double> params = {0.3, 0.7};
        AdamState st = AdamState::init(2, 1e-2);
        for (int i = 0; i < 10; ++i) adam_step(params, {0.0, 0.0}, st);
        CHECK(params == std::vector<double>{0.3, 0.7});
    }
    SUBCASE("3-step scalar trace matches a hand-rolled recurrence") {
        std::vector<double> params = {0.0};
        AdamState st = AdamState::init(1, 1e-2);
        double theta = 0.0, m = 0.0, v = 0.0;
        for (int t = 1; t <= 3; ++t) {
            adam_step(params, {1.0}, st);
            m = 0.9 * m + 0.1 * 1.0;
            v = 0.99 * v + 0.01 * 1.0;
            const double mh = m / (1.0 - std::pow(0.9, t));
            const double vh = v / (1.0 - std::pow(0.99, t));
            theta -= 1e-2 * mh / (std::sqrt(vh) + 1e-8);
            CHECK(std::abs(params[0] - theta) <= 1e-12);
        }
    }
    SUBCASE("non-finite gradient is an error") {
        std::vector<double> params = {0.0};
        AdamState st = AdamState::init(1, 1e-2);
        CHECK_THROWS(adam_step(params, {std::nan("")}, st));
    }
}

TEST_CASE("plateau schedule") {
    SUBCASE("decreasing loss never reduces lr") {
        ScheduleState st;
        double lr = 1e-2;
        for (int i = 0; i < 1000; ++i) schedule_update(st, 1.0 - i * 1e-3, lr);
        CHECK(lr == 1e-2);
    }
    SUBCASE("constant loss for patience steps halves lr once") {
        ScheduleState st;
        double lr = 1e-2;
        schedule_update(st, 1.0, lr);  // establishes best
        for (int i = 0; i < st.patience - 1; ++i) {
            schedule_update(st, 1.0, lr);
            CHECK(lr == 1e-2);
        }
        schedule_update(st, 1.0, lr);
        CHECK(lr == 5e-3);
        schedule_update(st, 1.0, lr);
        CHECK(lr == 5e-3);  // counter was reset
    }
    SUBCASE("lr floors at min_lr") {
        ScheduleState st;
        double lr = 2e-5;
        for (int i = 0; i < 10 * st.patience; ++i) schedule_update(st, 1.0, lr);
        CHECK(lr == st.min_lr);
    }
}

TEST_CASE("Adam drives the quadratic norm below 1e-3 within 5000 steps") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::vector<double> theta(8);
    for (double& t : theta) t = u(rng);
    AdamState st = AdamState::init(int(theta.size()), 1e-2);
    for (int step = 0; step < 5000; ++step) {
        std::vector<double> g(theta.size());
        for (std::size_t i = 0; i < theta.size(); ++i) g[i] = 2.0 * theta[i];
        adam_step(theta, g, st);
    }
    double nrm = 0.0;
    for (double t : theta) nrm += t * t;
    CHECK(std::sqrt(nrm) < 1e-3);
}

TEST_CASE("TrainLog CSV round-trip with interleaved eval rows") {
    TrainLog log;
    log.steps = {{0, 1.5, 1e-2}, {1, 1.25, 1e-2}, {2, 1.0, 5e-3}};
    log.evals = {{0, "train", 12.5}, {0, "test", 13.0}, {2, "test", 9.75}};
    const std::string path = "/tmp/qae3d_test_log.csv";
    log.save_csv(path);
    const TrainLog back = TrainLog::load_csv(path);
    REQUIRE(back.steps.size() == 3);
    REQUIRE(back.evals.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.steps[i].step == log.steps[i].step);
        CHECK(back.steps[i].loss == log.steps[i].loss);
        CHECK(back.steps[i].lr == log.steps[i].lr);
        CHECK(back.evals[i].step == log.evals[i].step);
        CHECK(back.evals[i].split == log.evals[i].split);
        CHECK(back.evals[i].metric_cm == log.evals[i].metric_cm);
    }
    // SVG rendering is deterministic on this log
    CHECK(render_training_svg(log) == render_training_svg(log));
    CHECK(render_training_svg(log).find("<svg") != std::string::npos);
    CHECK_THROWS(render_training_svg(TrainLog{}));
    std::remove(path.c_str());
}

TEST_CASE("train loop: 0 epochs, determinism, constant-data evaluation") {
    const MotionDataset ds = synthesize_chain(60, 4, 5);
    TrainConfig config;
    config.model = "quantum";
    config.blocks = 1;
    config.epochs = 2;
    config.max_steps = 40;
    config.eval_interval = 20;
    config.seed = 17;

    SUBCASE("0 epochs returns the initial parameters") {
        TrainConfig zero = config;
        zero.epochs = 0;
        const ExperimentResult r = run_experiment(ds, zero);
        const PreparedData data = prepare_data(ds, zero);
        const auto fresh = build_model(zero, data);
        CHECK(r.model->parameters() == fresh->parameters());
        CHECK(r.log.steps.empty());
        CHECK(!r.log.evals.empty());
    }

    SUBCASE("same config and seed give identical trajectories") {
        const ExperimentResult a = run_experiment(ds, config);
        const ExperimentResult b = run_experiment(ds, config);
        CHECK(a.model->parameters() == b.model->parameters());
        REQUIRE(a.log.steps.size() == b.log.steps.size());
        for (std::size_t i = 0; i < a.log.steps.size(); ++i) {
            CHECK(a.log.steps[i].loss == b.log.steps[i].loss);
            CHECK(a.log.steps[i].lr == b.log.steps[i].lr);
        }
        CHECK(a.final_test_cm == b.final_test_cm);
        CHECK(a.log.steps.size() == 40);  // max_steps cap binds before epochs end
    }

    SUBCASE("constant baseline on frozen data scores zero") {
        const MotionDataset frozen = synthesize_chain(60, 4, 5, 12.0, 0.0);
        TrainConfig cc = config;
        cc.model = "constant";
        const ExperimentResult r = run_experiment(frozen, cc);
        CHECK(r.final_train_cm <= 1e-10);
        CHECK(r.final_test_cm <= 1e-10);
        CHECK(r.param_count == 0);
    }
}

TEST_CASE("config parsing is strict and overrides work") {
    const std::string path = "/tmp/qae3d_test_cfg.txt";
    {
        std::ofstream out(path);
        out << "# comment line\n";
        out << "model = quantum\n";
        out << "blocks = 4\n";
        out << "lr = 0.005\n";
        out << "seed = 9\n";
    }
    TrainConfig cfg = parse_config_file(path);
    CHECK(cfg.model == "quantum");
    CHECK(cfg.blocks == 4);
    CHECK(cfg.lr == 0.005);
    CHECK(cfg.seed == 9);

    apply_config_override(cfg, "epochs", "3");
    CHECK(cfg.epochs == 3);
    CHECK_THROWS(apply_config_override(cfg, "not_a_key", "1"));
    try {
        apply_config_override(cfg, "blocks", "soon");
        FAIL("expected type error");
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("blocks") != std::string::npos);
    }

    cfg.n_qubits = 6;
    cfg.n_discard = 9;
    CHECK_THROWS(validate_config(cfg));
    std::remove(path.c_str());
}
