#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "pulseforge/training.hpp"
#include "support.hpp"

using namespace pulseforge;

namespace {
constexpr double pi = std::numbers::pi;

const DeviceModel& dev() {
    static const DeviceModel d = brisbane_device();
    return d;
}

/// Two point clouds separated along the second feature; a single RY-angle
/// threshold classifies them.
Dataset separable_dataset(int n, std::uint64_t seed) {
    Rng rng(seed);
    Dataset ds;
    for (int i = 0; i < n; ++i) {
        const int label = i % 2;
        const double x2 = label == 1 ? rng.uniform(1.8, 2.8) : rng.uniform(-2.8, -1.8);
        ds.features.push_back({rng.uniform(-0.2, 0.2), x2, rng.uniform(-0.2, 0.2)});
        ds.labels.push_back(label);
    }
    return ds;
}
}  // namespace

TEST_CASE("flatten lengths follow the parameter counting") {
    CHECK(flatten(random_init(ModelVariant::Gate, 1, 4, dev(), 1)).size() == 3 * 4 + 2);
    CHECK(flatten(random_init(ModelVariant::Gate, 2, 4, dev(), 1)).size() == 9 * 4 + 2);
    CHECK(flatten(random_init(ModelVariant::Pulsed, 1, 4, dev(), 1)).size() == 4 * 4 + 2);
    CHECK(flatten(random_init(ModelVariant::Pulsed, 2, 4, dev(), 1)).size() == 11 * 4 + 2);
}

TEST_CASE("flatten and unflatten are inverse") {
    for (int variant = 0; variant < 2; ++variant) {
        for (int qubits = 1; qubits <= 2; ++qubits) {
            const ModelParams p = random_init(
                variant == 0 ? ModelVariant::Gate : ModelVariant::Pulsed, qubits, 3, dev(), 7);
            const std::vector<double> vec = flatten(p);
            const ModelParams back = unflatten(vec, p);
            CHECK(flatten(back) == vec);
        }
    }
    const ModelParams shape = random_init(ModelVariant::Gate, 1, 2, dev(), 0);
    CHECK_THROWS_AS(unflatten(std::vector<double>(3), shape), std::invalid_argument);
    CHECK_THROWS_AS(unflatten(std::vector<double>(99), shape), std::invalid_argument);
}

TEST_CASE("random_init respects the documented ranges") {
    const ModelParams p = random_init(ModelVariant::Pulsed, 2, 5, dev(), 123);
    for (const auto& l : p.pulse_layers) {
        for (std::size_t q = 0; q < l.qubit.size(); ++q) {
            CHECK(l.qubit[q].omega >= 0.0);
            CHECK(l.qubit[q].omega <= 2.0 * pi / dev().qubits[q].oneq_duration_ns);
            CHECK(std::abs(l.qubit[q].nu1) <= pi);
            CHECK(std::abs(l.qubit[q].gamma) <= pi);
        }
        CHECK(l.entangler->omega <= 2.0 * pi / dev().twoq_duration_ns);
    }
}

TEST_CASE("finite differences on analytic functions") {
    const auto quadratic = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return s;
    };
    const auto grad = finite_diff_grad(quadratic, {1.0, 2.0}, 1e-4);
    CHECK(grad[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(grad[1] == doctest::Approx(4.0).epsilon(1e-6));

    const auto constant = [](const std::vector<double>&) { return 3.5; };
    for (double g : finite_diff_grad(constant, {0.1, 0.2, 0.3}, 1e-4)) CHECK(g == 0.0);

    CHECK_THROWS_AS(finite_diff_grad(constant, {0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("model-loss gradients are step-size stable") {
    const NoisePolicy off = NoisePolicy::noiseless();
    const Dataset ds = separable_dataset(6, 3);
    const ModelParams shape = random_init(ModelVariant::Gate, 1, 2, dev(), 5);
    const auto lossfn = [&](const std::vector<double>& v) {
        return dataset_loss(ds, unflatten(v, shape), dev(), off);
    };
    const std::vector<double> at = flatten(shape);
    const auto coarse = finite_diff_grad(lossfn, at, 1e-3);
    const auto fine = finite_diff_grad(lossfn, at, 1e-5);
    for (std::size_t i = 0; i < at.size(); ++i) {
        CHECK(std::abs(coarse[i] - fine[i]) < 1e-4);
    }
}

TEST_CASE("finite differences agree with the parameter-shift rule") {
    const NoisePolicy off = NoisePolicy::noiseless();
    Rng rng(11);
    const Dataset ds = [] {
        Dataset d;
        d.features = {{0.4, -1.3, 0.9}};
        d.labels = {1};
        return d;
    }();

    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const ModelParams shape = random_init(ModelVariant::Gate, 1, 2, dev(), 50 + trial);
        const std::vector<double> at = flatten(shape);

        const auto fidelity_at = [&](const std::vector<double>& v) {
            const ModelParams p = unflatten(v, shape);
            const DensityMatrix rho = gate_forward(ds.features[0], p, dev(), off);
            return fidelity_pure(target_state(ds.labels[0], p.targets), rho);
        };
        const auto lossfn = [&](const std::vector<double>& v) {
            return dataset_loss(ds, unflatten(v, shape), dev(), off);
        };

        // Euler angles only (the last two coordinates are the target angles,
        // which are not generated by a Pauli/2 rotation).
        const std::size_t coord = rng.uniform_int(at.size() - 2);
        std::vector<double> up = at, down = at;
        up[coord] += pi / 2;
        down[coord] -= pi / 2;
        const double df = 0.5 * (fidelity_at(up) - fidelity_at(down));
        const double shift_grad = -2.0 * (1.0 - fidelity_at(at)) * df;

        std::vector<double> probe_up = at, probe_down = at;
        probe_up[coord] += 1e-4;
        probe_down[coord] -= 1e-4;
        const double fd = (lossfn(probe_up) - lossfn(probe_down)) / 2e-4;
        worst = std::max(worst, std::abs(fd - shift_grad));
    }
    CHECK(worst < 1e-5);
}

TEST_CASE("adam_step behaves like textbook Adam") {
    TrainConfig cfg;
    cfg.learning_rate = 0.05;
    AdamState state;

    const std::vector<double> grad = {0.3, -0.02, 1.5};
    auto [s1, update] = adam_step(std::move(state), grad, cfg);
    for (std::size_t i = 0; i < grad.size(); ++i) {
        // Bias correction makes the first update ~ lr * sign(grad).
        CHECK(std::abs(update[i]) == doctest::Approx(cfg.learning_rate).epsilon(1e-4));
        CHECK(update[i] * grad[i] < 0.0);
    }

    auto [s2, zero_update] = adam_step(std::move(s1), {0.0, 0.0, 0.0}, cfg);
    AdamState replay;
    auto [r1, u1] = adam_step(std::move(replay), grad, cfg);
    auto [r2, u2] = adam_step(std::move(r1), {0.0, 0.0, 0.0}, cfg);
    CHECK(zero_update == u2);
    CHECK(s2.m == r2.m);
    CHECK(s2.v == r2.v);
}

TEST_CASE("zero gradients freeze fresh Adam state") {
    TrainConfig cfg;
    AdamState state;
    auto [next, update] = adam_step(std::move(state), {0.0, 0.0}, cfg);
    CHECK(update == std::vector<double>{0.0, 0.0});
}

TEST_CASE("train rejects invalid configs") {
    TrainConfig bad;
    bad.epochs = 0;
    const Dataset ds = separable_dataset(4, 1);
    CHECK_THROWS_AS(
        train(ModelVariant::Gate, 1, 1, ds, ds, dev(), NoisePolicy::noiseless(), bad),
        std::invalid_argument);
}

TEST_CASE("a separable dataset trains to perfect accuracy") {
    const Dataset train_set = separable_dataset(20, 9);
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.seed = 4;
    const TrainReport report = train(ModelVariant::Gate, 1, 2, train_set, train_set, dev(),
                                     NoisePolicy::noiseless(), cfg);
    CHECK(report.train_accuracy == doctest::Approx(1.0));
    CHECK(report.loss_history.size() == 200);
    CHECK(report.loss_history.back() <= report.loss_history.front());
    for (std::size_t e = 1; e < report.loss_history.size(); ++e) {
        CHECK(report.loss_history[e] <= report.loss_history[e - 1]);
    }
}

TEST_CASE("training is bit-deterministic for a fixed seed") {
    const Dataset train_set = separable_dataset(8, 2);
    TrainConfig cfg;
    cfg.epochs = 12;
    cfg.seed = 31;
    const TrainReport a = train(ModelVariant::Pulsed, 1, 2, train_set, train_set, dev(),
                                NoisePolicy::noiseless(), cfg);
    const TrainReport b = train(ModelVariant::Pulsed, 1, 2, train_set, train_set, dev(),
                                NoisePolicy::noiseless(), cfg);
    CHECK(a.loss_history == b.loss_history);
    CHECK(flatten(a.final_params) == flatten(b.final_params));
}

TEST_CASE("mini-batch training still improves the loss") {
    const Dataset train_set = separable_dataset(16, 6);
    TrainConfig cfg;
    cfg.epochs = 30;
    cfg.seed = 8;
    cfg.batch = 4;
    const TrainReport report = train(ModelVariant::Gate, 1, 1, train_set, train_set, dev(),
                                     NoisePolicy::noiseless(), cfg);
    CHECK(report.loss_history.back() < report.loss_history.front() + 1e-12);
    CHECK(report.train_accuracy > 0.7);
}

TEST_CASE("warm start copies qubit 1 and zeroes the entanglers") {
    const Dataset train_set = separable_dataset(10, 12);
    TrainConfig cfg;
    cfg.epochs = 15;

    for (ModelVariant variant : {ModelVariant::Gate, ModelVariant::Pulsed}) {
        cfg.seed = 21;
        const TrainReport r1 = train(variant, 1, 3, train_set, train_set, dev(),
                                     NoisePolicy::noiseless(), cfg);
        const ModelParams warm = warm_start_two_qubit(r1.final_params, 99, dev());
        CHECK(warm.n_qubits == 2);
        CHECK(warm.targets.theta == r1.final_params.targets.theta);
        if (variant == ModelVariant::Gate) {
            for (int l = 0; l < 3; ++l) {
                CHECK(warm.gate_layers[l].qubit[0].theta2 ==
                      r1.final_params.gate_layers[l].qubit[0].theta2);
                CHECK(warm.gate_layers[l].entangler->theta1 == 0.0);
                CHECK(warm.gate_layers[l].entangler->theta2 == 0.0);
                CHECK(warm.gate_layers[l].entangler->theta3 == 0.0);
            }
        } else {
            for (int l = 0; l < 3; ++l) {
                CHECK(warm.pulse_layers[l].qubit[0].omega ==
                      r1.final_params.pulse_layers[l].qubit[0].omega);
                CHECK(warm.pulse_layers[l].entangler->omega == 0.0);
                CHECK(warm.pulse_layers[l].entangler->delta == 0.0);
            }
        }

        // Noiseless continuity: the extended model starts at the final
        // single-qubit loss.
        const double loss2 = dataset_loss(train_set, warm, dev(), NoisePolicy::noiseless());
        CHECK(std::abs(loss2 - r1.final_loss) < 1e-9);

        const ModelParams again = warm_start_two_qubit(r1.final_params, 99, dev());
        CHECK(flatten(again) == flatten(warm));
        CHECK_THROWS_AS(warm_start_two_qubit(warm, 1, dev()), std::invalid_argument);
    }
}
