#include "pulseforge/training.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pulseforge/parallel.hpp"
#include "pulseforge/rng.hpp"

namespace pulseforge {

namespace {

constexpr double pi = std::numbers::pi;

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

}  // namespace

void TrainConfig::validate() const {
    require(epochs >= 1, "TrainConfig: epochs must be >= 1");
    require(learning_rate > 0.0, "TrainConfig: learning_rate must be positive");
    require(fd_step > 0.0, "TrainConfig: fd_step must be positive");
    require(batch >= 0, "TrainConfig: batch must be >= 0");
}

std::vector<double> flatten(const ModelParams& params) {
    params.validate();
    std::vector<double> out;
    if (params.variant == ModelVariant::Gate) {
        for (const GateLayerParams& l : params.gate_layers) {
            for (const EulerAngles& a : l.qubit) {
                out.push_back(a.theta1);
                out.push_back(a.theta2);
                out.push_back(a.theta3);
            }
            if (l.entangler) {
                out.push_back(l.entangler->theta1);
                out.push_back(l.entangler->theta2);
                out.push_back(l.entangler->theta3);
            }
        }
    } else {
        for (const PulseLayerParams& l : params.pulse_layers) {
            for (const PulseBlockParams& b : l.qubit) {
                out.push_back(b.nu1);
                out.push_back(b.nu2);
                out.push_back(b.omega);
                out.push_back(b.gamma);
            }
            if (l.entangler) {
                out.push_back(l.entangler->omega);
                out.push_back(l.entangler->gamma);
                out.push_back(l.entangler->delta);
            }
        }
    }
    out.push_back(params.targets.theta);
    out.push_back(params.targets.phi);
    return out;
}

ModelParams unflatten(const std::vector<double>& vec, const ModelParams& shape) {
    ModelParams out = shape;
    std::size_t i = 0;
    const auto next = [&]() {
        if (i >= vec.size()) throw std::invalid_argument("unflatten: vector too short");
        return vec[i++];
    };
    if (out.variant == ModelVariant::Gate) {
        for (GateLayerParams& l : out.gate_layers) {
            for (EulerAngles& a : l.qubit) {
                a.theta1 = next();
                a.theta2 = next();
                a.theta3 = next();
            }
            if (l.entangler) {
                l.entangler->theta1 = next();
                l.entangler->theta2 = next();
                l.entangler->theta3 = next();
            }
        }
    } else {
        for (PulseLayerParams& l : out.pulse_layers) {
            for (PulseBlockParams& b : l.qubit) {
                b.nu1 = next();
                b.nu2 = next();
                b.omega = next();
                b.gamma = next();
            }
            if (l.entangler) {
                l.entangler->omega = next();
                l.entangler->gamma = next();
                l.entangler->delta = next();
            }
        }
    }
    out.targets.theta = next();
    out.targets.phi = next();
    if (i != vec.size()) throw std::invalid_argument("unflatten: vector too long");
    return out;
}

std::vector<double> finite_diff_grad(const std::function<double(const std::vector<double>&)>& lossfn,
                                     const std::vector<double>& vec, double h) {
    require(h > 0.0, "finite_diff_grad: step must be positive");
    std::vector<double> grad(vec.size(), 0.0);
    parallel_for(vec.size(), [&](std::size_t i) {
        std::vector<double> probe = vec;
        probe[i] = vec[i] + h;
        const double up = lossfn(probe);
        probe[i] = vec[i] - h;
        const double down = lossfn(probe);
        grad[i] = (up - down) / (2.0 * h);
    });
    return grad;
}

std::pair<AdamState, std::vector<double>> adam_step(AdamState state,
                                                    const std::vector<double>& grad,
                                                    const TrainConfig& config) {
    if (state.m.empty()) {
        state.m.assign(grad.size(), 0.0);
        state.v.assign(grad.size(), 0.0);
    }
    require(state.m.size() == grad.size(), "adam_step: state/gradient size mismatch");
    state.step += 1;
    const double b1 = config.beta1;
    const double b2 = config.beta2;
    const double corr1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double corr2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    std::vector<double> update(grad.size());
    for (std::size_t i = 0; i < grad.size(); ++i) {
        state.m[i] = b1 * state.m[i] + (1.0 - b1) * grad[i];
        state.v[i] = b2 * state.v[i] + (1.0 - b2) * grad[i] * grad[i];
        const double mhat = state.m[i] / corr1;
        const double vhat = state.v[i] / corr2;
        update[i] = -config.learning_rate * mhat / (std::sqrt(vhat) + config.eps_adam);
    }
    return {std::move(state), std::move(update)};
}

ModelParams random_init(ModelVariant variant, int n_qubits, int layers, const DeviceModel& dev,
                        std::uint64_t seed) {
    require(layers >= 1, "random_init: at least one layer");
    require(n_qubits == 1 || n_qubits == 2, "random_init: 1 or 2 qubits");
    Rng rng(seed);
    const auto angle = [&] { return rng.uniform(-pi, pi); };

    ModelParams p;
    p.variant = variant;
    p.n_qubits = n_qubits;
    if (variant == ModelVariant::Gate) {
        p.gate_layers.resize(layers);
        for (GateLayerParams& l : p.gate_layers) {
            for (int q = 0; q < n_qubits; ++q) l.qubit.push_back({angle(), angle(), angle()});
            if (n_qubits == 2) l.entangler = EulerAngles{angle(), angle(), angle()};
        }
    } else {
        p.pulse_layers.resize(layers);
        for (PulseLayerParams& l : p.pulse_layers) {
            for (int q = 0; q < n_qubits; ++q) {
                const double omega_max = 2.0 * pi / dev.qubits.at(q).oneq_duration_ns;
                l.qubit.push_back({angle(), angle(), rng.uniform(0.0, omega_max), angle()});
            }
            if (n_qubits == 2) {
                const double omega_max = 2.0 * pi / dev.twoq_duration_ns;
                const double delta_max = pi / dev.twoq_duration_ns;
                l.entangler = PulseEntanglerParams{rng.uniform(0.0, omega_max), angle(),
                                                   rng.uniform(-delta_max, delta_max)};
            }
        }
    }
    p.targets = {angle(), angle()};
    return p;
}

namespace {

/// Per-coordinate factors mapping natural parameter units onto a common
/// angle scale: amplitudes and detunings (rad/ns) are optimized as the
/// dimensionless rotation angle Omega*T, so one optimizer step means the
/// same thing for every coordinate. Order mirrors flatten().
std::vector<double> parameter_scales(const ModelParams& shape, const DeviceModel& dev) {
    std::vector<double> scales;
    if (shape.variant == ModelVariant::Gate) {
        scales.assign(flatten(shape).size(), 1.0);
        return scales;
    }
    for (const PulseLayerParams& l : shape.pulse_layers) {
        for (std::size_t q = 0; q < l.qubit.size(); ++q) {
            const double t = dev.qubits.at(q).oneq_duration_ns;
            scales.insert(scales.end(), {1.0, 1.0, t, 1.0});  // nu1, nu2, omega, gamma
        }
        if (l.entangler) {
            const double t = dev.twoq_duration_ns;
            scales.insert(scales.end(), {t, 1.0, t});  // omega, gamma, delta
        }
    }
    scales.insert(scales.end(), {1.0, 1.0});  // target angles
    return scales;
}

}  // namespace

TrainReport train(ModelVariant variant, int n_qubits, int layers, const Dataset& train_set,
                  const Dataset& test_set, const DeviceModel& dev, const NoisePolicy& policy,
                  const TrainConfig& config, const std::optional<ModelParams>& init) {
    config.validate();
    require(train_set.size() > 0, "train: empty training set");
    const auto t_start = std::chrono::steady_clock::now();

    const ModelParams shape =
        init ? *init : random_init(variant, n_qubits, layers, dev, config.seed);
    require(shape.variant == variant, "train: init variant mismatch");
    require(shape.n_qubits == n_qubits, "train: init qubit count mismatch");
    require(shape.layer_count() == layers, "train: init layer count mismatch");

    const std::vector<double> scales = parameter_scales(shape, dev);
    const auto to_natural = [&](const std::vector<double>& scaled) {
        std::vector<double> natural(scaled.size());
        for (std::size_t i = 0; i < scaled.size(); ++i) natural[i] = scaled[i] / scales[i];
        return natural;
    };

    std::vector<double> params = flatten(shape);
    for (std::size_t i = 0; i < params.size(); ++i) params[i] *= scales[i];
    const auto loss_at = [&](const std::vector<double>& vec, const Dataset& ds) {
        return dataset_loss(ds, unflatten(to_natural(vec), shape), dev, policy);
    };

    Rng batch_rng(derive_seed(config.seed, 17));
    std::vector<std::size_t> order(train_set.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    const auto subset = [&](const std::vector<std::size_t>& idx, std::size_t begin,
                            std::size_t count) {
        Dataset part;
        part.features.reserve(count);
        part.labels.reserve(count);
        for (std::size_t i = 0; i < count; ++i) {
            part.features.push_back(train_set.features[idx[begin + i]]);
            part.labels.push_back(train_set.labels[idx[begin + i]]);
        }
        return part;
    };

    TrainReport report;
    double best_loss = loss_at(params, train_set);
    std::vector<double> best_params = params;
    report.best_epoch = 0;
    report.loss_history.reserve(config.epochs);

    AdamState adam;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        if (config.batch <= 0 || static_cast<std::size_t>(config.batch) >= train_set.size()) {
            const auto grad = finite_diff_grad(
                [&](const std::vector<double>& v) { return loss_at(v, train_set); }, params,
                config.fd_step);
            auto [next_state, update] = adam_step(std::move(adam), grad, config);
            adam = std::move(next_state);
            for (std::size_t i = 0; i < params.size(); ++i) params[i] += update[i];
        } else {
            batch_rng.shuffle(order);
            for (std::size_t begin = 0; begin < order.size();
                 begin += static_cast<std::size_t>(config.batch)) {
                const std::size_t count =
                    std::min<std::size_t>(config.batch, order.size() - begin);
                const Dataset part = subset(order, begin, count);
                const auto grad = finite_diff_grad(
                    [&](const std::vector<double>& v) { return loss_at(v, part); }, params,
                    config.fd_step);
                auto [next_state, update] = adam_step(std::move(adam), grad, config);
                adam = std::move(next_state);
                for (std::size_t i = 0; i < params.size(); ++i) params[i] += update[i];
            }
        }
        const double loss = loss_at(params, train_set);
        if (loss < best_loss) {
            best_loss = loss;
            best_params = params;
            report.best_epoch = epoch;
        }
        report.loss_history.push_back(best_loss);
    }

    report.final_loss = best_loss;
    report.final_params = unflatten(to_natural(best_params), shape);
    report.train_accuracy = accuracy(train_set, report.final_params, dev, policy);
    report.test_accuracy =
        test_set.size() > 0 ? accuracy(test_set, report.final_params, dev, policy) : 0.0;
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

ModelParams warm_start_two_qubit(const ModelParams& trained_1q, std::uint64_t seed,
                                 const DeviceModel& dev) {
    require(trained_1q.n_qubits == 1, "warm_start_two_qubit: input must be single-qubit");
    trained_1q.validate();
    const int layers = trained_1q.layer_count();
    const ModelParams fresh =
        random_init(trained_1q.variant, 2, layers, dev, derive_seed(seed, 2));

    ModelParams out;
    out.variant = trained_1q.variant;
    out.n_qubits = 2;
    out.targets = trained_1q.targets;
    if (out.variant == ModelVariant::Gate) {
        out.gate_layers.resize(layers);
        for (int l = 0; l < layers; ++l) {
            out.gate_layers[l].qubit = {trained_1q.gate_layers[l].qubit[0],
                                        fresh.gate_layers[l].qubit[1]};
            out.gate_layers[l].entangler = EulerAngles{0.0, 0.0, 0.0};
        }
    } else {
        out.pulse_layers.resize(layers);
        for (int l = 0; l < layers; ++l) {
            out.pulse_layers[l].qubit = {trained_1q.pulse_layers[l].qubit[0],
                                         fresh.pulse_layers[l].qubit[1]};
            out.pulse_layers[l].entangler = PulseEntanglerParams{0.0, 0.0, 0.0};
        }
    }
    return out;
}

}  // namespace pulseforge
