#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "pulseforge/datasets.hpp"
#include "pulseforge/models.hpp"
#include "pulseforge/noise.hpp"

namespace pulseforge {

struct TrainConfig {
    int epochs = 200;
    double learning_rate = 0.05;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_adam = 1e-8;
    double fd_step = 1e-4;
    std::uint64_t seed = 0;
    int batch = 0;  // 0 = full batch

    void validate() const;
};

struct TrainReport {
    std::vector<double> loss_history;  // best loss seen up to each epoch
    ModelParams final_params;          // lowest-loss parameters of the run
    double final_loss = 0.0;
    int best_epoch = 0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    double wall_time_s = 0.0;
};

/// Order-stable packing of every trainable parameter, target-state angles
/// last. Gate models: 3 angles per qubit per layer (+3 entangler angles for
/// two qubits); pulsed models: 4 block parameters per qubit per layer (+3
/// entangler parameters).
std::vector<double> flatten(const ModelParams& params);

/// Inverse of flatten; `shape` supplies variant, qubit and layer structure.
/// Throws on length mismatch.
ModelParams unflatten(const std::vector<double>& vec, const ModelParams& shape);

/// Central differences, coordinates evaluated concurrently.
std::vector<double> finite_diff_grad(const std::function<double(const std::vector<double>&)>& lossfn,
                                     const std::vector<double>& vec, double h);

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;
};

/// Standard bias-corrected Adam; returns the updated state and the additive
/// parameter update.
std::pair<AdamState, std::vector<double>> adam_step(AdamState state,
                                                    const std::vector<double>& grad,
                                                    const TrainConfig& config);

/// Seeded initialization: angles uniform in [-pi, pi], amplitudes uniform in
/// [0, 2 pi / T] so a full rotation stays reachable within one pulse.
ModelParams random_init(ModelVariant variant, int n_qubits, int layers, const DeviceModel& dev,
                        std::uint64_t seed);

TrainReport train(ModelVariant variant, int n_qubits, int layers, const Dataset& train_set,
                  const Dataset& test_set, const DeviceModel& dev, const NoisePolicy& policy,
                  const TrainConfig& config, const std::optional<ModelParams>& init = {});

/// Two-qubit extension of a trained single-qubit model: qubit-1 layers and
/// targets copied, entanglers zeroed (the qubits start decoupled), qubit-2
/// parameters freshly seeded.
ModelParams warm_start_two_qubit(const ModelParams& trained_1q, std::uint64_t seed,
                                 const DeviceModel& dev);

}  // namespace pulseforge
