#include <benchmark/benchmark.h>

#include <numbers>

#include "pulseforge/models.hpp"
#include "pulseforge/noise.hpp"
#include "pulseforge/pulses.hpp"
#include "pulseforge/qcore.hpp"
#include "pulseforge/training.hpp"

using namespace pulseforge;

namespace {

constexpr double pi = std::numbers::pi;

const DeviceModel& dev() {
    static const DeviceModel d = brisbane_device();
    return d;
}

void BM_ExpmHermitian4x4(benchmark::State& state) {
    const CrossResonancePulse p(0.1, 0.3, 0.01, 660.0, PulseEnvelope::constant(), 0, 1);
    const CMatrix h = cr_hamiltonian(p, dev(), 1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(expm_hermitian(h, 660.0));
    }
}
BENCHMARK(BM_ExpmHermitian4x4);

void BM_SingleQubitPropagator(benchmark::State& state) {
    const SingleQubitPulse p(0.05, 0.7, 0.0, 300.0);
    const VirtualZFrame frame(1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(single_qubit_propagator(p, frame));
    }
}
BENCHMARK(BM_SingleQubitPropagator);

void BM_DepolarizingTwoQubit(benchmark::State& state) {
    const KrausChannel ch = depolarizing_2q(0.01);
    const DensityMatrix rho = DensityMatrix::maximally_mixed(4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_channel(rho, ch, {0, 1}));
    }
}
BENCHMARK(BM_DepolarizingTwoQubit);

void BM_GateForward(benchmark::State& state) {
    const int n_qubits = static_cast<int>(state.range(0));
    const ModelParams params = random_init(ModelVariant::Gate, n_qubits, 5, dev(), 3);
    NoisePolicy policy;
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward({0.4, -1.1, 2.0}, params, dev(), policy));
    }
}
BENCHMARK(BM_GateForward)->Arg(1)->Arg(2);

void BM_PulsedForward(benchmark::State& state) {
    const int n_qubits = static_cast<int>(state.range(0));
    const ModelParams params = random_init(ModelVariant::Pulsed, n_qubits, 5, dev(), 3);
    NoisePolicy policy;
    for (auto _ : state) {
        benchmark::DoNotOptimize(forward({0.4, -1.1, 2.0}, params, dev(), policy));
    }
}
BENCHMARK(BM_PulsedForward)->Arg(1)->Arg(2);

void BM_DatasetLoss(benchmark::State& state) {
    const ModelParams params = random_init(ModelVariant::Gate, 2, 5, dev(), 3);
    Dataset ds;
    for (int i = 0; i < 32; ++i) {
        ds.features.push_back({0.1 * i - 1.5, 0.2 * i - 3.0, 0.0});
        ds.labels.push_back(i % 2);
    }
    NoisePolicy policy;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dataset_loss(ds, params, dev(), policy));
    }
}
BENCHMARK(BM_DatasetLoss);

void BM_VzFlush(benchmark::State& state) {
    const DensityMatrix rho = DensityMatrix::maximally_mixed(4);
    VirtualZFrame frames(2);
    frames = vz(frames, 0, 0.3);
    frames = vz(frames, 1, -pi / 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(flush_frames(rho, frames));
    }
}
BENCHMARK(BM_VzFlush);

}  // namespace

BENCHMARK_MAIN();
