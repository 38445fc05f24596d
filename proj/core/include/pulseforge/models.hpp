#pragma once

#include <array>
#include <optional>
#include <vector>

#include "pulseforge/datasets.hpp"
#include "pulseforge/gates.hpp"
#include "pulseforge/noise.hpp"
#include "pulseforge/pulses.hpp"
#include "pulseforge/qcore.hpp"

namespace pulseforge {

/// Trainable readout states |s0> = cos(theta)|0> + e^{i phi} sin(theta)|1>
/// and the orthogonal |s1>.
struct TargetStateParams {
    double theta = 0.0;
    double phi = 0.0;
};

struct GateLayerParams {
    std::vector<EulerAngles> qubit;          // one per qubit
    std::optional<EulerAngles> entangler;    // two-qubit models only
};

/// One single-qubit pulse block: VZ(nu1) . pulse(Omega, gamma) . VZ(nu2).
struct PulseBlockParams {
    double nu1 = 0.0;
    double nu2 = 0.0;
    double omega = 0.0;
    double gamma = 0.0;
};

struct PulseEntanglerParams {
    double omega = 0.0;
    double gamma = 0.0;
    double delta = 0.0;
};

struct PulseLayerParams {
    std::vector<PulseBlockParams> qubit;
    std::optional<PulseEntanglerParams> entangler;
};

enum class ModelVariant { Gate, Pulsed };

struct ModelParams {
    ModelVariant variant = ModelVariant::Gate;
    int n_qubits = 1;
    std::vector<GateLayerParams> gate_layers;
    std::vector<PulseLayerParams> pulse_layers;
    TargetStateParams targets;

    int layer_count() const {
        return static_cast<int>(variant == ModelVariant::Gate ? gate_layers.size()
                                                              : pulse_layers.size());
    }
    void validate() const;
};

/// Angle encoding RZ(x1) RY(x2) RZ(x3), applied identically to every qubit.
CMatrix encode(const std::array<double, 3>& x);

PureState target_state(int label, const TargetStateParams& t);

/// Unitary whose columns are |s0>, |s1>.
CMatrix target_basis(const TargetStateParams& t);

DensityMatrix gate_forward(const std::array<double, 3>& x, const ModelParams& params,
                           const DeviceModel& dev, const NoisePolicy& policy);

struct PulsedRegister {
    DensityMatrix rho;
    VirtualZFrame frames;
};

/// One parameterized pulse block on `qubit`: frame update nu2, resonant
/// pulse of the device's 1Q duration, frame update nu1, with the pulse's
/// noise channels.
PulsedRegister pulse_block(PulsedRegister reg, const PulseBlockParams& b, int qubit,
                           const DeviceModel& dev, const NoisePolicy& policy);

DensityMatrix pulsed_forward(const std::array<double, 3>& x, const ModelParams& params,
                             const DeviceModel& dev, const NoisePolicy& policy);

DensityMatrix forward(const std::array<double, 3>& x, const ModelParams& params,
                      const DeviceModel& dev, const NoisePolicy& policy);

/// (1 - F)^2 with F the fidelity of the qubit-1 marginal against the
/// labeled target state (readout-confused when SPAM is active).
double sample_loss(const DensityMatrix& rho_final, int label, const TargetStateParams& targets,
                   const DeviceModel& dev, const NoisePolicy& policy);

double dataset_loss(const Dataset& ds, const ModelParams& params, const DeviceModel& dev,
                    const NoisePolicy& policy);

/// Higher-probability target label; ties resolve to 0.
int predict(const DensityMatrix& rho_final, const TargetStateParams& targets,
            const DeviceModel& dev, const NoisePolicy& policy);

double accuracy(const Dataset& ds, const ModelParams& params, const DeviceModel& dev,
                const NoisePolicy& policy);

}  // namespace pulseforge
