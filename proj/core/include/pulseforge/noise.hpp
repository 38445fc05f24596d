#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pulseforge/qcore.hpp"

namespace pulseforge {

enum class ChannelKind { Generic, Depolarizing1Q, Depolarizing2Q, AmplitudeDamping, PhaseDamping };

/// Operator-sum representation of a CPTP map. The completeness relation
/// sum_k K_k^dag K_k = I is enforced at construction within 1e-12.
class KrausChannel {
public:
    explicit KrausChannel(std::vector<CMatrix> operators,
                          ChannelKind kind = ChannelKind::Generic, double param = 0.0);

    const std::vector<CMatrix>& operators() const { return operators_; }
    ChannelKind kind() const { return kind_; }
    double param() const { return param_; }
    int dim() const { return static_cast<int>(operators_.front().rows()); }

private:
    std::vector<CMatrix> operators_;
    ChannelKind kind_;
    double param_;
};

/// Calibration of a single qubit, in simulation units (rad/ns, ns).
struct QubitNoiseParams {
    double t1_ns = 0.0;
    double t2_ns = 0.0;
    double frequency = 0.0;       // rad/ns
    double anharmonicity = 0.0;   // rad/ns; stored, unused by the two-level model
    double oneq_duration_ns = 0.0;
    double readout_p01 = 0.0;     // P(read 0 | state 1)
    double readout_p10 = 0.0;     // P(read 1 | state 0)
    double rz_err = 0.0;
    double sx_err = 0.0;
    double x_err = 0.0;
    double p_prep = 0.0;
};

struct DeviceModel {
    std::vector<QubitNoiseParams> qubits;
    double coupling = 0.0;          // effective J, rad/ns
    double twoq_duration_ns = 0.0;
    double ecr_err = 0.0;
    double mu = 0.0;                // ZX interaction coefficient of the CR drive
    double nu = 0.0;                // direct crosstalk coefficient

    /// omega_q1 - omega_q2, rad/ns.
    double delta12() const { return qubits.at(0).frequency - qubits.at(1).frequency; }

    void validate() const;
};

struct NoisePolicy {
    bool enabled = true;
    std::optional<double> depolarizing_override_p;
    bool spam_enabled = true;

    static NoisePolicy noiseless() { return {false, std::nullopt, false}; }
    bool spam_active() const { return enabled && spam_enabled; }
};

struct DampingParams {
    double gamma = 0.0;
    double lambda = 0.0;
};

KrausChannel depolarizing_1q(double p);
KrausChannel depolarizing_2q(double p);
KrausChannel amplitude_damping(double gamma);
KrausChannel phase_damping(double lambda);

/// gamma = 1 - exp(-t/T1), lambda = 1 - exp(-t/T2).
DampingParams damping_params(double t_ns, double t1_ns, double t2_ns);

/// Mean of the measured X and sqrt(X) gate errors.
double estimate_depolarizing_p(const DeviceModel& dev, int qubit);

enum class OpKind { OneQubitPulse, OneQubitGate, TwoQubitOp, VirtualZ };

struct TargetedChannel {
    KrausChannel channel;
    std::vector<int> qubits;
};

/// Channels to apply after one physical operation, in fixed order
/// depolarizing -> amplitude damping -> phase damping. Virtual-Z operations
/// yield no channels.
std::vector<TargetedChannel> post_op_channels(OpKind kind, double duration_ns,
                                              const std::vector<int>& qubits,
                                              const DeviceModel& dev,
                                              const NoisePolicy& policy);

/// Kraus sum, with the channel embedded on `targets` of the register.
DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch,
                            const std::vector<int>& targets);

DensityMatrix apply_post_op_channels(const DensityMatrix& rho,
                                     const std::vector<TargetedChannel>& channels);

/// Initial register state; a classical flip with probability p_prep per qubit
/// when SPAM is active, else the pure ground state.
DensityMatrix prep_state(const DeviceModel& dev, int n_qubits, const NoisePolicy& policy);

/// Ideal probabilities diag(V^dag rho V) for the basis given by the columns
/// of V, pushed through the readout confusion matrix when SPAM is active.
std::array<double, 2> readout_probs(const DensityMatrix& rho1, const CMatrix& basis,
                                    const DeviceModel& dev, int qubit,
                                    const NoisePolicy& policy);

/// ibm_brisbane qubits 1 and 2, from the public datasheet.
DeviceModel brisbane_device();

DeviceModel device_from_json(const nlohmann::json& j);
nlohmann::json device_to_json(const DeviceModel& dev);
DeviceModel load_device_file(const std::string& path);

}  // namespace pulseforge
