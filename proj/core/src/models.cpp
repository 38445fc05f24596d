#include "pulseforge/models.hpp"

#include <cmath>
#include <stdexcept>

namespace pulseforge {

namespace {

void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

/// Channel lists reused for every operation of a forward pass (and across a
/// whole loss evaluation); building the Kraus families is far more expensive
/// than applying them.
struct ForwardContext {
    const DeviceModel& dev;
    const NoisePolicy& policy;
    std::vector<std::vector<TargetedChannel>> oneq;  // per qubit, nominal 1Q duration
    std::vector<TargetedChannel> twoq;

    ForwardContext(const DeviceModel& d, const NoisePolicy& p, int n_qubits) : dev(d), policy(p) {
        for (int q = 0; q < n_qubits; ++q) {
            oneq.push_back(post_op_channels(OpKind::OneQubitGate,
                                            d.qubits.at(q).oneq_duration_ns, {q}, d, p));
        }
        if (n_qubits == 2) {
            twoq = post_op_channels(OpKind::TwoQubitOp, d.twoq_duration_ns, {0, 1}, d, p);
        }
    }
};

/// Abstract single-qubit gate: the exact ZYZ unitary, charged the noise of
/// its native realization (two physical SX pulses; the RZ parts are virtual
/// and free).
DensityMatrix apply_1q_gate(const DensityMatrix& rho, const EulerAngles& a, int qubit,
                            const ForwardContext& ctx) {
    DensityMatrix out =
        apply_unitary(rho, embed_one_qubit(su2_from_euler(a), qubit, rho.n_qubits()));
    if (!ctx.policy.enabled) return out;
    for (int sx = 0; sx < 2; ++sx) out = apply_post_op_channels(out, ctx.oneq[qubit]);
    return out;
}

DensityMatrix apply_encoding(const DensityMatrix& rho, const std::array<double, 3>& x,
                             const ForwardContext& ctx) {
    DensityMatrix out = rho;
    const EulerAngles enc{x[0], x[1], x[2]};
    for (int q = 0; q < rho.n_qubits(); ++q) out = apply_1q_gate(out, enc, q, ctx);
    return out;
}

/// Controlled-SU(2) with qubit 2 controlling qubit 1, executed through its
/// native decomposition so every physical op is charged its channels. With
/// zero angles the circuit is a noiseless no-op but still pays for two
/// CNOTs and two Y pulses.
DensityMatrix apply_controlled_gate(const DensityMatrix& rho, const EulerAngles& a,
                                    const ForwardContext& ctx) {
    const double oneq = ctx.dev.qubits.at(0).oneq_duration_ns;
    const auto ops = decompose_controlled_su2(a, oneq, ctx.dev.twoq_duration_ns, 0, 1);
    DensityMatrix out = rho;
    for (const NativeOp& op : ops) {
        out = apply_unitary(out, native_op_unitary(op, 2));
        if (op.kind == NativeKind::RzVirtual || !ctx.policy.enabled) continue;
        out = apply_post_op_channels(
            out, op.kind == NativeKind::Cnot ? ctx.twoq : ctx.oneq[op.qubits.front()]);
    }
    return out;
}

DensityMatrix gate_forward_impl(const std::array<double, 3>& x, const ModelParams& params,
                                const ForwardContext& ctx) {
    DensityMatrix rho = prep_state(ctx.dev, params.n_qubits, ctx.policy);
    for (const GateLayerParams& layer : params.gate_layers) {
        rho = apply_encoding(rho, x, ctx);
        for (int q = 0; q < params.n_qubits; ++q) {
            rho = apply_1q_gate(rho, layer.qubit[q], q, ctx);
        }
        if (params.n_qubits == 2) {
            rho = apply_controlled_gate(rho, *layer.entangler, ctx);
        }
    }
    return rho;
}

PulsedRegister pulse_block_impl(PulsedRegister reg, const PulseBlockParams& b, int qubit,
                                const ForwardContext& ctx) {
    reg.frames = vz(reg.frames, qubit, b.nu2);
    const double duration = ctx.dev.qubits.at(qubit).oneq_duration_ns;
    const SingleQubitPulse pulse(b.omega, b.gamma, 0.0, duration, PulseEnvelope::constant(),
                                 qubit);
    reg.rho = apply_unitary(
        reg.rho, embed_one_qubit(single_qubit_propagator(pulse, reg.frames), qubit,
                                 reg.rho.n_qubits()));
    if (ctx.policy.enabled) reg.rho = apply_post_op_channels(reg.rho, ctx.oneq[qubit]);
    reg.frames = vz(reg.frames, qubit, b.nu1);
    return reg;
}

DensityMatrix pulsed_forward_impl(const std::array<double, 3>& x, const ModelParams& params,
                                  const ForwardContext& ctx) {
    PulsedRegister reg{prep_state(ctx.dev, params.n_qubits, ctx.policy),
                       VirtualZFrame(params.n_qubits)};
    for (const PulseLayerParams& layer : params.pulse_layers) {
        reg.rho = apply_encoding(reg.rho, x, ctx);
        for (int q = 0; q < params.n_qubits; ++q) {
            reg = pulse_block_impl(reg, layer.qubit[q], q, ctx);
        }
        if (params.n_qubits == 2) {
            const PulseEntanglerParams& ent = *layer.entangler;
            const double duration = ctx.dev.twoq_duration_ns;
            const CrossResonancePulse cr(ent.omega, ent.gamma, ent.delta, duration,
                                         PulseEnvelope::constant(), 0, 1);
            // Drive-frame return correction: cancels the drift rotations of
            // the detuned frame so a zero-amplitude entangler is an exact
            // no-op and the warm-started model starts at the 1-qubit loss.
            const CMatrix correction =
                kron(rz((ctx.dev.delta12() + ent.delta) * duration), rz(ent.delta * duration));
            reg.rho =
                apply_unitary(reg.rho, correction * cr_propagator(cr, ctx.dev, reg.frames));
            if (ctx.policy.enabled) reg.rho = apply_post_op_channels(reg.rho, ctx.twoq);
        }
    }
    return flush_frames(reg.rho, reg.frames).state;
}

DensityMatrix forward_impl(const std::array<double, 3>& x, const ModelParams& params,
                           const ForwardContext& ctx) {
    return params.variant == ModelVariant::Gate ? gate_forward_impl(x, params, ctx)
                                                : pulsed_forward_impl(x, params, ctx);
}

}  // namespace

void ModelParams::validate() const {
    require(n_qubits == 1 || n_qubits == 2, "ModelParams: 1 or 2 qubits");
    require(layer_count() >= 1, "ModelParams: at least one layer");
    if (variant == ModelVariant::Gate) {
        require(pulse_layers.empty(), "ModelParams: gate variant with pulse layers");
        for (const auto& l : gate_layers) {
            require(static_cast<int>(l.qubit.size()) == n_qubits,
                    "ModelParams: per-qubit angle count mismatch");
            require(l.entangler.has_value() == (n_qubits == 2),
                    "ModelParams: entangler presence must match qubit count");
        }
    } else {
        require(gate_layers.empty(), "ModelParams: pulsed variant with gate layers");
        for (const auto& l : pulse_layers) {
            require(static_cast<int>(l.qubit.size()) == n_qubits,
                    "ModelParams: per-qubit block count mismatch");
            require(l.entangler.has_value() == (n_qubits == 2),
                    "ModelParams: entangler presence must match qubit count");
        }
    }
}

CMatrix encode(const std::array<double, 3>& x) {
    return su2_from_euler({x[0], x[1], x[2]});
}

PureState target_state(int label, const TargetStateParams& t) {
    require(label == 0 || label == 1, "target_state: label must be 0 or 1");
    CVector v(2);
    const Complex phase = std::exp(Complex(0, t.phi));
    if (label == 0) {
        v << std::cos(t.theta), phase * std::sin(t.theta);
    } else {
        v << -std::sin(t.theta), phase * std::cos(t.theta);
    }
    return PureState(std::move(v));
}

CMatrix target_basis(const TargetStateParams& t) {
    CMatrix v(2, 2);
    v.col(0) = target_state(0, t).amplitudes();
    v.col(1) = target_state(1, t).amplitudes();
    return v;
}

DensityMatrix gate_forward(const std::array<double, 3>& x, const ModelParams& params,
                           const DeviceModel& dev, const NoisePolicy& policy) {
    require(params.variant == ModelVariant::Gate, "gate_forward: wrong variant");
    params.validate();
    return gate_forward_impl(x, params, ForwardContext(dev, policy, params.n_qubits));
}

PulsedRegister pulse_block(PulsedRegister reg, const PulseBlockParams& b, int qubit,
                           const DeviceModel& dev, const NoisePolicy& policy) {
    const ForwardContext ctx(dev, policy, reg.rho.n_qubits());
    return pulse_block_impl(std::move(reg), b, qubit, ctx);
}

DensityMatrix pulsed_forward(const std::array<double, 3>& x, const ModelParams& params,
                             const DeviceModel& dev, const NoisePolicy& policy) {
    require(params.variant == ModelVariant::Pulsed, "pulsed_forward: wrong variant");
    params.validate();
    return pulsed_forward_impl(x, params, ForwardContext(dev, policy, params.n_qubits));
}

DensityMatrix forward(const std::array<double, 3>& x, const ModelParams& params,
                      const DeviceModel& dev, const NoisePolicy& policy) {
    return params.variant == ModelVariant::Gate ? gate_forward(x, params, dev, policy)
                                                : pulsed_forward(x, params, dev, policy);
}

namespace {

std::array<double, 2> label_probs(const DensityMatrix& rho_final,
                                  const TargetStateParams& targets, const DeviceModel& dev,
                                  const NoisePolicy& policy) {
    const DensityMatrix rho1 =
        rho_final.dim() == 4 ? partial_trace_keep_first(rho_final) : rho_final;
    if (policy.spam_active()) {
        return readout_probs(rho1, target_basis(targets), dev, 0, policy);
    }
    return {fidelity_pure(target_state(0, targets), rho1),
            fidelity_pure(target_state(1, targets), rho1)};
}

}  // namespace

double sample_loss(const DensityMatrix& rho_final, int label, const TargetStateParams& targets,
                   const DeviceModel& dev, const NoisePolicy& policy) {
    require(label == 0 || label == 1, "sample_loss: label must be 0 or 1");
    const double f = label_probs(rho_final, targets, dev, policy)[label];
    return (1.0 - f) * (1.0 - f);
}

double dataset_loss(const Dataset& ds, const ModelParams& params, const DeviceModel& dev,
                    const NoisePolicy& policy) {
    require(ds.size() > 0, "dataset_loss: empty dataset");
    params.validate();
    const ForwardContext ctx(dev, policy, params.n_qubits);
    double sum = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        sum += sample_loss(forward_impl(ds.features[i], params, ctx), ds.labels[i],
                           params.targets, dev, policy);
    }
    return sum / static_cast<double>(ds.size());
}

int predict(const DensityMatrix& rho_final, const TargetStateParams& targets,
            const DeviceModel& dev, const NoisePolicy& policy) {
    const auto p = label_probs(rho_final, targets, dev, policy);
    return p[1] > p[0] ? 1 : 0;
}

double accuracy(const Dataset& ds, const ModelParams& params, const DeviceModel& dev,
                const NoisePolicy& policy) {
    require(ds.size() > 0, "accuracy: empty dataset");
    params.validate();
    const ForwardContext ctx(dev, policy, params.n_qubits);
    int correct = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        if (predict(forward_impl(ds.features[i], params, ctx), params.targets, dev, policy) ==
            ds.labels[i]) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(ds.size());
}

}  // namespace pulseforge
