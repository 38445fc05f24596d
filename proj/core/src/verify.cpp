#include "pulseforge/verify.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "pulseforge/experiments.hpp"
#include "pulseforge/gates.hpp"
#include "pulseforge/models.hpp"
#include "pulseforge/noise.hpp"
#include "pulseforge/pulses.hpp"
#include "pulseforge/qcore.hpp"
#include "pulseforge/rng.hpp"
#include "pulseforge/training.hpp"

namespace pulseforge {

namespace {

constexpr double pi = std::numbers::pi;

CMatrix random_hermitian(Rng& rng, int dim) {
    CMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) m(i, j) = Complex(rng.gaussian(), rng.gaussian());
    }
    return 0.5 * (m + m.adjoint().eval());
}

CMatrix random_unitary(Rng& rng, int dim) {
    return expm_hermitian(random_hermitian(rng, dim), 1.0);
}

DensityMatrix random_density(Rng& rng, int dim) {
    CMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) m(i, j) = Complex(rng.gaussian(), rng.gaussian());
    }
    CMatrix rho = m * m.adjoint();
    rho /= rho.trace();
    return DensityMatrix(0.5 * (rho + rho.adjoint().eval()));
}

std::string describe(double worst, double tolerance) {
    std::ostringstream os;
    os << "worst " << worst << " (tolerance " << tolerance << ")";
    return os.str();
}

CheckResult check_channels() {
    Rng rng(11);
    double worst = 0.0;
    for (double p : {0.0, 1e-4, 0.01, 0.3, 1.0}) {
        for (const KrausChannel& ch :
             {depolarizing_1q(p), depolarizing_2q(p), amplitude_damping(p), phase_damping(p)}) {
            CMatrix sum = CMatrix::Zero(ch.dim(), ch.dim());
            for (const CMatrix& k : ch.operators()) sum += k.adjoint() * k;
            worst = std::max(worst, max_abs(sum - identity(ch.dim())));
            for (int trial = 0; trial < 40; ++trial) {
                const int dim = ch.dim();
                const DensityMatrix rho = random_density(rng, dim);
                const std::vector<int> targets = dim == 2 ? std::vector<int>{0}
                                                          : std::vector<int>{0, 1};
                const DensityMatrix out = apply_channel(rho, ch, targets);
                worst = std::max(worst, std::abs(out.matrix().trace().real() - 1.0));
                worst = std::max(worst, std::max(0.0, -out.min_eigenvalue() - 1e-9));
            }
        }
    }
    return {"channel-soundness", worst < 1e-11, describe(worst, 1e-11)};
}

CheckResult check_unitarity() {
    Rng rng(13);
    const DeviceModel dev = brisbane_device();
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        VirtualZFrame frames(2);
        frames = vz(frames, 0, rng.uniform(-pi, pi));
        frames = vz(frames, 1, rng.uniform(-pi, pi));
        const SingleQubitPulse p(rng.uniform(0.0, 0.1), rng.uniform(-pi, pi),
                                 rng.uniform(-0.05, 0.05), rng.uniform(10.0, 500.0),
                                 PulseEnvelope::constant(), 0);
        const CMatrix u = single_qubit_propagator(p, frames);
        worst = std::max(worst, max_abs(u.adjoint() * u - identity(2)));
        const CrossResonancePulse cr(rng.uniform(0.0, 0.1), rng.uniform(-pi, pi),
                                     rng.uniform(-0.02, 0.02), rng.uniform(10.0, 800.0),
                                     PulseEnvelope::constant(), 0, 1);
        const CMatrix ucr = cr_propagator(cr, dev, frames);
        worst = std::max(worst, max_abs(ucr.adjoint() * ucr - identity(4)));
    }
    return {"propagator-unitarity", worst < 1e-10, describe(worst, 1e-10)};
}

CheckResult check_vz_equivalence() {
    Rng rng(17);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        DensityMatrix rho_frames = DensityMatrix::ground(1);
        DensityMatrix rho_explicit = rho_frames;
        VirtualZFrame frames(1);
        const int ops = 2 + static_cast<int>(rng.uniform_int(8));
        for (int k = 0; k < ops; ++k) {
            if (rng.uniform01() < 0.45) {
                const double angle = rng.uniform(-2.0 * pi, 2.0 * pi);
                frames = vz(frames, 0, angle);
                rho_explicit = apply_unitary(rho_explicit, rz(angle));
            } else {
                const SingleQubitPulse p(rng.uniform(0.0, 0.2), rng.uniform(-pi, pi),
                                         rng.uniform(-0.05, 0.05), rng.uniform(10.0, 400.0),
                                         PulseEnvelope::constant(), 0);
                rho_frames =
                    apply_unitary(rho_frames, single_qubit_propagator(p, frames));
                rho_explicit =
                    apply_unitary(rho_explicit, single_qubit_propagator(p, VirtualZFrame(1)));
            }
        }
        const FlushedState flushed = flush_frames(rho_frames, frames);
        worst = std::max(worst, max_abs(flushed.state.matrix() - rho_explicit.matrix()));
    }
    return {"vz-equivalence", worst < 1e-9, describe(worst, 1e-9)};
}

CheckResult check_euler_roundtrip() {
    Rng rng(19);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const CMatrix u = random_unitary(rng, 2);
        const EulerAngles a = euler_from_su2(u);
        worst = std::max(worst, phase_aligned_distance(u, su2_from_euler(a)));
    }
    return {"euler-roundtrip", worst < 1e-9, describe(worst, 1e-9)};
}

CheckResult check_u3_sequence() {
    Rng rng(23);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const double theta = rng.uniform(-pi, pi);
        const double phi = rng.uniform(-pi, pi);
        const double lam = rng.uniform(-pi, pi);
        CMatrix product = identity(2);
        for (const NativeOp& op : u3_sx_vz_sequence(theta, phi, lam, 300.0)) {
            product = native_op_unitary(op, 1) * product;
        }
        const CMatrix target = su2_from_euler({phi, theta, lam});
        worst = std::max(worst, phase_aligned_distance(product, target));
    }
    return {"u3-sequence", worst < 1e-9, describe(worst, 1e-9)};
}

CheckResult check_controlled_decomposition() {
    Rng rng(29);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const EulerAngles a{rng.uniform(-pi, pi), rng.uniform(-pi, pi), rng.uniform(-pi, pi)};
        CMatrix product = identity(4);
        for (const NativeOp& op : decompose_controlled_su2(a, 300.0, 660.0)) {
            product = native_op_unitary(op, 2) * product;
        }
        worst = std::max(worst, phase_aligned_distance(product, controlled_su2(a)));
    }
    return {"controlled-su2-decomposition", worst < 1e-9, describe(worst, 1e-9)};
}

CheckResult check_cnot_from_cr() {
    DeviceModel ideal = brisbane_device();
    ideal.qubits[1].frequency = ideal.qubits[0].frequency;
    ideal.mu = 1.0;
    ideal.nu = 0.0;
    const CMatrix u_ideal = simulate_schedule(cnot_from_cr_blocks(ideal), ideal, 2);
    const double dist = phase_aligned_distance(u_ideal, cnot_matrix(0, 1));

    const DeviceModel brisbane = brisbane_device();
    const CMatrix u_b = simulate_schedule(cnot_from_cr_blocks(brisbane), brisbane, 2);
    const double fidelity = std::abs((cnot_matrix(0, 1).adjoint() * u_b).trace()) / 4.0;

    std::ostringstream os;
    os << "ideal distance " << dist << " (tolerance 1e-8), brisbane fidelity " << fidelity
       << " (threshold 0.999)";
    return {"cnot-from-cr", dist < 1e-8 && fidelity > 0.999, os.str()};
}

CheckResult check_warm_start() {
    const DeviceModel dev = brisbane_device();
    const NoisePolicy policy = NoisePolicy::noiseless();
    const Dataset ds = synth_circle(24, 5);
    const auto [train_set, test_set] = split(ds, 16, 8, 3);
    TrainConfig tc;
    tc.epochs = 5;
    double worst = 0.0;
    for (ModelVariant variant : {ModelVariant::Gate, ModelVariant::Pulsed}) {
        for (std::uint64_t seed : {1ULL, 2ULL}) {
            tc.seed = seed;
            const TrainReport r1 =
                train(variant, 1, 2, train_set, test_set, dev, policy, tc, std::nullopt);
            const ModelParams warm = warm_start_two_qubit(r1.final_params, seed, dev);
            const double loss2 = dataset_loss(train_set, warm, dev, policy);
            worst = std::max(worst, std::abs(loss2 - r1.final_loss));
        }
    }
    return {"warm-start-continuity", worst < 1e-9, describe(worst, 1e-9)};
}

CheckResult check_device_ingestion() {
    const DeviceModel dev = brisbane_device();
    const DampingParams d = damping_params(300.0, 180.0e3, 180.0e3);
    const bool pass = dev.ecr_err == 0.00431 && dev.qubits[0].readout_p10 == 0.0459 &&
                      dev.twoq_duration_ns == 660.0 &&
                      std::abs(dev.coupling - 2.0 * pi * 0.013) < 1e-15 &&
                      std::abs(d.gamma - 1.66528e-3) < 1e-7;
    std::ostringstream os;
    os << "gamma(300ns, 180us) = " << d.gamma;
    return {"brisbane-ingestion", pass, os.str()};
}

}  // namespace

std::vector<CheckResult> run_verification_suite() {
    std::vector<CheckResult> results;
    results.push_back(check_channels());
    results.push_back(check_unitarity());
    results.push_back(check_vz_equivalence());
    results.push_back(check_euler_roundtrip());
    results.push_back(check_u3_sequence());
    results.push_back(check_controlled_decomposition());
    results.push_back(check_cnot_from_cr());
    results.push_back(check_warm_start());
    results.push_back(check_device_ingestion());
    return results;
}

}  // namespace pulseforge
