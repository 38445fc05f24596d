#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "pulseforge/models.hpp"
#include "pulseforge/training.hpp"
#include "support.hpp"

using namespace pulseforge;
namespace pft = pulseforge::testing;

namespace {
constexpr double pi = std::numbers::pi;

const DeviceModel& dev() {
    static const DeviceModel d = brisbane_device();
    return d;
}

ModelParams zero_gate_model(int n_qubits, int layers) {
    ModelParams p;
    p.variant = ModelVariant::Gate;
    p.n_qubits = n_qubits;
    p.gate_layers.resize(layers);
    for (auto& l : p.gate_layers) {
        l.qubit.assign(n_qubits, EulerAngles{0, 0, 0});
        if (n_qubits == 2) l.entangler = EulerAngles{0, 0, 0};
    }
    return p;
}

ModelParams zero_pulsed_model(int n_qubits, int layers) {
    ModelParams p;
    p.variant = ModelVariant::Pulsed;
    p.n_qubits = n_qubits;
    p.pulse_layers.resize(layers);
    for (auto& l : p.pulse_layers) {
        l.qubit.assign(n_qubits, PulseBlockParams{0, 0, 0, 0});
        if (n_qubits == 2) l.entangler = PulseEntanglerParams{0, 0, 0};
    }
    return p;
}

/// Strips qubit-2 structure so the same layer parameters run as a 1-qubit model.
ModelParams first_qubit_only(const ModelParams& two_qubit) {
    ModelParams p = two_qubit;
    p.n_qubits = 1;
    for (auto& l : p.gate_layers) {
        l.qubit.resize(1);
        l.entangler.reset();
    }
    for (auto& l : p.pulse_layers) {
        l.qubit.resize(1);
        l.entangler.reset();
    }
    return p;
}
}  // namespace

TEST_CASE("encode closed forms") {
    CHECK(max_abs(encode({0, 0, 0}) - identity(2)) == 0.0);
    CHECK(max_abs(encode({0, pi, 0}) - Complex(0, -1) * sigma_y()) < 1e-15);
    Rng rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        const CMatrix u =
            encode({rng.uniform(-pi, pi), rng.uniform(-pi, pi), rng.uniform(-pi, pi)});
        CHECK(max_abs(u.adjoint() * u - identity(2)) < 1e-12);
    }
}

TEST_CASE("target states") {
    const PureState s0 = target_state(0, {0.0, 0.9});
    CHECK(std::abs(s0.amplitudes()(0) - Complex(1, 0)) < 1e-15);
    const PureState s1 = target_state(1, {0.0, 0.9});
    CHECK(std::abs(std::abs(s1.amplitudes()(1)) - 1.0) < 1e-15);

    const PureState diag = target_state(0, {pi / 4, 0.0});
    CHECK(diag.amplitudes()(0).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(diag.amplitudes()(1).real() == doctest::Approx(1.0 / std::sqrt(2.0)));

    Rng rng(2);
    for (int trial = 0; trial < 1000; ++trial) {
        const TargetStateParams t{rng.uniform(-pi, pi), rng.uniform(-pi, pi)};
        const Complex overlap =
            (target_state(0, t).amplitudes().adjoint() * target_state(1, t).amplitudes())(0);
        CHECK(std::abs(overlap) < 1e-14);
        CHECK(max_abs(target_basis(t).adjoint() * target_basis(t) - identity(2)) < 1e-14);
    }
}

TEST_CASE("gate_forward on the trivial model") {
    const NoisePolicy off = NoisePolicy::noiseless();
    const DensityMatrix rho = gate_forward({0, 0, 0}, zero_gate_model(1, 1), dev(), off);
    CHECK(max_abs(rho.matrix() - DensityMatrix::ground(1).matrix()) < 1e-12);

    Rng rng(3);
    const ModelParams random_model = random_init(ModelVariant::Gate, 1, 3, dev(), 42);
    const DensityMatrix pure_out = gate_forward(
        {rng.uniform(-pi, pi), rng.uniform(-pi, pi), rng.uniform(-pi, pi)}, random_model, dev(),
        off);
    CHECK(pure_out.purity() == doctest::Approx(1.0).epsilon(1e-10));

    CHECK_THROWS_AS(gate_forward({0, 0, 0}, zero_pulsed_model(1, 1), dev(), off),
                    std::invalid_argument);
}

TEST_CASE("gate model factorizes when the entangler is off") {
    const NoisePolicy off = NoisePolicy::noiseless();
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        ModelParams two = random_init(ModelVariant::Gate, 2, 3, dev(), 100 + trial);
        for (auto& l : two.gate_layers) l.entangler = EulerAngles{0, 0, 0};
        const ModelParams one = first_qubit_only(two);
        const std::array<double, 3> x{rng.uniform(-pi, pi), rng.uniform(-pi, pi),
                                      rng.uniform(-pi, pi)};
        const DensityMatrix marginal =
            partial_trace_keep_first(gate_forward(x, two, dev(), off));
        const DensityMatrix direct = gate_forward(x, one, dev(), off);
        CHECK(max_abs(marginal.matrix() - direct.matrix()) < 1e-10);
    }
}

TEST_CASE("zero-angle entangler is free of noise only in the noiseless engine") {
    const ModelParams model = zero_gate_model(2, 1);
    const DensityMatrix clean = gate_forward({0, 0, 0}, model, dev(), NoisePolicy::noiseless());
    CHECK(max_abs(clean.matrix() - DensityMatrix::ground(2).matrix()) < 1e-12);

    NoisePolicy noisy;
    noisy.spam_enabled = false;
    const DensityMatrix degraded = gate_forward({0, 0, 0}, model, dev(), noisy);
    CHECK(fidelity_pure(PureState::basis(4, 0), degraded) < 1.0 - 1e-4);
    CHECK(degraded.purity() < 1.0 - 1e-4);
}

TEST_CASE("pulse_block implements VZ(nu1) . pulse . VZ(nu2)") {
    const NoisePolicy off = NoisePolicy::noiseless();
    const double duration = dev().qubits[0].oneq_duration_ns;

    // Omega T = pi about x flips the qubit.
    PulsedRegister reg{DensityMatrix::ground(1), VirtualZFrame(1)};
    reg = pulse_block(reg, {0.0, 0.0, pi / duration, 0.0}, 0, dev(), off);
    const DensityMatrix flipped = flush_frames(reg.rho, reg.frames).state;
    CHECK(flipped.matrix()(1, 1).real() == doctest::Approx(1.0));

    // Zero amplitude leaves populations alone.
    Rng rng(5);
    const DensityMatrix rho = pft::random_density(rng, 2);
    PulsedRegister idle{rho, VirtualZFrame(1)};
    idle = pulse_block(idle, {0.7, -0.3, 0.0, 0.4}, 0, dev(), off);
    CHECK(idle.rho.matrix()(0, 0).real() == doctest::Approx(rho.matrix()(0, 0).real()));
    CHECK(idle.rho.matrix()(1, 1).real() == doctest::Approx(rho.matrix()(1, 1).real()));
}

TEST_CASE("pulse blocks reach any SU(2) constructively") {
    const NoisePolicy off = NoisePolicy::noiseless();
    const double duration = dev().qubits[0].oneq_duration_ns;
    Rng rng(6);
    for (int trial = 0; trial < 200; ++trial) {
        const CMatrix v = pft::random_unitary(rng, 2);
        const EulerAngles e = euler_from_su2(v);
        const PulseBlockParams b{e.theta1, e.theta3, e.theta2 / duration, pi / 2};

        const DensityMatrix rho = pft::random_density(rng, 2);
        PulsedRegister reg{rho, VirtualZFrame(1)};
        reg = pulse_block(reg, b, 0, dev(), off);
        const DensityMatrix realized = flush_frames(reg.rho, reg.frames).state;
        const DensityMatrix expected = apply_unitary(rho, v);
        CHECK(max_abs(realized.matrix() - expected.matrix()) < 1e-8);
    }
}

TEST_CASE("pulsed_forward on the trivial model") {
    const NoisePolicy off = NoisePolicy::noiseless();
    const DensityMatrix rho = pulsed_forward({0, 0, 0}, zero_pulsed_model(2, 2), dev(), off);
    CHECK(max_abs(rho.matrix() - DensityMatrix::ground(2).matrix()) < 1e-10);

    const ModelParams random_model = random_init(ModelVariant::Pulsed, 1, 3, dev(), 9);
    const DensityMatrix out = pulsed_forward({0.3, -1.2, 0.8}, random_model, dev(), off);
    CHECK(out.purity() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("pulsed model factorizes when the entangler amplitude vanishes") {
    const NoisePolicy off = NoisePolicy::noiseless();
    Rng rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        ModelParams two = random_init(ModelVariant::Pulsed, 2, 3, dev(), 300 + trial);
        for (auto& l : two.pulse_layers) {
            // Zero amplitude; the detuning drift is frame-corrected away even
            // when delta is nonzero.
            l.entangler = PulseEntanglerParams{0.0, rng.uniform(-pi, pi),
                                               rng.uniform(-0.002, 0.002)};
        }
        const ModelParams one = first_qubit_only(two);
        const std::array<double, 3> x{rng.uniform(-pi, pi), rng.uniform(-pi, pi),
                                      rng.uniform(-pi, pi)};
        const DensityMatrix marginal =
            partial_trace_keep_first(pulsed_forward(x, two, dev(), off));
        const DensityMatrix direct = pulsed_forward(x, one, dev(), off);
        CHECK(max_abs(marginal.matrix() - direct.matrix()) < 1e-10);
    }
}

TEST_CASE("gate layers have exact pulse-block equivalents") {
    const NoisePolicy off = NoisePolicy::noiseless();
    const double duration = dev().qubits[0].oneq_duration_ns;
    Rng rng(8);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const EulerAngles gate{rng.uniform(-pi, pi), rng.uniform(0.0, pi),
                               rng.uniform(-pi, pi)};
        const PulseBlockParams block{gate.theta1, gate.theta3, gate.theta2 / duration, pi / 2};

        const DensityMatrix rho = pft::random_density(rng, 2);
        PulsedRegister reg{rho, VirtualZFrame(1)};
        reg = pulse_block(reg, block, 0, dev(), off);
        const DensityMatrix pulsed = flush_frames(reg.rho, reg.frames).state;
        const DensityMatrix gated = apply_unitary(rho, su2_from_euler(gate));
        worst = std::max(worst, max_abs(pulsed.matrix() - gated.matrix()));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("sample_loss examples") {
    const NoisePolicy off = NoisePolicy::noiseless();
    const TargetStateParams t{0.6, -1.1};
    const DensityMatrix s0 = DensityMatrix::pure(target_state(0, t));
    const DensityMatrix s1 = DensityMatrix::pure(target_state(1, t));
    CHECK(sample_loss(s0, 0, t, dev(), off) == doctest::Approx(0.0));
    CHECK(sample_loss(s1, 0, t, dev(), off) == doctest::Approx(1.0));
    CHECK(sample_loss(DensityMatrix::maximally_mixed(2), 0, t, dev(), off) ==
          doctest::Approx(0.25));
}

TEST_CASE("sample_loss routes through the confusion matrix when SPAM is on") {
    NoisePolicy spam;
    const TargetStateParams t{0.0, 0.0};
    const double loss = sample_loss(DensityMatrix::ground(1), 0, t, dev(), spam);
    const double p10 = dev().qubits[0].readout_p10;
    CHECK(loss == doctest::Approx(p10 * p10));
}

TEST_CASE("dataset_loss aggregates sample losses") {
    const NoisePolicy off = NoisePolicy::noiseless();
    const ModelParams model = zero_gate_model(1, 1);  // rho = |0><0|, targets theta = 0

    Dataset one;
    one.features = {{0, 0, 0}};
    one.labels = {0};
    CHECK(dataset_loss(one, model, dev(), off) == doctest::Approx(0.0));

    Dataset two;
    two.features = {{0, 0, 0}, {0, 0, 0}};
    two.labels = {0, 1};
    CHECK(dataset_loss(two, model, dev(), off) == doctest::Approx(0.5));

    Dataset empty;
    CHECK_THROWS_AS(dataset_loss(empty, model, dev(), off), std::invalid_argument);
}

TEST_CASE("loss stays within [0, 1]") {
    const NoisePolicy off = NoisePolicy::noiseless();
    Rng rng(9);
    Dataset ds;
    for (int i = 0; i < 8; ++i) {
        ds.features.push_back(
            {rng.uniform(-pi, pi), rng.uniform(-pi, pi), rng.uniform(-pi, pi)});
        ds.labels.push_back(static_cast<int>(rng.uniform_int(2)));
    }
    for (int trial = 0; trial < 10; ++trial) {
        const ModelParams model = random_init(trial % 2 == 0 ? ModelVariant::Gate
                                                             : ModelVariant::Pulsed,
                                              1 + trial % 2, 2, dev(), trial);
        const double loss = dataset_loss(ds, model, dev(), off);
        CHECK(loss >= 0.0);
        CHECK(loss <= 1.0);
    }
}

TEST_CASE("predict picks the likelier target") {
    const NoisePolicy off = NoisePolicy::noiseless();
    const TargetStateParams t{0.4, 0.7};
    CHECK(predict(DensityMatrix::pure(target_state(0, t)), t, dev(), off) == 0);
    CHECK(predict(DensityMatrix::pure(target_state(1, t)), t, dev(), off) == 1);
    CHECK(predict(DensityMatrix::maximally_mixed(2), t, dev(), off) == 0);  // tie -> 0
}

TEST_CASE("extra depolarizing noise never helps the better target") {
    Rng rng(10);
    for (int trial = 0; trial < 40; ++trial) {
        const DensityMatrix rho = pft::random_density(rng, 2);
        const TargetStateParams t{rng.uniform(-pi, pi), rng.uniform(-pi, pi)};
        double previous_best = 2.0;
        double previous_f0 = 2.0;
        for (double p : {0.0, 0.05, 0.2, 0.5, 1.0}) {
            const DensityMatrix noisy = apply_channel(rho, depolarizing_1q(p), {0});
            const double f0 = fidelity_pure(target_state(0, t), noisy);
            const double f1 = fidelity_pure(target_state(1, t), noisy);
            const double best = std::max(f0, f1);
            CHECK(best <= previous_best + 1e-12);
            // A single fixed target is only monotone from the winning side.
            if (previous_f0 >= 0.5 && previous_f0 <= 1.0) {
                CHECK(f0 <= previous_f0 + 1e-12);
            }
            previous_best = best;
            previous_f0 = f0;
        }
    }
}

TEST_CASE("forward passes are deterministic") {
    NoisePolicy noisy;
    const ModelParams model = random_init(ModelVariant::Pulsed, 2, 2, dev(), 77);
    Dataset ds;
    ds.features = {{0.3, -0.9, 1.4}, {2.0, 0.1, -0.5}};
    ds.labels = {0, 1};
    const double a = dataset_loss(ds, model, dev(), noisy);
    const double b = dataset_loss(ds, model, dev(), noisy);
    CHECK(a == b);
}
