#include "pulseforge/noise.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pulseforge {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

void check_probability(double p, const char* name) {
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0,
            std::string(name) + " must lie in [0, 1]");
}

/// Partial trace over one qubit of a two-qubit state, then re-embedded as
/// I/2 on the traced qubit. Used by the closed-form depolarizing path.
CMatrix mix_out_qubit(const CMatrix& rho, int qubit) {
    CMatrix reduced(2, 2);
    if (qubit == 0) {
        // Keep qubit 2: trace over the first factor.
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                reduced(i, j) = rho(i, j) + rho(2 + i, 2 + j);
        return kron(identity(2) / 2.0, reduced);
    }
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            reduced(i, j) = rho(2 * i, 2 * j) + rho(2 * i + 1, 2 * j + 1);
    return kron(reduced, identity(2) / 2.0);
}

CMatrix kraus_sum(const CMatrix& rho, const std::vector<CMatrix>& ops) {
    CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
    for (const CMatrix& k : ops) out += k * rho * k.adjoint();
    return out;
}

}  // namespace

KrausChannel::KrausChannel(std::vector<CMatrix> operators, ChannelKind kind, double param)
    : operators_(std::move(operators)), kind_(kind), param_(param) {
    require(!operators_.empty(), "KrausChannel: empty operator list");
    const auto d = operators_.front().rows();
    CMatrix sum = CMatrix::Zero(d, d);
    for (const CMatrix& k : operators_) {
        require(k.rows() == d && k.cols() == d, "KrausChannel: mixed operator dimensions");
        sum += k.adjoint() * k;
    }
    require(max_abs(sum - CMatrix::Identity(d, d)) <= 1e-12,
            "KrausChannel: completeness relation violated beyond 1e-12");
}

void DeviceModel::validate() const {
    require(!qubits.empty(), "DeviceModel: needs at least one qubit");
    require(twoq_duration_ns > 0.0, "DeviceModel: twoq_duration must be positive");
    check_probability(ecr_err, "ecr_err");
    for (const QubitNoiseParams& q : qubits) {
        require(q.t1_ns > 0.0 && q.t2_ns > 0.0, "DeviceModel: T1 and T2 must be positive");
        require(q.oneq_duration_ns > 0.0, "DeviceModel: 1Q duration must be positive");
        check_probability(q.readout_p01, "P(0|1)");
        check_probability(q.readout_p10, "P(1|0)");
        check_probability(q.rz_err, "rz_err");
        check_probability(q.sx_err, "sx_err");
        check_probability(q.x_err, "x_err");
        check_probability(q.p_prep, "p_prep");
    }
}

KrausChannel depolarizing_1q(double p) {
    check_probability(p, "depolarizing p");
    std::vector<CMatrix> ops;
    ops.push_back(std::sqrt(1.0 - p) * identity(2));
    ops.push_back(std::sqrt(p / 3.0) * sigma_x());
    ops.push_back(std::sqrt(p / 3.0) * sigma_y());
    ops.push_back(std::sqrt(p / 3.0) * sigma_z());
    return KrausChannel(std::move(ops), ChannelKind::Depolarizing1Q, p);
}

KrausChannel depolarizing_2q(double p) {
    check_probability(p, "depolarizing p");
    const CMatrix paulis[4] = {identity(2), sigma_x(), sigma_y(), sigma_z()};
    std::vector<CMatrix> ops;
    ops.push_back(std::sqrt(1.0 - p) * identity(4));
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            if (i == 0 && j == 0) continue;
            ops.push_back(std::sqrt(p / 15.0) * kron(paulis[i], paulis[j]));
        }
    }
    return KrausChannel(std::move(ops), ChannelKind::Depolarizing2Q, p);
}

KrausChannel amplitude_damping(double gamma) {
    check_probability(gamma, "amplitude damping gamma");
    CMatrix k0(2, 2), k1(2, 2);
    k0 << 1, 0, 0, std::sqrt(1.0 - gamma);
    k1 << 0, std::sqrt(gamma), 0, 0;
    return KrausChannel({k0, k1}, ChannelKind::AmplitudeDamping, gamma);
}

KrausChannel phase_damping(double lambda) {
    check_probability(lambda, "phase damping lambda");
    CMatrix k0(2, 2), k1(2, 2);
    k0 << 1, 0, 0, std::sqrt(1.0 - lambda);
    k1 << 0, 0, 0, std::sqrt(lambda);
    return KrausChannel({k0, k1}, ChannelKind::PhaseDamping, lambda);
}

DampingParams damping_params(double t_ns, double t1_ns, double t2_ns) {
    require(t_ns >= 0.0, "damping_params: duration must be non-negative");
    require(t1_ns > 0.0 && t2_ns > 0.0, "damping_params: T1 and T2 must be positive");
    return {-std::expm1(-t_ns / t1_ns), -std::expm1(-t_ns / t2_ns)};
}

double estimate_depolarizing_p(const DeviceModel& dev, int qubit) {
    const QubitNoiseParams& q = dev.qubits.at(qubit);
    return 0.5 * (q.x_err + q.sx_err);
}

std::vector<TargetedChannel> post_op_channels(OpKind kind, double duration_ns,
                                              const std::vector<int>& qubits,
                                              const DeviceModel& dev,
                                              const NoisePolicy& policy) {
    std::vector<TargetedChannel> out;
    if (!policy.enabled || kind == OpKind::VirtualZ) return out;

    if (kind == OpKind::TwoQubitOp) {
        require(qubits.size() == 2, "post_op_channels: two-qubit op needs two targets");
        const double p = policy.depolarizing_override_p.value_or(dev.ecr_err);
        out.push_back({depolarizing_2q(p), qubits});
        for (int q : qubits) {
            const auto& params = dev.qubits.at(q);
            const DampingParams d = damping_params(duration_ns, params.t1_ns, params.t2_ns);
            out.push_back({amplitude_damping(d.gamma), {q}});
            out.push_back({phase_damping(d.lambda), {q}});
        }
        return out;
    }

    require(qubits.size() == 1, "post_op_channels: single-qubit op needs one target");
    const int q = qubits.front();
    const double p = policy.depolarizing_override_p.value_or(estimate_depolarizing_p(dev, q));
    const auto& params = dev.qubits.at(q);
    const DampingParams d = damping_params(duration_ns, params.t1_ns, params.t2_ns);
    out.push_back({depolarizing_1q(p), {q}});
    out.push_back({amplitude_damping(d.gamma), {q}});
    out.push_back({phase_damping(d.lambda), {q}});
    return out;
}

DensityMatrix apply_channel(const DensityMatrix& rho, const KrausChannel& ch,
                            const std::vector<int>& targets) {
    const int n = rho.n_qubits();
    const CMatrix& m = rho.matrix();

    if (ch.dim() == 4) {
        require(rho.dim() == 4 && targets.size() == 2,
                "apply_channel: two-qubit channel needs a two-qubit register");
        if (ch.kind() == ChannelKind::Depolarizing2Q) {
            const double p = ch.param();
            CMatrix out = (1.0 - 16.0 * p / 15.0) * m;
            out += (4.0 * p / 15.0) * m.trace() * identity(4);
            return DensityMatrix(std::move(out));
        }
        return DensityMatrix(kraus_sum(m, ch.operators()));
    }

    require(targets.size() == 1 && targets.front() >= 0 && targets.front() < n,
            "apply_channel: bad target for single-qubit channel");
    const int q = targets.front();

    if (ch.kind() == ChannelKind::Depolarizing1Q) {
        const double p = ch.param();
        CMatrix out = (1.0 - 4.0 * p / 3.0) * m;
        if (n == 1) {
            out += (2.0 * p / 3.0) * m.trace() * identity(2);
        } else {
            out += (4.0 * p / 3.0) * mix_out_qubit(m, q);
        }
        return DensityMatrix(std::move(out));
    }

    if (ch.kind() == ChannelKind::AmplitudeDamping || ch.kind() == ChannelKind::PhaseDamping) {
        // Entry-wise forms: coherences against the damped qubit shrink by
        // sqrt(1-x); amplitude damping additionally moves gamma * (excited
        // population) to the ground row.
        const double x = ch.param();
        const double root = std::sqrt(1.0 - x);
        CMatrix out = m;
        const int dim = static_cast<int>(m.rows());
        const int bit = n == 1 ? 0 : 1 - q;  // qubit 0 is the high-order index bit
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                const int qi = (i >> bit) & 1;
                const int qj = (j >> bit) & 1;
                if (ch.kind() == ChannelKind::AmplitudeDamping) {
                    if (qi == 1 && qj == 1) {
                        out(i & ~(1 << bit), j & ~(1 << bit)) += x * m(i, j);
                        out(i, j) = (1.0 - x) * m(i, j);
                    } else if (qi != qj) {
                        out(i, j) = root * m(i, j);
                    }
                } else if (qi != qj) {
                    out(i, j) = root * m(i, j);
                }
            }
        }
        return DensityMatrix(std::move(out));
    }

    if (n == 1) return DensityMatrix(kraus_sum(m, ch.operators()));
    std::vector<CMatrix> embedded;
    embedded.reserve(ch.operators().size());
    for (const CMatrix& k : ch.operators()) embedded.push_back(embed_one_qubit(k, q, n));
    return DensityMatrix(kraus_sum(m, embedded));
}

DensityMatrix apply_post_op_channels(const DensityMatrix& rho,
                                     const std::vector<TargetedChannel>& channels) {
    DensityMatrix out = rho;
    for (const TargetedChannel& tc : channels) out = apply_channel(out, tc.channel, tc.qubits);
    return out;
}

DensityMatrix prep_state(const DeviceModel& dev, int n_qubits, const NoisePolicy& policy) {
    require(n_qubits == 1 || n_qubits == 2, "prep_state: 1 or 2 qubits");
    if (!policy.spam_active()) return DensityMatrix::ground(n_qubits);
    CMatrix state;
    for (int q = 0; q < n_qubits; ++q) {
        const double p = dev.qubits.at(q).p_prep;
        CMatrix single(2, 2);
        single << 1.0 - p, 0, 0, p;
        state = q == 0 ? single : kron(state, single);
    }
    return DensityMatrix(std::move(state));
}

std::array<double, 2> readout_probs(const DensityMatrix& rho1, const CMatrix& basis,
                                    const DeviceModel& dev, int qubit,
                                    const NoisePolicy& policy) {
    require(rho1.dim() == 2, "readout_probs: expects a single-qubit state");
    require(is_unitary(basis, 1e-8), "readout_probs: basis must be unitary");
    const CMatrix projected = basis.adjoint() * rho1.matrix() * basis;
    std::array<double, 2> p = {projected(0, 0).real(), projected(1, 1).real()};
    if (policy.spam_active()) {
        const auto& q = dev.qubits.at(qubit);
        const double p01 = q.readout_p01;
        const double p10 = q.readout_p10;
        p = {(1.0 - p10) * p[0] + p01 * p[1], p10 * p[0] + (1.0 - p01) * p[1]};
    }
    return p;
}

DeviceModel brisbane_device() {
    DeviceModel dev;
    QubitNoiseParams q1;
    q1.t1_ns = 180.0e3;
    q1.t2_ns = 180.0e3;
    q1.frequency = two_pi * 4.8;
    q1.anharmonicity = two_pi * -0.31;
    q1.oneq_duration_ns = 300.0;
    q1.readout_p01 = 0.0215;
    q1.readout_p10 = 0.0459;
    q1.rz_err = 0.0;
    q1.sx_err = 0.000187;
    q1.x_err = 0.000187;

    QubitNoiseParams q2;
    q2.t1_ns = 310.0e3;
    q2.t2_ns = 250.0e3;
    q2.frequency = two_pi * 4.6;
    q2.anharmonicity = two_pi * -0.31;
    q2.oneq_duration_ns = 300.0;
    q2.readout_p01 = 0.0176;
    q2.readout_p10 = 0.0337;
    q2.rz_err = 0.0;
    q2.sx_err = 0.000367;
    q2.x_err = 0.000367;

    dev.qubits = {q1, q2};
    dev.coupling = two_pi * 0.013;
    dev.twoq_duration_ns = 660.0;
    dev.ecr_err = 0.00431;
    dev.mu = dev.coupling / dev.delta12();
    dev.nu = 0.0;
    dev.validate();
    return dev;
}

DeviceModel device_from_json(const nlohmann::json& j) {
    DeviceModel dev;
    for (const auto& jq : j.at("qubits")) {
        QubitNoiseParams q;
        q.t1_ns = jq.at("t1_us").get<double>() * 1.0e3;
        q.t2_ns = jq.at("t2_us").get<double>() * 1.0e3;
        q.frequency = two_pi * jq.at("freq_ghz").get<double>();
        q.anharmonicity = two_pi * jq.value("anharmonicity_ghz", 0.0);
        q.oneq_duration_ns = jq.at("oneq_time_ns").get<double>();
        q.readout_p01 = jq.at("p0_given_1").get<double>();
        q.readout_p10 = jq.at("p1_given_0").get<double>();
        q.rz_err = jq.value("rz_err", 0.0);
        q.sx_err = jq.at("sx_err").get<double>();
        q.x_err = jq.at("x_err").get<double>();
        q.p_prep = jq.value("p_prep", 0.0);
        dev.qubits.push_back(q);
    }
    dev.coupling = two_pi * j.value("coupling_ghz", 0.0);
    dev.twoq_duration_ns = j.at("twoq_time_ns").get<double>();
    dev.ecr_err = j.value("ecr_err", 0.0);
    dev.nu = j.value("nu", 0.0);
    if (j.contains("mu")) {
        dev.mu = j.at("mu").get<double>();
    } else if (dev.qubits.size() >= 2 && dev.delta12() != 0.0) {
        dev.mu = dev.coupling / dev.delta12();
    } else if (dev.coupling != 0.0) {
        throw std::invalid_argument(
            "device file: mu must be given explicitly when the qubits are degenerate");
    }
    dev.validate();
    return dev;
}

nlohmann::json device_to_json(const DeviceModel& dev) {
    nlohmann::json j;
    j["qubits"] = nlohmann::json::array();
    for (const QubitNoiseParams& q : dev.qubits) {
        j["qubits"].push_back({
            {"t1_us", q.t1_ns / 1.0e3},
            {"t2_us", q.t2_ns / 1.0e3},
            {"freq_ghz", q.frequency / two_pi},
            {"anharmonicity_ghz", q.anharmonicity / two_pi},
            {"oneq_time_ns", q.oneq_duration_ns},
            {"p0_given_1", q.readout_p01},
            {"p1_given_0", q.readout_p10},
            {"rz_err", q.rz_err},
            {"sx_err", q.sx_err},
            {"x_err", q.x_err},
            {"p_prep", q.p_prep},
        });
    }
    j["coupling_ghz"] = dev.coupling / two_pi;
    j["twoq_time_ns"] = dev.twoq_duration_ns;
    j["ecr_err"] = dev.ecr_err;
    j["mu"] = dev.mu;
    j["nu"] = dev.nu;
    return j;
}

DeviceModel load_device_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open device file: " + path);
    nlohmann::json j;
    try {
        in >> j;
        return device_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("device file " + path + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error("device file " + path + ": " + e.what());
    }
}

}  // namespace pulseforge
