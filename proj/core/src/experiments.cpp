#include "pulseforge/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pulseforge/rng.hpp"

namespace pulseforge {

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw std::invalid_argument(what);
}

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

NoisePolicy ExperimentConfig::policy() const {
    NoisePolicy p;
    p.enabled = noise_enabled;
    p.spam_enabled = spam_enabled;
    p.depolarizing_override_p = noise_override_p;
    return p;
}

void ExperimentConfig::validate() const {
    require(!variants.empty(), "config: at least one variant");
    require(n_qubits == 1 || n_qubits == 2, "config: n_qubits must be 1 or 2");
    require(!layer_grid.empty(), "config: layer grid must be non-empty");
    require(!seeds.empty(), "config: seeds must be non-empty");
    for (int l : layer_grid) require(l >= 1, "config: layer counts must be >= 1");
    for (double p : noise_p_grid)
        require(p >= 0.0 && p <= 1.0, "config: noise probabilities must lie in [0, 1]");
    if (noise_override_p)
        require(*noise_override_p >= 0.0 && *noise_override_p <= 1.0,
                "config: override_p must lie in [0, 1]");
    require(dataset.n_train >= 1 && dataset.n_test >= 0, "config: split sizes invalid");
    train_config.validate();
}

ModelVariant variant_from_string(const std::string& s) {
    if (s == "gate") return ModelVariant::Gate;
    if (s == "pulsed") return ModelVariant::Pulsed;
    throw std::invalid_argument("unknown variant: " + s);
}

std::string variant_name(ModelVariant v) {
    return v == ModelVariant::Gate ? "gate" : "pulsed";
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    if (j.contains("variant")) {
        const std::string v = j.at("variant").get<std::string>();
        cfg.variants = v == "both"
                           ? std::vector<ModelVariant>{ModelVariant::Gate, ModelVariant::Pulsed}
                           : std::vector<ModelVariant>{variant_from_string(v)};
    }
    cfg.n_qubits = j.value("n_qubits", 1);
    if (j.contains("layers")) cfg.layer_grid = j.at("layers").get<std::vector<int>>();
    if (j.contains("noise_p")) cfg.noise_p_grid = j.at("noise_p").get<std::vector<double>>();
    if (j.contains("seeds")) cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("noise")) {
        const auto& jn = j.at("noise");
        cfg.noise_enabled = jn.value("enabled", true);
        cfg.spam_enabled = jn.value("spam", true);
        if (jn.contains("override_p")) cfg.noise_override_p = jn.at("override_p").get<double>();
    }
    if (j.contains("dataset")) {
        const auto& jd = j.at("dataset");
        const std::string source = jd.value("source", "synthetic-circle");
        if (source == "synthetic-circle") {
            cfg.dataset.source = DatasetSource::SyntheticCircle;
        } else if (source == "csv") {
            cfg.dataset.source = DatasetSource::Csv;
            cfg.dataset.csv_path = jd.at("csv_path").get<std::string>();
            cfg.dataset.csv_has_header = jd.value("has_header", false);
        } else {
            throw std::invalid_argument("unknown dataset source: " + source);
        }
        cfg.dataset.synth_n = jd.value("n", cfg.dataset.synth_n);
        cfg.dataset.synth_seed = jd.value("gen_seed", cfg.dataset.synth_seed);
        cfg.dataset.n_train = jd.value("n_train", cfg.dataset.n_train);
        cfg.dataset.n_test = jd.value("n_test", cfg.dataset.n_test);
    }
    if (j.contains("train")) {
        const auto& jt = j.at("train");
        cfg.train_config.epochs = jt.value("epochs", cfg.train_config.epochs);
        cfg.train_config.learning_rate = jt.value("learning_rate", cfg.train_config.learning_rate);
        cfg.train_config.beta1 = jt.value("beta1", cfg.train_config.beta1);
        cfg.train_config.beta2 = jt.value("beta2", cfg.train_config.beta2);
        cfg.train_config.eps_adam = jt.value("eps_adam", cfg.train_config.eps_adam);
        cfg.train_config.fd_step = jt.value("fd_step", cfg.train_config.fd_step);
        cfg.train_config.batch = jt.value("batch", cfg.train_config.batch);
    }
    cfg.device_source = j.value("device", cfg.device_source);
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["variant"] = cfg.variants.size() == 2 ? "both" : variant_name(cfg.variants.front());
    j["n_qubits"] = cfg.n_qubits;
    j["layers"] = cfg.layer_grid;
    if (!cfg.noise_p_grid.empty()) j["noise_p"] = cfg.noise_p_grid;
    j["seeds"] = cfg.seeds;
    j["noise"] = {{"enabled", cfg.noise_enabled}, {"spam", cfg.spam_enabled}};
    if (cfg.noise_override_p) j["noise"]["override_p"] = *cfg.noise_override_p;
    j["dataset"] = {
        {"source", cfg.dataset.source == DatasetSource::Csv ? "csv" : "synthetic-circle"},
        {"n", cfg.dataset.synth_n},
        {"gen_seed", cfg.dataset.synth_seed},
        {"n_train", cfg.dataset.n_train},
        {"n_test", cfg.dataset.n_test},
    };
    if (cfg.dataset.source == DatasetSource::Csv) {
        j["dataset"]["csv_path"] = cfg.dataset.csv_path;
        j["dataset"]["has_header"] = cfg.dataset.csv_has_header;
    }
    j["train"] = {
        {"epochs", cfg.train_config.epochs},
        {"learning_rate", cfg.train_config.learning_rate},
        {"beta1", cfg.train_config.beta1},
        {"beta2", cfg.train_config.beta2},
        {"eps_adam", cfg.train_config.eps_adam},
        {"fd_step", cfg.train_config.fd_step},
        {"batch", cfg.train_config.batch},
    };
    j["device"] = cfg.device_source;
    j["out_dir"] = cfg.out_dir;
    return j;
}

DeviceModel resolve_device(const std::string& source) {
    if (source == "builtin-brisbane") return brisbane_device();
    return load_device_file(source);
}

namespace {

Dataset scale_to_range(const RawTable& table) {
    constexpr double pi = std::numbers::pi;
    Dataset ds;
    ds.labels = table.labels;
    ds.features.resize(table.features.size());
    for (int c = 0; c < 3; ++c) {
        double lo = table.features.front()[c];
        double hi = lo;
        for (const auto& row : table.features) {
            lo = std::min(lo, row[c]);
            hi = std::max(hi, row[c]);
        }
        const double span = hi - lo;
        for (std::size_t i = 0; i < table.features.size(); ++i) {
            ds.features[i][c] =
                span > 0.0 ? -pi + 2.0 * pi * (table.features[i][c] - lo) / span : 0.0;
        }
    }
    return ds;
}

}  // namespace

Dataset resolve_dataset(const DatasetConfig& cfg) {
    if (cfg.source == DatasetSource::SyntheticCircle) {
        return synth_circle(cfg.synth_n, cfg.synth_seed);
    }
    const RawTable table = load_csv(cfg.csv_path, cfg.csv_has_header);
    const std::size_t d = table.features.front().size();
    if (d == 3) return scale_to_range(table);
    return pca_reduce(table.features, table.labels, 3);
}

nlohmann::json params_to_json(const ModelParams& params) {
    nlohmann::json j;
    j["variant"] = variant_name(params.variant);
    j["n_qubits"] = params.n_qubits;
    j["targets"] = {{"theta", params.targets.theta}, {"phi", params.targets.phi}};
    j["layers"] = nlohmann::json::array();
    if (params.variant == ModelVariant::Gate) {
        for (const GateLayerParams& l : params.gate_layers) {
            nlohmann::json jl;
            jl["qubit"] = nlohmann::json::array();
            for (const EulerAngles& a : l.qubit) {
                jl["qubit"].push_back({a.theta1, a.theta2, a.theta3});
            }
            if (l.entangler) {
                jl["entangler"] = {l.entangler->theta1, l.entangler->theta2, l.entangler->theta3};
            }
            j["layers"].push_back(jl);
        }
    } else {
        for (const PulseLayerParams& l : params.pulse_layers) {
            nlohmann::json jl;
            jl["qubit"] = nlohmann::json::array();
            for (const PulseBlockParams& b : l.qubit) {
                jl["qubit"].push_back(
                    {{"nu1", b.nu1}, {"nu2", b.nu2}, {"omega", b.omega}, {"gamma", b.gamma}});
            }
            if (l.entangler) {
                jl["entangler"] = {{"omega", l.entangler->omega},
                                   {"gamma", l.entangler->gamma},
                                   {"delta", l.entangler->delta}};
            }
            j["layers"].push_back(jl);
        }
    }
    return j;
}

PipelineResult run_pipeline(ModelVariant variant, int n_qubits, int layers,
                            const Dataset& train_set, const Dataset& test_set,
                            const DeviceModel& dev, const NoisePolicy& policy,
                            TrainConfig tc, std::uint64_t seed) {
    PipelineResult result;
    tc.seed = derive_seed(seed, 101);
    result.stage_1q =
        train(variant, 1, layers, train_set, test_set, dev, policy, tc, std::nullopt);
    if (n_qubits == 2) {
        const ModelParams warm =
            warm_start_two_qubit(result.stage_1q.final_params, derive_seed(seed, 202), dev);
        tc.seed = derive_seed(seed, 303);
        result.stage_2q =
            train(variant, 2, layers, train_set, test_set, dev, policy, tc, warm);
    }
    return result;
}

int cmd_train(const ExperimentConfig& cfg, std::ostream& log) {
    cfg.validate();
    require(cfg.variants.size() == 1, "train: pick one variant (gate or pulsed)");
    const ModelVariant variant = cfg.variants.front();
    const int layers = cfg.layer_grid.front();
    const std::uint64_t seed = cfg.seeds.front();

    const DeviceModel dev = resolve_device(cfg.device_source);
    const Dataset full = resolve_dataset(cfg.dataset);
    const auto [train_set, test_set] =
        split(full, cfg.dataset.n_train, cfg.dataset.n_test, derive_seed(seed, 1));

    std::filesystem::create_directories(cfg.out_dir);
    const PipelineResult result = run_pipeline(variant, cfg.n_qubits, layers, train_set,
                                               test_set, dev, cfg.policy(), cfg.train_config, seed);
    const TrainReport& report = result.final_stage();

    std::string history = "epoch,best_loss\n";
    for (std::size_t e = 0; e < report.loss_history.size(); ++e) {
        history += std::to_string(e + 1) + "," + fmt("%.17g", report.loss_history[e]) + "\n";
    }
    write_file(cfg.out_dir + "/loss_history.csv", history);

    nlohmann::json jr;
    jr["config"] = config_to_json(cfg);
    jr["variant"] = variant_name(variant);
    jr["layers"] = layers;
    jr["seed"] = seed;
    jr["train_acc"] = report.train_accuracy;
    jr["test_acc"] = report.test_accuracy;
    jr["final_loss"] = report.final_loss;
    jr["best_epoch"] = report.best_epoch;
    jr["wall_time_s"] = report.wall_time_s;
    if (result.stage_2q) {
        jr["stage_1q"] = {{"final_loss", result.stage_1q.final_loss},
                          {"train_acc", result.stage_1q.train_accuracy},
                          {"test_acc", result.stage_1q.test_accuracy}};
    }
    write_file(cfg.out_dir + "/report.json", jr.dump(2) + "\n");
    write_file(cfg.out_dir + "/params.json", params_to_json(report.final_params).dump(2) + "\n");

    log << "train: variant=" << variant_name(variant) << " L=" << layers << " seed=" << seed
        << " train_acc=" << report.train_accuracy << " test_acc=" << report.test_accuracy
        << " loss=" << report.final_loss << "\n";
    return 0;
}

namespace {

struct SweepRow {
    std::string variant;
    double knob = 0.0;  // layer count or noise probability
    std::uint64_t seed = 0;
    double train_acc = 0.0;
    double test_acc = 0.0;
};

void write_sweep_files(const std::string& dir, const std::string& stem,
                       const std::string& knob_name, const char* knob_format,
                       std::vector<SweepRow> rows) {
    std::sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.variant != b.variant) return a.variant < b.variant;
        if (a.knob != b.knob) return a.knob < b.knob;
        return a.seed < b.seed;
    });
    std::string csv = "variant," + knob_name + ",seed,train_acc,test_acc\n";
    for (const SweepRow& r : rows) {
        csv += r.variant + "," + fmt(knob_format, r.knob) + "," + std::to_string(r.seed) + "," +
               fmt("%.6f", r.train_acc) + "," + fmt("%.6f", r.test_acc) + "\n";
    }
    write_file(dir + "/" + stem + ".csv", csv);

    std::map<std::pair<std::string, double>, std::pair<std::vector<double>, std::vector<double>>>
        groups;
    for (const SweepRow& r : rows) {
        auto& g = groups[{r.variant, r.knob}];
        g.first.push_back(r.train_acc);
        g.second.push_back(r.test_acc);
    }
    std::string agg = "variant," + knob_name + ",median_train_acc,median_test_acc\n";
    for (const auto& [key, accs] : groups) {
        agg += key.first + "," + fmt(knob_format, key.second) + "," +
               fmt("%.6f", median(accs.first)) + "," + fmt("%.6f", median(accs.second)) + "\n";
    }
    write_file(dir + "/" + stem + "_median.csv", agg);
}

}  // namespace

int cmd_sweep_layers(const ExperimentConfig& cfg, std::ostream& log) {
    cfg.validate();
    const DeviceModel dev = resolve_device(cfg.device_source);
    const Dataset full = resolve_dataset(cfg.dataset);
    std::filesystem::create_directories(cfg.out_dir);

    std::vector<SweepRow> rows;
    for (ModelVariant variant : cfg.variants) {
        for (int layers : cfg.layer_grid) {
            for (std::uint64_t seed : cfg.seeds) {
                const auto [train_set, test_set] =
                    split(full, cfg.dataset.n_train, cfg.dataset.n_test, derive_seed(seed, 1));
                const PipelineResult result =
                    run_pipeline(variant, cfg.n_qubits, layers, train_set, test_set, dev,
                                 cfg.policy(), cfg.train_config, seed);
                const TrainReport& report = result.final_stage();
                rows.push_back({variant_name(variant), static_cast<double>(layers), seed,
                                report.train_accuracy, report.test_accuracy});
                log << "sweep-layers: variant=" << variant_name(variant) << " L=" << layers
                    << " seed=" << seed << " train_acc=" << report.train_accuracy
                    << " test_acc=" << report.test_accuracy << "\n";
            }
        }
    }
    write_sweep_files(cfg.out_dir, "sweep_layers", "L", "%.0f", std::move(rows));
    return 0;
}

int cmd_sweep_noise(const ExperimentConfig& cfg, std::ostream& log) {
    cfg.validate();
    require(!cfg.noise_p_grid.empty(), "sweep-noise: noise_p grid must be non-empty");
    const DeviceModel dev = resolve_device(cfg.device_source);
    const Dataset full = resolve_dataset(cfg.dataset);
    std::filesystem::create_directories(cfg.out_dir);
    const int layers = cfg.layer_grid.front();

    std::vector<SweepRow> rows;
    for (ModelVariant variant : cfg.variants) {
        for (double p : cfg.noise_p_grid) {
            for (std::uint64_t seed : cfg.seeds) {
                NoisePolicy policy = cfg.policy();
                policy.enabled = true;
                policy.depolarizing_override_p = p;
                const auto [train_set, test_set] =
                    split(full, cfg.dataset.n_train, cfg.dataset.n_test, derive_seed(seed, 1));
                const PipelineResult result = run_pipeline(
                    variant, cfg.n_qubits, layers, train_set, test_set, dev, policy,
                    cfg.train_config, seed);
                const TrainReport& report = result.final_stage();
                rows.push_back(
                    {variant_name(variant), p, seed, report.train_accuracy, report.test_accuracy});
                log << "sweep-noise: variant=" << variant_name(variant) << " p=" << p
                    << " seed=" << seed << " train_acc=" << report.train_accuracy
                    << " test_acc=" << report.test_accuracy << "\n";
            }
        }
    }
    write_sweep_files(cfg.out_dir, "sweep_noise", "p", "%.6g", std::move(rows));
    return 0;
}

int cmd_device(const std::string& source, std::ostream& out) {
    const DeviceModel dev = resolve_device(source);
    constexpr double two_pi = 2.0 * std::numbers::pi;

    out << "device: " << source << "\n";
    out << "  coupling J = " << dev.coupling << " rad/ns (" << dev.coupling / two_pi << " GHz)\n";
    out << "  delta12 = " << dev.delta12() << " rad/ns, mu = " << dev.mu << ", nu = " << dev.nu
        << "\n";
    out << "  2Q time = " << dev.twoq_duration_ns << " ns, ECR err = " << dev.ecr_err << "\n";
    nlohmann::json j = device_to_json(dev);
    j["derived"] = {{"delta12_radns", dev.delta12()},
                    {"coupling_radns", dev.coupling},
                    {"mu", dev.mu},
                    {"nu", dev.nu}};
    j["derived"]["per_qubit"] = nlohmann::json::array();
    for (std::size_t q = 0; q < dev.qubits.size(); ++q) {
        const auto& params = dev.qubits[q];
        const DampingParams d1 =
            damping_params(params.oneq_duration_ns, params.t1_ns, params.t2_ns);
        const DampingParams d2 = damping_params(dev.twoq_duration_ns, params.t1_ns, params.t2_ns);
        out << "  qubit " << q + 1 << ": T1 = " << params.t1_ns / 1e3
            << " us, T2 = " << params.t2_ns / 1e3 << " us, f = " << params.frequency / two_pi
            << " GHz\n";
        out << "    P(0|1) = " << params.readout_p01 << ", P(1|0) = " << params.readout_p10
            << ", SX err = " << params.sx_err << ", X err = " << params.x_err << "\n";
        out << "    gamma(1Q) = " << d1.gamma << ", lambda(1Q) = " << d1.lambda
            << ", gamma(2Q) = " << d2.gamma << ", lambda(2Q) = " << d2.lambda << "\n";
        j["derived"]["per_qubit"].push_back({{"gamma_1q", d1.gamma},
                                             {"lambda_1q", d1.lambda},
                                             {"gamma_2q", d2.gamma},
                                             {"lambda_2q", d2.lambda},
                                             {"depolarizing_p", estimate_depolarizing_p(
                                                                    dev, static_cast<int>(q))}});
    }
    out << j.dump(2) << "\n";
    return 0;
}

int cmd_gen_data(int n, std::uint64_t seed, const std::string& path, std::ostream& log) {
    const Dataset ds = synth_circle(n, seed);
    save_csv(ds, path);
    log << "gen-data: wrote " << n << " samples to " << path << "\n";
    return 0;
}

}  // namespace pulseforge
