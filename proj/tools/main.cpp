#include <cstdint>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pulseforge/experiments.hpp"
#include "pulseforge/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitDataError = 3;

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::string device;
    std::string variant;
    std::vector<std::uint64_t> seeds;
    std::vector<int> layers;
    std::vector<double> noise_p;
    bool no_noise = false;
};

void add_common_options(CLI::App* sub, CommonFlags& flags) {
    sub->add_option("--config", flags.config_path, "JSON experiment config file");
    sub->add_option("--out", flags.out_dir, "Output directory");
    sub->add_option("--seed", flags.seeds, "Random seed (repeatable)");
    sub->add_option("--layers", flags.layers, "Layer counts")->delimiter(',');
    sub->add_option("--noise-p", flags.noise_p, "Depolarizing override grid")->delimiter(',');
    sub->add_option("--variant", flags.variant, "gate | pulsed | both");
    sub->add_option("--device", flags.device, "builtin-brisbane or a device JSON file");
    sub->add_flag("--no-noise", flags.no_noise, "Disable the noise model");
}

pulseforge::ExperimentConfig build_config(const CommonFlags& flags) {
    pulseforge::ExperimentConfig cfg;
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in) throw std::runtime_error("cannot open config file: " + flags.config_path);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument("config file " + flags.config_path + ": " + e.what());
        }
        cfg = pulseforge::config_from_json(j);
    }
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (!flags.device.empty()) cfg.device_source = flags.device;
    if (!flags.seeds.empty()) cfg.seeds = flags.seeds;
    if (!flags.layers.empty()) cfg.layer_grid = flags.layers;
    if (!flags.noise_p.empty()) cfg.noise_p_grid = flags.noise_p;
    if (!flags.variant.empty()) {
        cfg.variants =
            flags.variant == "both"
                ? std::vector<pulseforge::ModelVariant>{pulseforge::ModelVariant::Gate,
                                                        pulseforge::ModelVariant::Pulsed}
                : std::vector<pulseforge::ModelVariant>{
                      pulseforge::variant_from_string(flags.variant)};
    }
    if (flags.no_noise) {
        cfg.noise_enabled = false;
        cfg.spam_enabled = false;
    }
    return cfg;
}

int run_verify() {
    const auto results = pulseforge::run_verification_suite();
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
        all_pass = all_pass && r.pass;
    }
    std::cout << (all_pass ? "verify: all checks passed\n" : "verify: FAILURES detected\n");
    return all_pass ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pulseforge: pulse-level simulator and trainer for data re-uploading "
                 "classifiers on transmon hardware"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* sub_train = app.add_subcommand("train", "Run one training pipeline");
    add_common_options(sub_train, flags);
    int train_qubits = 0;
    sub_train->add_option("--qubits", train_qubits, "Register size (1 or 2)");

    auto* sub_layers = app.add_subcommand("sweep-layers", "Accuracy vs layer count");
    add_common_options(sub_layers, flags);

    auto* sub_noise = app.add_subcommand("sweep-noise", "Accuracy vs depolarizing probability");
    add_common_options(sub_noise, flags);

    auto* sub_verify = app.add_subcommand("verify", "Run the fast invariant suite");

    auto* sub_device = app.add_subcommand("device", "Print the resolved device model");
    std::string device_source = "builtin-brisbane";
    sub_device->add_option("source", device_source, "builtin-brisbane or a device JSON file");

    auto* sub_gen = app.add_subcommand("gen-data", "Emit a synthetic circle CSV");
    int gen_n = 300;
    std::uint64_t gen_seed = 7;
    std::string gen_out = "circle.csv";
    sub_gen->add_option("--n", gen_n, "Sample count");
    sub_gen->add_option("--seed", gen_seed, "Generator seed");
    sub_gen->add_option("--out", gen_out, "Output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (sub_verify->parsed()) return run_verify();
        if (sub_device->parsed()) return pulseforge::cmd_device(device_source, std::cout);
        if (sub_gen->parsed()) {
            return pulseforge::cmd_gen_data(gen_n, gen_seed, gen_out, std::cerr);
        }
        pulseforge::ExperimentConfig cfg = build_config(flags);
        if (sub_train->parsed()) {
            if (train_qubits != 0) cfg.n_qubits = train_qubits;
            return pulseforge::cmd_train(cfg, std::cerr);
        }
        if (sub_layers->parsed()) return pulseforge::cmd_sweep_layers(cfg, std::cerr);
        if (sub_noise->parsed()) return pulseforge::cmd_sweep_noise(cfg, std::cerr);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDataError;
    }
    return kExitConfigError;
}
