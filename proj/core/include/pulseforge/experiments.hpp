#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pulseforge/datasets.hpp"
#include "pulseforge/models.hpp"
#include "pulseforge/noise.hpp"
#include "pulseforge/training.hpp"

namespace pulseforge {

enum class DatasetSource { SyntheticCircle, Csv };

struct DatasetConfig {
    DatasetSource source = DatasetSource::SyntheticCircle;
    std::string csv_path;
    bool csv_has_header = false;
    int synth_n = 300;
    std::uint64_t synth_seed = 7;
    int n_train = 200;
    int n_test = 100;
};

struct ExperimentConfig {
    std::vector<ModelVariant> variants = {ModelVariant::Gate};
    int n_qubits = 1;
    std::vector<int> layer_grid = {1};
    std::vector<double> noise_p_grid;
    std::vector<std::uint64_t> seeds = {0};
    DatasetConfig dataset;
    TrainConfig train_config;
    bool noise_enabled = true;
    bool spam_enabled = true;
    std::optional<double> noise_override_p;
    std::string device_source = "builtin-brisbane";
    std::string out_dir = "out";

    NoisePolicy policy() const;
    void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

ModelVariant variant_from_string(const std::string& s);
std::string variant_name(ModelVariant v);

DeviceModel resolve_device(const std::string& source);

/// Full dataset before splitting; CSV sources with more than three feature
/// columns run through PCA, three-column sources are min-max scaled.
Dataset resolve_dataset(const DatasetConfig& cfg);

nlohmann::json params_to_json(const ModelParams& params);

struct PipelineResult {
    TrainReport stage_1q;
    std::optional<TrainReport> stage_2q;

    const TrainReport& final_stage() const { return stage_2q ? *stage_2q : stage_1q; }
};

/// One experiment cell: train the single-qubit model, then (for two-qubit
/// requests) warm-start and train the extended model.
PipelineResult run_pipeline(ModelVariant variant, int n_qubits, int layers,
                            const Dataset& train_set, const Dataset& test_set,
                            const DeviceModel& dev, const NoisePolicy& policy,
                            TrainConfig tc, std::uint64_t seed);

int cmd_train(const ExperimentConfig& cfg, std::ostream& log);
int cmd_sweep_layers(const ExperimentConfig& cfg, std::ostream& log);
int cmd_sweep_noise(const ExperimentConfig& cfg, std::ostream& log);
int cmd_device(const std::string& source, std::ostream& out);
int cmd_gen_data(int n, std::uint64_t seed, const std::string& path, std::ostream& log);

}  // namespace pulseforge
