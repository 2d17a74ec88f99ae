#pragma once

#include "gramml/components.hpp"
#include "gramml/cv.hpp"
#include "gramml/evolution.hpp"
#include "gramml/report.hpp"

#include <optional>
#include <string>
#include <utility>

namespace gramml::harness {

/// Full run configuration: a flat key-value document, every key also
/// settable through the CLI flag of the same name.
struct RunConfig {
    std::string grammar_path;
    std::string dataset_path;
    std::string label_column;
    std::string missing_token = "?";
    std::string output_dir; // empty: nothing written

    std::uint64_t seed = 0;
    std::uint64_t outer_split_seed = 13; // fixed by default so seed sweeps share the partition

    std::size_t inner_k = 3;
    std::optional<double> outer_holdout;                               // fraction in (0,1)
    std::optional<std::pair<std::size_t, std::size_t>> outer_fold;     // index/k
    static constexpr double kDefaultHoldout = 0.25;

    evo::EvolutionConfig evolution;

    /// Set one key from its text value; throws std::invalid_argument on
    /// unknown keys or unparseable values.
    void set(const std::string& key, const std::string& value);
    void validate() const;
};

/// Parse a `key = value` config file (# comments, blank lines allowed).
RunConfig load_config_file(const std::string& path);

struct SplitData {
    ml::Dataset train;
    ml::Dataset test;
    std::vector<std::size_t> train_indices; // into the full dataset
    std::vector<std::size_t> test_indices;
    std::string mode; // "holdout" or "fold"
};

/// Outer train/test split per the config (holdout fraction or one fold of
/// a stratified k-fold plan), seeded by outer_split_seed.
SplitData make_outer_split(const ml::Dataset& ds, const RunConfig& cfg);

/// Train a compiled pipeline on the split's train side and return its test
/// predictions (no budget; the final fit is not time-limited).
std::vector<int> fit_on_split(const pipeline::Spec& spec, const SplitData& split);

/// Full run: outer split, evolution with inner-CV fitness on the train
/// side, final retrain of the best pipeline, test evaluation. Writes
/// report.json, generations.csv and best_pipeline.json into output_dir
/// when set, and returns the report.
nlohmann::ordered_json run(const RunConfig& cfg);

/// Re-map the report's stored genotype under the stored grammar, verify
/// the phenotype matches token for token, retrain and re-evaluate. Throws
/// std::runtime_error naming the first divergent token on mismatch.
nlohmann::ordered_json replay(const std::string& report_path);

} // namespace gramml::harness
