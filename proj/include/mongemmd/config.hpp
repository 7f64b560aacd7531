#pragma once

#include "mongemmd/data.hpp"
#include "mongemmd/eval.hpp"
#include "mongemmd/sinkhorn.hpp"
#include "mongemmd/train.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mongemmd {

/// Everything needed to reproduce a run. Parsed from a JSON document; see
/// config_reference() for the key list.
struct RunConfig {
    std::string label = "run";
    std::filesystem::path output_dir = "out";
    DatasetSpec source{};
    DatasetSpec target{};
    std::size_t test_n = 1000;
    std::uint64_t test_source_seed = 0;
    std::uint64_t test_target_seed = 0;
    TrainConfig train{};
    std::size_t checkpoint_every = 0;   // 0: only at the end
    CompareConfig compare{};
    bool record_runtime = true;
};

/// Applies `key.path=value` overrides; the value is parsed as JSON when possible,
/// otherwise taken as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

/// Validates every field; errors name the offending key, e.g. "train.batch_size: ...".
RunConfig parse_run_config(const nlohmann::json& doc);

RunConfig load_run_config(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides = {});

/// Documentation of every accepted key, used by `--help`.
std::string config_reference();

struct TrainArtifacts {
    TrainResult result;
    EvalReport report;
    std::filesystem::path loss_csv;
    std::filesystem::path checkpoint;
    std::filesystem::path eval_json;
};

/// Generates data, trains, evaluates on held-out draws and writes loss.csv,
/// model.ckpt, eval.json, pushforward.csv and target_test.csv into output_dir.
/// With `resume`, continues from output_dir/model.ckpt and output_dir/loss.csv.
TrainArtifacts run_train_pipeline(const RunConfig& config, bool resume = false);

/// Runs compare_runs and writes output_dir/compare.csv. Returns the path.
std::filesystem::path run_compare_pipeline(const RunConfig& config);

LossHistory history_from_csv(const std::string& text);

} // namespace mongemmd
