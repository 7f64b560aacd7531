#pragma once

#include "mongemmd/kernel.hpp"
#include "mongemmd/loss.hpp"
#include "mongemmd/nn.hpp"
#include "mongemmd/optim.hpp"
#include "mongemmd/sample_set.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mongemmd {

struct TrainConfig {
    std::size_t epochs = 3000;
    std::size_t batch_size = 100;
    double inv_lambda = 1e-6;
    KernelSpec kernel{};
    CostSpec cost{};
    NetShape shape{};
    AdamHyper adam{};
    std::uint64_t seed = 0;
    bool shuffle = true;

    void validate() const;
};

struct LossRecord {
    double objective = 0.0;
    double mmd2 = 0.0;
    double cost = 0.0;

    bool operator==(const LossRecord&) const = default;
};

/// One epoch-mean record per completed epoch.
using LossHistory = std::vector<LossRecord>;

struct TrainCheckpoint {
    MlpParams params;
    AdamState adam;
    std::uint64_t epoch = 0;
};

struct TrainResult {
    MlpParams params;
    AdamState adam;
    LossHistory history;
};

/// Mini-batch training of the transport map.
///
/// Each epoch draws fresh permutations of the source and target indices (from a
/// stream keyed by seed and epoch index, so resuming mid-run is exact), cuts them
/// into floor(min(|source|, |target|) / M) aligned batches, and takes one Adam step
/// per batch. Leftover points sit out that epoch. With M equal to the data size
/// this is plain full-batch iteration on a fixed sample.
class Trainer {
public:
    Trainer(TrainConfig config, SampleSet source, SampleSet target);

    /// Continues from a checkpoint written by a run with the same config and data.
    /// `history` holds the records of the epochs already completed, if available.
    static Trainer resume(TrainConfig config, SampleSet source, SampleSet target,
                          TrainCheckpoint checkpoint, LossHistory history = {});

    /// Runs one epoch and returns its mean loss record.
    LossRecord run_epoch();

    /// Runs until `config.epochs` epochs are complete.
    void run();

    std::uint64_t epoch() const noexcept { return epoch_; }
    std::size_t batches_per_epoch() const noexcept { return batches_; }
    const MlpParams& params() const noexcept { return params_; }
    const AdamState& adam() const noexcept { return adam_; }
    const LossHistory& history() const noexcept { return history_; }
    const TrainConfig& config() const noexcept { return config_; }

    TrainCheckpoint checkpoint() const { return {params_, adam_, epoch_}; }
    TrainResult result() const { return {params_, adam_, history_}; }

private:
    TrainConfig config_;
    SampleSet source_;
    SampleSet target_;
    std::size_t batches_ = 0;
    MlpParams params_;
    AdamState adam_;
    std::uint64_t epoch_ = 0;
    LossHistory history_;
};

TrainResult train(const TrainConfig& config, const SampleSet& source, const SampleSet& target);

// Binary checkpoint: "MONGEMMD" magic, u32 format version, u64 epoch, parameters,
// Adam state, then an FNV-1a checksum of every preceding byte.
std::string serialize_checkpoint(const TrainCheckpoint& ckpt);
TrainCheckpoint deserialize_checkpoint(const std::string& bytes);
void save_checkpoint(const std::filesystem::path& path, const TrainCheckpoint& ckpt);
TrainCheckpoint load_checkpoint(const std::filesystem::path& path);

/// Header `epoch,objective,mmd2,cost`; epochs numbered from 1.
std::string history_to_csv(const LossHistory& history);

} // namespace mongemmd
