#include "mongemmd/train.hpp"

#include "mongemmd/binary_io.hpp"
#include "mongemmd/error.hpp"
#include "mongemmd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mongemmd {

namespace {

constexpr char kMagic[8] = {'M', 'O', 'N', 'G', 'E', 'M', 'M', 'D'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::uint64_t kShuffleStream = 0x5348;

} // namespace

void TrainConfig::validate() const
{
    if (batch_size < 2)
        throw InputError("train: batch_size must be >= 2");
    if (!(inv_lambda >= 0.0) || !std::isfinite(inv_lambda))
        throw InputError("train: inv_lambda must be a finite non-negative number");
    kernel.validate();
    adam.validate();
    if (shape.widths.size() < 2)
        throw InputError("train: network shape needs at least input and output widths");
    for (std::size_t w : shape.widths)
        if (w == 0)
            throw InputError("train: network widths must be >= 1");
}

Trainer::Trainer(TrainConfig config, SampleSet source, SampleSet target)
    : config_(std::move(config)), source_(std::move(source)), target_(std::move(target))
{
    config_.validate();
    require_same_dim(source_, target_, "train");
    if (config_.shape.widths.front() != source_.dim() || config_.shape.widths.back() != source_.dim())
        throw InputError("train: network input/output widths must equal the data dimension " +
                         std::to_string(source_.dim()));
    if (config_.batch_size > source_.size() || config_.batch_size > target_.size())
        throw InputError("train: batch_size " + std::to_string(config_.batch_size) +
                         " exceeds the data size (source " + std::to_string(source_.size()) +
                         ", target " + std::to_string(target_.size()) + ")");
    batches_ = std::min(source_.size(), target_.size()) / config_.batch_size;
    params_ = init_params(config_.shape, config_.seed);
    adam_ = adam_init(params_, config_.adam);
}

Trainer Trainer::resume(TrainConfig config, SampleSet source, SampleSet target,
                        TrainCheckpoint checkpoint, LossHistory history)
{
    Trainer t(std::move(config), std::move(source), std::move(target));
    checkpoint.params.validate();
    bool same_shape = checkpoint.params.layers.size() == t.params_.layers.size();
    for (std::size_t l = 0; same_shape && l < t.params_.layers.size(); ++l) {
        const auto& a = checkpoint.params.layers[l];
        const auto& b = t.params_.layers[l];
        same_shape = a.weight.rows() == b.weight.rows() && a.weight.cols() == b.weight.cols() &&
                     a.activation == b.activation;
    }
    if (!same_shape || !checkpoint.adam.first_moment.congruent_with(checkpoint.params) ||
        !checkpoint.adam.second_moment.congruent_with(checkpoint.params))
        throw InputError("train: checkpoint shape does not match the configured network");
    t.params_ = std::move(checkpoint.params);
    t.adam_ = std::move(checkpoint.adam);
    t.epoch_ = checkpoint.epoch;
    if (!history.empty() && history.size() != checkpoint.epoch)
        throw InputError("train: history length does not match the checkpoint epoch");
    t.history_ = std::move(history);
    return t;
}

LossRecord Trainer::run_epoch()
{
    const std::size_t m = config_.batch_size;
    std::vector<std::size_t> src_order(source_.size());
    std::vector<std::size_t> tgt_order(target_.size());
    if (config_.shuffle) {
        const Rng epoch_rng = Rng(config_.seed).split(kShuffleStream).split(epoch_);
        src_order = epoch_rng.split(0).permutation(source_.size());
        tgt_order = epoch_rng.split(1).permutation(target_.size());
    } else {
        std::iota(src_order.begin(), src_order.end(), std::size_t{0});
        std::iota(tgt_order.begin(), tgt_order.end(), std::size_t{0});
    }

    const Penalty penalty = Penalty::from_inverse(config_.inv_lambda);
    LossRecord sum;
    for (std::size_t b = 0; b < batches_; ++b) {
        const std::span<const std::size_t> src_idx(src_order.data() + b * m, m);
        const std::span<const std::size_t> tgt_idx(tgt_order.data() + b * m, m);
        const SampleSet xb = source_.select(src_idx);
        const SampleSet yb = target_.select(tgt_idx);
        try {
            const LossAndGrad lg =
                monge_mmd_loss_and_grad(params_, xb, yb, config_.kernel, penalty, config_.cost);
            adam_step(adam_, params_, lg.grads);
            sum.objective += lg.value.objective;
            sum.mmd2 += lg.value.true_mmd2;
            sum.cost += lg.value.mean_cost;
        } catch (const NumericError& e) {
            throw NumericError("epoch " + std::to_string(epoch_ + 1) + ", batch " +
                               std::to_string(b + 1) + ": " + e.what());
        }
    }
    const auto nb = static_cast<double>(batches_);
    const LossRecord mean{sum.objective / nb, sum.mmd2 / nb, sum.cost / nb};
    ++epoch_;
    history_.push_back(mean);
    return mean;
}

void Trainer::run()
{
    while (epoch_ < config_.epochs)
        run_epoch();
}

TrainResult train(const TrainConfig& config, const SampleSet& source, const SampleSet& target)
{
    Trainer trainer(config, source, target);
    trainer.run();
    return trainer.result();
}

std::string serialize_checkpoint(const TrainCheckpoint& ckpt)
{
    std::ostringstream os(std::ios::binary);
    os.write(kMagic, sizeof(kMagic));
    io::write_u32(os, kFormatVersion);
    io::write_u64(os, ckpt.epoch);
    write_params(os, ckpt.params);
    write_adam(os, ckpt.adam);
    std::string body = os.str();
    std::ostringstream tail(std::ios::binary);
    io::write_u64(tail, io::fnv1a64(body));
    return body + tail.str();
}

TrainCheckpoint deserialize_checkpoint(const std::string& bytes)
{
    if (bytes.size() < sizeof(kMagic) + 4 + 8 + 8 ||
        !std::equal(kMagic, kMagic + sizeof(kMagic), bytes.begin()))
        throw InputError("checkpoint: not a mongemmd checkpoint");
    const std::string body = bytes.substr(0, bytes.size() - 8);
    std::istringstream tail(bytes.substr(bytes.size() - 8), std::ios::binary);
    if (io::read_u64(tail) != io::fnv1a64(body))
        throw InputError("checkpoint: checksum mismatch (file is corrupted)");

    std::istringstream is(body, std::ios::binary);
    is.ignore(sizeof(kMagic));
    const std::uint32_t version = io::read_u32(is);
    if (version != kFormatVersion)
        throw InputError("checkpoint: unsupported format version " + std::to_string(version));
    TrainCheckpoint ckpt;
    ckpt.epoch = io::read_u64(is);
    ckpt.params = read_params(is);
    ckpt.adam = read_adam(is);
    if (!ckpt.adam.first_moment.congruent_with(ckpt.params) ||
        !ckpt.adam.second_moment.congruent_with(ckpt.params))
        throw InputError("checkpoint: optimizer state does not match the network shape");
    if (is.peek() != std::char_traits<char>::eof())
        throw InputError("checkpoint: trailing bytes");
    return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const TrainCheckpoint& ckpt)
{
    io::atomic_write(path, serialize_checkpoint(ckpt));
}

TrainCheckpoint load_checkpoint(const std::filesystem::path& path)
{
    try {
        return deserialize_checkpoint(io::read_file(path));
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

std::string history_to_csv(const LossHistory& history)
{
    std::string out = "epoch,objective,mmd2,cost\n";
    for (std::size_t e = 0; e < history.size(); ++e) {
        out += std::to_string(e + 1) + ',' + io::format_double(history[e].objective) + ',' +
               io::format_double(history[e].mmd2) + ',' + io::format_double(history[e].cost) + '\n';
    }
    return out;
}

} // namespace mongemmd
