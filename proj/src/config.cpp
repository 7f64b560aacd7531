#include "mongemmd/config.hpp"

#include "mongemmd/binary_io.hpp"
#include "mongemmd/error.hpp"

#include <cerrno>
#include <cstdlib>
#include <set>
#include <sstream>

namespace mongemmd {

using nlohmann::json;

namespace {

// Reads one JSON object, tracking the key path for error messages and
// rejecting keys it was never asked about.
class Section {
public:
    Section(const json& obj, std::string path) : obj_(obj), path_(std::move(path))
    {
        if (!obj_.is_object())
            fail("", "expected an object");
    }

    ~Section() noexcept(false)
    {
        if (std::uncaught_exceptions() > 0)
            return;
        for (const auto& [key, _] : obj_.items())
            if (!seen_.count(key))
                fail(key, "unknown key");
    }

    bool has(const std::string& key)
    {
        seen_.insert(key);
        return obj_.contains(key) && !obj_.at(key).is_null();
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const
    {
        throw InputError("config: " + qualify(key) + ": " + msg);
    }

    std::string qualify(const std::string& key) const
    {
        if (path_.empty())
            return key.empty() ? "<root>" : key;
        return key.empty() ? path_ : path_ + "." + key;
    }

    double number(const std::string& key, double fallback)
    {
        if (!has(key))
            return fallback;
        const json& v = obj_.at(key);
        if (!v.is_number())
            fail(key, "expected a number");
        return v.get<double>();
    }

    std::uint64_t integer(const std::string& key, std::uint64_t fallback)
    {
        if (!has(key))
            return fallback;
        const json& v = obj_.at(key);
        if (v.is_number_unsigned())
            return v.get<std::uint64_t>();
        if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
            return static_cast<std::uint64_t>(v.get<std::int64_t>());
        fail(key, "expected a non-negative integer");
    }

    bool boolean(const std::string& key, bool fallback)
    {
        if (!has(key))
            return fallback;
        const json& v = obj_.at(key);
        if (!v.is_boolean())
            fail(key, "expected true or false");
        return v.get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback)
    {
        if (!has(key))
            return fallback;
        const json& v = obj_.at(key);
        if (!v.is_string())
            fail(key, "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback)
    {
        if (!has(key))
            return fallback;
        const json& v = obj_.at(key);
        if (!v.is_array())
            fail(key, "expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number())
                fail(key, "expected an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<std::size_t> counts(const std::string& key, std::vector<std::size_t> fallback)
    {
        if (!has(key))
            return fallback;
        const json& v = obj_.at(key);
        if (!v.is_array())
            fail(key, "expected an array of non-negative integers");
        std::vector<std::size_t> out;
        for (const auto& e : v) {
            if (!e.is_number_unsigned() && !(e.is_number_integer() && e.get<std::int64_t>() >= 0))
                fail(key, "expected an array of non-negative integers");
            out.push_back(e.get<std::size_t>());
        }
        return out;
    }

    Section child(const std::string& key)
    {
        seen_.insert(key);
        return Section(obj_.contains(key) ? obj_.at(key) : empty(), qualify(key));
    }

    // Runs a parse step, re-labelling library validation errors with this key.
    template <typename F>
    void check(const std::string& key, F&& step) const
    {
        try {
            step();
        } catch (const InputError& e) {
            std::string msg = e.what();
            const std::string prefix = "config: ";
            if (msg.rfind(prefix, 0) == 0)
                throw;
            fail(key, msg);
        }
    }

private:
    static const json& empty()
    {
        static const json e = json::object();
        return e;
    }

    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

DatasetSpec parse_dataset(Section s, DatasetSpec d)
{
    s.check("family", [&] { d.family = parse_dataset_family(s.string("family", to_string(d.family))); });
    d.n = s.integer("n", d.n);
    d.noise = s.number("noise", d.noise);
    d.factor = s.number("factor", d.factor);
    d.mean = s.numbers("mean", d.mean);
    d.variance = s.number("variance", d.variance);
    d.seed = s.integer("seed", d.seed);
    s.check("", [&] { d.validate(); });
    return d;
}

KernelSpec parse_kernel(Section s)
{
    KernelSpec k;
    const std::string family = s.string("family", "gaussian");
    if (family == "gaussian")
        k.family = KernelFamily::Gaussian;
    else if (family == "matern")
        k.family = KernelFamily::Matern;
    else
        s.fail("family", "expected gaussian or matern");
    k.alpha = s.number("alpha", k.alpha);
    s.check("order", [&] { k.matern_order = parse_matern_order(s.string("order", "3/2")); });
    k.lengthscale = s.number("lengthscale", k.lengthscale);
    s.check("", [&] { k.validate(); });
    return k;
}

AdamHyper parse_adam(Section s)
{
    AdamHyper h;
    h.lr = s.number("lr", h.lr);
    h.beta1 = s.number("beta1", h.beta1);
    h.beta2 = s.number("beta2", h.beta2);
    h.eps = s.number("eps", h.eps);
    s.check("", [&] { h.validate(); });
    return h;
}

} // namespace

void apply_override(json& doc, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw InputError("override '" + assignment + "': expected key.path=value");
    const std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded())
        value = raw;

    json* node = &doc;
    std::istringstream parts(key);
    std::string part;
    std::vector<std::string> path;
    while (std::getline(parts, part, '.'))
        path.push_back(part);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        if (!node->is_object())
            throw InputError("override '" + key + "': '" + path[i] + "' is not an object");
        node = &(*node)[path[i]];
        if (node->is_null())
            *node = json::object();
    }
    if (!node->is_object())
        throw InputError("override '" + key + "': parent is not an object");
    (*node)[path.back()] = value;
}

RunConfig parse_run_config(const json& doc)
{
    RunConfig c;
    Section root(doc, "");
    c.label = root.string("label", c.label);
    c.output_dir = root.string("output_dir", c.output_dir.string());

    DatasetSpec src_default;
    src_default.family = DatasetFamily::IsotropicGaussian;
    src_default.mean = {0.0, 0.0};
    src_default.seed = 1;
    DatasetSpec tgt_default = src_default;
    tgt_default.mean = {5.0, 5.0};
    tgt_default.seed = 2;
    c.source = parse_dataset(root.child("source"), src_default);
    c.target = parse_dataset(root.child("target"), tgt_default);

    const auto dim_of = [](const DatasetSpec& d) {
        return d.family == DatasetFamily::IsotropicGaussian ? d.mean.size() : std::size_t{2};
    };
    if (dim_of(c.source) != dim_of(c.target))
        root.fail("target", "source and target dimensions differ");
    const std::size_t dim = dim_of(c.source);

    {
        Section t = root.child("test");
        c.test_n = t.integer("n", c.test_n);
        c.test_source_seed = t.integer("source_seed", c.source.seed + 1000);
        c.test_target_seed = t.integer("target_seed", c.target.seed + 1000);
        if (c.test_n < 2)
            t.fail("n", "must be >= 2");
        if (c.test_source_seed == c.source.seed)
            t.fail("source_seed", "must differ from source.seed (test data is held out)");
        if (c.test_target_seed == c.target.seed)
            t.fail("target_seed", "must differ from target.seed (test data is held out)");
    }

    c.train.kernel = parse_kernel(root.child("kernel"));
    if (root.string("cost", "squared_euclidean") != "squared_euclidean")
        root.fail("cost", "only squared_euclidean is supported");

    {
        Section t = root.child("train");
        TrainConfig& tc = c.train;
        tc.epochs = t.integer("epochs", tc.epochs);
        tc.batch_size = t.integer("batch_size", tc.batch_size);
        tc.inv_lambda = t.number("inv_lambda", tc.inv_lambda);
        const auto hidden = t.counts("hidden", {64});
        Activation act = Activation::ReLU;
        t.check("activation", [&] { act = parse_activation(t.string("activation", "relu")); });
        tc.seed = t.integer("seed", tc.seed);
        tc.shuffle = t.boolean("shuffle", tc.shuffle);
        c.checkpoint_every = t.integer("checkpoint_every", 0);
        tc.adam = parse_adam(t.child("adam"));
        tc.shape.widths.clear();
        tc.shape.widths.push_back(dim);
        for (std::size_t w : hidden) {
            if (w == 0)
                t.fail("hidden", "widths must be >= 1");
            tc.shape.widths.push_back(w);
        }
        tc.shape.widths.push_back(dim);
        tc.shape.hidden = act;
        if (tc.batch_size < 2)
            t.fail("batch_size", "must be >= 2");
        if (tc.batch_size > c.source.n || tc.batch_size > c.target.n)
            t.fail("batch_size", "exceeds the number of source or target points");
        t.check("", [&] { tc.validate(); });
    }

    {
        Section s = root.child("compare");
        CompareConfig& cc = c.compare;
        cc.sizes = s.counts("sizes", cc.sizes);
        cc.max_size = s.integer("max_size", cc.max_size);
        cc.source_mean = s.numbers("source_mean", cc.source_mean);
        cc.target_mean = s.numbers("target_mean", cc.target_mean);
        cc.variance = s.number("variance", cc.variance);
        cc.source_seed = s.integer("source_seed", cc.source_seed);
        cc.target_seed = s.integer("target_seed", cc.target_seed);
        cc.epsilon = s.number("epsilon", cc.epsilon);
        cc.epsilon_scale = s.number("epsilon_scale", cc.epsilon_scale);
        cc.max_iters = s.integer("max_iters", cc.max_iters);
        cc.tol = s.number("tol", cc.tol);
        cc.log_domain = s.boolean("log_domain", cc.log_domain);
        cc.include_mmd = s.boolean("include_mmd", cc.include_mmd);
        c.record_runtime = s.boolean("record_runtime", c.record_runtime);
        cc.train = c.train;
        cc.train.epochs = s.integer("epochs", c.train.epochs);
        if (cc.source_mean.size() != cc.target_mean.size() || cc.source_mean.empty())
            s.fail("target_mean", "must have the same dimension as source_mean");
        cc.train.shape.widths.front() = cc.source_mean.size();
        cc.train.shape.widths.back() = cc.source_mean.size();
        s.check("", [&] { cc.validate(); });
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path, const std::vector<std::string>& overrides)
{
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const InputError&) {
        throw InputError("config: cannot read " + path.string());
    }
    json doc = json::parse(text, nullptr, false, true);
    if (doc.is_discarded())
        throw InputError("config: " + path.string() + " is not valid JSON");
    for (const auto& o : overrides)
        apply_override(doc, o);
    return parse_run_config(doc);
}

std::string config_reference()
{
    return R"(Configuration file (JSON; every key optional, defaults shown):
  label                  "run"          run name
  output_dir             "out"          artifact directory
  source / target        dataset blocks:
    family               "gaussian"     gaussian | moons | circles
    n                    500            number of training points
    noise                0.05           moons/circles jitter SD
    factor               0.5            circles inner radius, in (0,1)
    mean                 [0,0] / [5,5]  gaussian mean (sets the dimension)
    variance             1.0            gaussian per-coordinate variance
    seed                 1 / 2          RNG seed
  test.n                 1000           held-out evaluation points
  test.source_seed       source.seed+1000
  test.target_seed       target.seed+1000
  kernel.family          "gaussian"     gaussian | matern
  kernel.alpha           1.0            gaussian exp(-alpha |x-y|^2)
  kernel.order           "3/2"          matern order: 1/2 | 3/2 | 5/2
  kernel.lengthscale     1.0            matern lengthscale
  cost                   "squared_euclidean"
  train.epochs           3000           full passes over the data
  train.batch_size       100            M; equal to n gives full-batch iteration
  train.inv_lambda       1e-6           1/lambda, weight of the transport cost
  train.hidden           [64]           hidden-layer widths
  train.activation       "relu"         relu | tanh | identity (hidden layers)
  train.seed             0              init and shuffle seed
  train.shuffle          true           reshuffle batches every epoch
  train.checkpoint_every 0              also write artifacts every k epochs
  train.adam.lr          1e-4
  train.adam.beta1       0.9
  train.adam.beta2       0.999
  train.adam.eps         1e-8
  compare.sizes          [200,1000,2000]
  compare.max_size       5000           refuse larger sizes (O(n^2) memory)
  compare.source_mean    [0,0]
  compare.target_mean    [5,5]
  compare.variance       1.0
  compare.source_seed    11
  compare.target_seed    12
  compare.epsilon        0              fixed epsilon; <= 0 uses epsilon_scale * median cost
  compare.epsilon_scale  0.1
  compare.max_iters      10000
  compare.tol            1e-9           marginal violation stopping tolerance
  compare.log_domain     true           false: plain scaling with log-domain fallback
  compare.include_mmd    true           also train the MMD map at each size
  compare.epochs         train.epochs   epochs for the MMD map in the comparison
  compare.record_runtime true           false writes 0 in runtime_seconds
Scalar keys can be overridden on the command line with --set key.path=value.
)";
}

LossHistory history_from_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "epoch,objective,mmd2,cost")
        throw InputError("loss csv: missing header");
    LossHistory h;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(row, cell, ','))
            vals.push_back(std::strtod(cell.c_str(), nullptr));
        if (vals.size() != 4 || static_cast<std::size_t>(vals[0]) != h.size() + 1)
            throw InputError("loss csv: malformed row " + std::to_string(h.size() + 1));
        h.push_back({vals[1], vals[2], vals[3]});
    }
    return h;
}

namespace {

struct HeldOut {
    SampleSet source;
    SampleSet target;
};

HeldOut held_out(const RunConfig& c)
{
    DatasetSpec s = c.source;
    s.n = c.test_n;
    s.seed = c.test_source_seed;
    DatasetSpec t = c.target;
    t.n = c.test_n;
    t.seed = c.test_target_seed;
    return {generate(s), generate(t)};
}

void write_train_outputs(const RunConfig& c, const Trainer& trainer)
{
    io::atomic_write(c.output_dir / "loss.csv", history_to_csv(trainer.history()));
    save_checkpoint(c.output_dir / "model.ckpt", trainer.checkpoint());
}

} // namespace

TrainArtifacts run_train_pipeline(const RunConfig& config, bool resume)
{
    const SampleSet source = generate(config.source);
    const SampleSet target = generate(config.target);

    Trainer trainer = [&] {
        if (!resume)
            return Trainer(config.train, source, target);
        TrainCheckpoint ckpt = load_checkpoint(config.output_dir / "model.ckpt");
        LossHistory hist = history_from_csv(io::read_file(config.output_dir / "loss.csv"));
        if (hist.size() != ckpt.epoch)
            throw InputError("resume: loss.csv has " + std::to_string(hist.size()) +
                             " epochs but the checkpoint is at epoch " + std::to_string(ckpt.epoch));
        return Trainer::resume(config.train, source, target, std::move(ckpt), std::move(hist));
    }();

    while (trainer.epoch() < config.train.epochs) {
        trainer.run_epoch();
        if (config.checkpoint_every > 0 && trainer.epoch() % config.checkpoint_every == 0 &&
            trainer.epoch() < config.train.epochs)
            write_train_outputs(config, trainer);
    }
    write_train_outputs(config, trainer);

    const HeldOut test = held_out(config);
    TrainArtifacts out;
    out.result = trainer.result();
    out.report = evaluate(out.result.params, test.source, test.target, config.train.kernel,
                          config.train.cost);
    out.loss_csv = config.output_dir / "loss.csv";
    out.checkpoint = config.output_dir / "model.ckpt";
    out.eval_json = config.output_dir / "eval.json";
    io::atomic_write(out.eval_json, report_to_json(out.report));
    write_csv(config.output_dir / "pushforward.csv", mlp_forward_batch(out.result.params, test.source));
    write_csv(config.output_dir / "target_test.csv", test.target);
    return out;
}

std::filesystem::path run_compare_pipeline(const RunConfig& config)
{
    const auto rows = compare_runs(config.compare);
    const auto path = config.output_dir / "compare.csv";
    io::atomic_write(path, compare_to_csv(rows, config.record_runtime));
    return path;
}

} // namespace mongemmd
