// mongemmd: train neural Monge maps with an MMD pushforward penalty.
//
//   mongemmd generate --family moons --n 500 --seed 1 --out moons.csv
//   mongemmd train configs/gauss_to_gauss.json
//   mongemmd eval --checkpoint out/model.ckpt --source src.csv --target tgt.csv --out eval.json
//   mongemmd compare configs/compare.json
//
// Exit codes: 0 success, 2 usage/config/input error, 3 numeric failure.

#include "mongemmd/binary_io.hpp"
#include "mongemmd/config.hpp"
#include "mongemmd/data.hpp"
#include "mongemmd/error.hpp"
#include "mongemmd/eval.hpp"
#include "mongemmd/train.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;

mongemmd::Point parse_point(const std::string& text)
{
    mongemmd::Point p;
    std::istringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(cell, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != cell.size() || cell.empty())
            throw mongemmd::InputError("--mean: cannot parse '" + text + "' as comma-separated numbers");
        p.push_back(v);
    }
    return p;
}

} // namespace

int main(int argc, char** argv)
{
    using namespace mongemmd;

    CLI::App app{"Neural Monge maps trained with an MMD pushforward penalty"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Write a synthetic point cloud as CSV (header x0,x1,...)");
    std::string family = "gaussian";
    DatasetSpec gen_spec;
    std::string mean_text = "0,0";
    std::string gen_out;
    gen->add_option("--family", family, "moons | circles | gaussian")->capture_default_str();
    gen->add_option("--n", gen_spec.n, "number of points")->capture_default_str();
    gen->add_option("--noise", gen_spec.noise, "moons/circles jitter SD")->capture_default_str();
    gen->add_option("--factor", gen_spec.factor, "circles inner radius in (0,1)")->capture_default_str();
    gen->add_option("--mean", mean_text, "gaussian mean, comma separated")->capture_default_str();
    gen->add_option("--variance", gen_spec.variance, "gaussian variance")->capture_default_str();
    gen->add_option("--seed", gen_spec.seed, "RNG seed")->capture_default_str();
    gen->add_option("--out", gen_out, "output CSV path")->required();

    // train
    auto* tr = app.add_subcommand("train", "Train a transport map; writes loss.csv, model.ckpt, eval.json");
    std::string train_cfg;
    std::vector<std::string> train_sets;
    bool resume = false;
    tr->add_option("config", train_cfg, "JSON run configuration")->required();
    tr->add_option("--set", train_sets, "override a config key: key.path=value (repeatable)");
    tr->add_flag("--resume", resume, "continue from model.ckpt and loss.csv in output_dir");
    tr->footer(config_reference());

    // eval
    auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on CSV point clouds; writes eval JSON");
    std::string ckpt_path, src_csv, tgt_csv, eval_out = "eval.json";
    std::string kernel_family = "gaussian";
    double alpha = 1.0;
    std::string matern_order = "3/2";
    double lengthscale = 1.0;
    ev->add_option("--checkpoint", ckpt_path, "model.ckpt written by train")->required();
    ev->add_option("--source", src_csv, "source test points (CSV)")->required();
    ev->add_option("--target", tgt_csv, "target test points (CSV)")->required();
    ev->add_option("--out", eval_out, "report path")->capture_default_str();
    ev->add_option("--kernel", kernel_family, "gaussian | matern")->capture_default_str();
    ev->add_option("--alpha", alpha, "gaussian kernel alpha")->capture_default_str();
    ev->add_option("--order", matern_order, "matern order 1/2 | 3/2 | 5/2")->capture_default_str();
    ev->add_option("--lengthscale", lengthscale, "matern lengthscale")->capture_default_str();

    // compare
    auto* cmp = app.add_subcommand("compare", "Sinkhorn baseline vs MMD map on the Gaussian task; writes compare.csv");
    std::string cmp_cfg;
    std::vector<std::string> cmp_sets;
    cmp->add_option("config", cmp_cfg, "JSON run configuration (compare.* keys)")->required();
    cmp->add_option("--set", cmp_sets, "override a config key: key.path=value (repeatable)");
    cmp->footer(config_reference());

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*gen) {
            gen_spec.family = parse_dataset_family(family);
            gen_spec.mean = parse_point(mean_text);
            const SampleSet pts = generate(gen_spec);
            write_csv(gen_out, pts);
            std::cout << "wrote " << pts.size() << " rows to " << gen_out << "\n";
        } else if (*tr) {
            const RunConfig cfg = load_run_config(train_cfg, train_sets);
            const TrainArtifacts art = run_train_pipeline(cfg, resume);
            const EvalReport& r = art.report;
            std::cout << cfg.label << ": " << art.result.history.size() << " epochs\n";
            if (!art.result.history.empty()) {
                const auto& last = art.result.history.back();
                std::cout << "final objective " << last.objective << ", mmd2 " << last.mmd2
                          << ", cost " << last.cost << "\n";
            }
            std::cout << "test pushforward mean (";
            for (std::size_t k = 0; k < r.mean.size(); ++k)
                std::cout << (k ? ", " : "") << r.mean[k];
            std::cout << "), sd (";
            for (std::size_t k = 0; k < r.sd.size(); ++k)
                std::cout << (k ? ", " : "") << r.sd[k];
            std::cout << "), cost " << r.transport_cost << ", mmd2 " << r.mmd2 << "\n";
            std::cout << "artifacts in " << cfg.output_dir.string() << "\n";
        } else if (*ev) {
            KernelSpec kernel = kernel_family == "matern"
                                    ? KernelSpec::matern(parse_matern_order(matern_order), lengthscale)
                                    : KernelSpec::gaussian(alpha);
            if (kernel_family != "gaussian" && kernel_family != "matern")
                throw InputError("--kernel: expected gaussian or matern");
            const TrainCheckpoint ckpt = load_checkpoint(ckpt_path);
            const SampleSet source = read_csv(src_csv);
            const SampleSet target = read_csv(tgt_csv);
            const EvalReport report = evaluate(ckpt.params, source, target, kernel);
            io::atomic_write(eval_out, report_to_json(report));
            std::cout << "wrote " << eval_out << "\n";
        } else if (*cmp) {
            const RunConfig cfg = load_run_config(cmp_cfg, cmp_sets);
            const auto path = run_compare_pipeline(cfg);
            std::cout << io::read_file(path);
        }
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return 0;
}
