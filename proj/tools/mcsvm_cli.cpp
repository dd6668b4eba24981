// Command-line harness: generate, corrupt, learn, evaluate, and run full
// seeded experiments over margin-separated mixtures under nasty noise.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "mcsvm/adversary.hpp"
#include "mcsvm/core_model.hpp"
#include "mcsvm/data_gen.hpp"
#include "mcsvm/errors.hpp"
#include "mcsvm/harness.hpp"
#include "mcsvm/learner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumeric = 4;

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multiclass linear classification under nasty noise"};
    app.require_subcommand(1);

    std::string config_path, in_path, out_path, truth_path, model_path, report_path, mask_path;
    std::uint64_t seed_override = 0;
    bool seed_set = false;
    int eval_m = 100000;
    std::string etas_csv, ns_csv, gammas_csv;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed_override, "override config seed")
            ->each([&](const std::string&) { seed_set = true; });
    };

    auto* gen = app.add_subcommand("gen", "generate a clean labeled sample");
    gen->add_option("--config", config_path, "experiment config file")->required();
    gen->add_option("--out", out_path, "labeled-set output path")->required();
    gen->add_option("--truth", truth_path, "ground-truth output path");
    add_seed(gen);

    auto* cor = app.add_subcommand("corrupt", "apply an attack strategy to a labeled set");
    cor->add_option("--config", config_path, "experiment config file")->required();
    cor->add_option("--in", in_path, "labeled-set input path")->required();
    cor->add_option("--truth", truth_path, "ground-truth input path")->required();
    cor->add_option("--out", out_path, "corrupted labeled-set output path")->required();
    cor->add_option("--mask", mask_path, "dirty-mask output path (one 0/1 per line)");
    add_seed(cor);

    auto* lrn = app.add_subcommand("learn", "learn a classifier from a labeled-set file");
    lrn->add_option("--config", config_path, "experiment config file")->required();
    lrn->add_option("--in", in_path, "labeled-set input path")->required();
    lrn->add_option("--out", model_path, "model output path")->required();
    lrn->add_option("--report", report_path, "learn-report output path");

    auto* evl = app.add_subcommand("eval", "estimate the error of a model file");
    evl->add_option("--model", model_path, "model input path")->required();
    evl->add_option("--truth", truth_path, "ground-truth input path")->required();
    evl->add_option("--m", eval_m, "Monte-Carlo draws");
    std::uint64_t eval_seed = 12345;
    evl->add_option("--seed", eval_seed, "evaluation seed");

    auto* run = app.add_subcommand("run", "run a full experiment from a config file");
    run->add_option("--config", config_path, "experiment config file")->required();
    run->add_option("--out", out_path, "CSV output path");
    add_seed(run);

    auto* swp = app.add_subcommand("sweep", "grid over eta, n, gamma");
    swp->add_option("--config", config_path, "experiment config file")->required();
    swp->add_option("--out", out_path, "CSV output path")->required();
    swp->add_option("--etas", etas_csv, "comma-separated eta grid");
    swp->add_option("--ns", ns_csv, "comma-separated n grid");
    swp->add_option("--gammas", gammas_csv, "comma-separated gamma grid");
    add_seed(swp);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitInvalidConfig;
    }

    try {
        auto load_cfg = [&] {
            auto cfg = mcsvm::parse_config_file(config_path);
            if (seed_set) cfg.seed = seed_override;
            for (const auto& v : cfg.regime_violations())
                std::cerr << "warning: outside guarantee regime: " << v << "\n";
            return cfg;
        };

        if (gen->parsed()) {
            auto cfg = load_cfg();
            auto gt = mcsvm::make_trial_ground_truth(cfg, 0);
            auto clean = mcsvm::make_trial_clean(cfg, gt, 0);
            mcsvm::save_labeled_set(clean, out_path);
            if (!truth_path.empty()) mcsvm::save_ground_truth(gt, truth_path);
            std::cerr << "wrote " << clean.size() << " points (rejection rate "
                      << clean.rejection_rate << ")\n";
        } else if (cor->parsed()) {
            auto cfg = load_cfg();
            auto gt = mcsvm::load_ground_truth(truth_path);
            auto clean = mcsvm::load_labeled_set(in_path);
            mcsvm::AttackConfig attack{cfg.eta, cfg.strategy, mcsvm::trial_seed(cfg, 0, 2)};
            auto res = mcsvm::corrupt(clean, gt, attack);
            mcsvm::save_labeled_set(res.corrupted, out_path);
            if (!mask_path.empty()) {
                std::ofstream mf(mask_path);
                if (!mf) throw std::runtime_error("cannot open mask output: " + mask_path);
                for (auto b : res.dirty_mask) mf << int(b) << "\n";
            }
        } else if (lrn->parsed()) {
            auto cfg = load_cfg();
            auto S = mcsvm::load_labeled_set(in_path);
            auto [w, report] = mcsvm::learn(S, cfg.learn_config());
            mcsvm::save_model(w, model_path);
            if (!report_path.empty()) {
                std::ofstream rf(report_path);
                if (!rf) throw std::runtime_error("cannot open report output: " + report_path);
                rf << report.to_text();
            }
        } else if (evl->parsed()) {
            auto w = mcsvm::load_model(model_path);
            auto gt = mcsvm::load_ground_truth(truth_path);
            auto est = mcsvm::measure_error(w, gt, eval_m, eval_seed);
            std::cout << "err_hat=" << est.err << " ci_halfwidth=" << est.ci_halfwidth << "\n";
        } else if (run->parsed()) {
            auto cfg = load_cfg();
            if (!out_path.empty()) cfg.output = out_path;
            auto results = mcsvm::run_experiment(cfg);
            std::cerr << "wrote " << results.size() << " trial rows\n";
        } else if (swp->parsed()) {
            auto base = load_cfg();
            std::vector<double> etas = etas_csv.empty() ? std::vector<double>{base.eta} : parse_list(etas_csv);
            std::vector<double> ns = ns_csv.empty() ? std::vector<double>{double(base.n)} : parse_list(ns_csv);
            std::vector<double> gammas =
                gammas_csv.empty() ? std::vector<double>{base.gamma} : parse_list(gammas_csv);
            std::ofstream f(out_path);
            if (!f) throw std::runtime_error("cannot open output: " + out_path);
            f << mcsvm::kCsvHeader << "\n";
            for (double eta : etas)
                for (double nv : ns)
                    for (double g : gammas) {
                        auto cfg = base;
                        cfg.eta = eta;
                        cfg.n = static_cast<int>(nv);
                        cfg.gamma = g;
                        cfg.validate();
                        std::ostringstream sink;
                        auto results = mcsvm::run_experiment(cfg, sink);
                        for (const auto& r : results) mcsvm::write_csv_row(f, cfg, r);
                    }
        }
    } catch (const mcsvm::InfeasibleConfigError& e) {
        std::cerr << "infeasible config: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const mcsvm::NumericFailure& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalidConfig;
    }
    return kExitOk;
}
