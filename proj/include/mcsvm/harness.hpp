#ifndef MCSVM_HARNESS_HPP
#define MCSVM_HARNESS_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcsvm/adversary.hpp"
#include "mcsvm/data_gen.hpp"
#include "mcsvm/learner.hpp"
#include "mcsvm/types.hpp"

namespace mcsvm {

struct ExperimentConfig {
    int k = 3;
    int d = 8;
    int n = 6000;
    double epsilon = 0.05;
    double delta = 0.05;
    double eta = 0.0;
    Strategy strategy = Strategy::none;
    double gamma = 0.5;
    double sigma = 0.05;
    double alpha = 1.0 / 3.0;
    double C = 2.0;
    Shape shape = Shape::gaussian;
    double nu = 4.0;
    int trials = 1;
    std::uint64_t seed = 1;
    std::string output;

    // tuning / plumbing
    int eval_m = 100000;
    int threads = 1;
    double admit_factor = 0.0;       // 0 -> calibrated default 2*C
    double dist_prune_factor = 0.0;  // 0 -> calibrated default C
    int opt_max_iters = 2000;
    int opt_patience = 150;
    double opt_tolerance = 1e-7;

    void validate() const;
    // non-fatal theorem-precondition checks; returns the list of violations
    std::vector<std::string> regime_violations() const;
    bool in_regime() const { return regime_violations().empty(); }

    ClusterConfig cluster_config() const;
    LearnConfig learn_config() const;
};

// Flat "key = value" document with '#' comments; unknown keys are errors.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);
void apply_config_line(ExperimentConfig& cfg, const std::string& line);

struct ErrorEstimate {
    double err = 0.0;
    double ci_halfwidth = 0.0;  // 95% binomial
};

// Monte-Carlo estimate of Pr(predict(w_hat, x) != predict(w*, x)) on m fresh
// clean draws.
ErrorEstimate measure_error(const WeightMatrix& w_hat, const GroundTruth& gt, int m,
                            std::uint64_t seed);

struct PancakeDensityResult {
    std::vector<double> rho_hat;  // per center
    double beta_hat = 0.0;        // fraction of centers with rho_hat < rho_threshold
};

PancakeDensityResult pancake_density(const LabeledSet& S_ref, const WeightMatrix& w, double tau,
                                     const LabeledSet& centers, double rho_threshold);

struct TrialResult {
    int trial = 0;
    std::uint64_t seed = 0;
    double err_hat = 0.0;
    double ci_halfwidth = 0.0;
    double objective = 0.0;
    int n_pruned = 0;
    double clean_retained_frac = 0.0;
    double dirty_surviving_frac = 0.0;
    bool fallback = false;
    long wallclock_ms = 0;
};

// Seed derivation for trial stages; documented so pipelines can reproduce a
// trial bit-exactly: stage 0 = ground truth, 1 = clean sample, 2 = attack,
// 3 = evaluation.
std::uint64_t trial_seed(const ExperimentConfig& cfg, int trial, int stage);

// Ground truth and clean sample of one trial (the same objects run_experiment
// uses), exposed for the CLI `gen` path.
GroundTruth make_trial_ground_truth(const ExperimentConfig& cfg, int trial);
LabeledSet make_trial_clean(const ExperimentConfig& cfg, const GroundTruth& gt, int trial);

TrialResult run_trial(const ExperimentConfig& cfg, int trial);

extern const char* const kCsvHeader;
void write_csv_row(std::ostream& out, const ExperimentConfig& cfg, const TrialResult& r);

// Runs all trials (worker pool of cfg.threads; results collected in trial
// order) and writes one CSV row per trial to cfg.output when set.
std::vector<TrialResult> run_experiment(const ExperimentConfig& cfg);
std::vector<TrialResult> run_experiment(const ExperimentConfig& cfg, std::ostream& csv);

}  // namespace mcsvm

#endif
