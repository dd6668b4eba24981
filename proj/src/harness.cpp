#include "mcsvm/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "mcsvm/core_model.hpp"
#include "mcsvm/errors.hpp"
#include "mcsvm/rng.hpp"

namespace mcsvm {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

void ExperimentConfig::validate() const {
    if (epsilon <= 0.0 || epsilon >= 1.0) throw std::invalid_argument("config: epsilon must be in (0,1)");
    if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("config: delta must be in (0,1)");
    if (n < 1) throw std::invalid_argument("config: n must be >= 1");
    if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (eta < 0.0 || eta >= 1.0) throw std::invalid_argument("config: eta must be in [0,1)");
    if (k < 2) throw std::invalid_argument("config: k must be >= 2");
    if (d < k) throw std::invalid_argument("config: d must be >= k");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    if (eval_m < 1) throw std::invalid_argument("config: eval_m must be >= 1");
    if (gamma <= 0.0 || sigma < 0.0) throw std::invalid_argument("config: gamma > 0, sigma >= 0 required");
    if (alpha <= 0.0 || alpha > 1.0 / k + 1e-12)
        throw std::invalid_argument("config: alpha must be in (0, 1/k]");
}

std::vector<std::string> ExperimentConfig::regime_violations() const {
    std::vector<std::string> v;
    const double tau = shape == Shape::student_t
                           ? 2.0 * sigma * std::sqrt(static_cast<double>(k) / epsilon)
                           : 2.0 * sigma * (std::log(static_cast<double>(k) / epsilon) + 1.0);
    if (gamma <= std::max(4.0 * tau, 4.0 * C * sigma))
        v.push_back("gamma <= max(4*tau, 4*C*sigma)");
    if (eta > 1.0 / (4096.0 * k * k)) v.push_back("eta > 1/(2^12 k^2)");
    if (alpha < 0.6 / k - 1e-12 || alpha > 1.0 / k + 1e-12) v.push_back("alpha outside [0.6/k, 1/k]");
    return v;
}

ClusterConfig ExperimentConfig::cluster_config() const {
    ClusterConfig cc = ClusterConfig::calibrated(alpha, C);
    if (admit_factor > 0.0) cc.admit_factor = admit_factor;
    if (dist_prune_factor > 0.0) cc.dist_prune_factor = dist_prune_factor;
    return cc;
}

LearnConfig ExperimentConfig::learn_config() const {
    LearnConfig lc;
    lc.gamma = gamma;
    lc.alpha = alpha;
    lc.cluster_cfg = cluster_config();
    lc.opt.max_iters = opt_max_iters;
    lc.opt.patience = opt_patience;
    lc.opt.tolerance = opt_tolerance;
    return lc;
}

void apply_config_line(ExperimentConfig& cfg, const std::string& raw) {
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) return;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config: malformed line: " + raw);
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty()) throw std::invalid_argument("config: malformed line: " + raw);

    if (key == "k") cfg.k = std::stoi(val);
    else if (key == "d") cfg.d = std::stoi(val);
    else if (key == "n") cfg.n = std::stoi(val);
    else if (key == "epsilon") cfg.epsilon = std::stod(val);
    else if (key == "delta") cfg.delta = std::stod(val);
    else if (key == "eta") cfg.eta = std::stod(val);
    else if (key == "strategy") cfg.strategy = strategy_from_string(val);
    else if (key == "gamma") cfg.gamma = std::stod(val);
    else if (key == "sigma") cfg.sigma = std::stod(val);
    else if (key == "alpha") cfg.alpha = std::stod(val);
    else if (key == "C") cfg.C = std::stod(val);
    else if (key == "shape") cfg.shape = shape_from_string(val);
    else if (key == "nu") cfg.nu = std::stod(val);
    else if (key == "trials") cfg.trials = std::stoi(val);
    else if (key == "seed") cfg.seed = std::stoull(val);
    else if (key == "output") cfg.output = val;
    else if (key == "eval_m") cfg.eval_m = std::stoi(val);
    else if (key == "threads") cfg.threads = std::stoi(val);
    else if (key == "admit_factor") cfg.admit_factor = std::stod(val);
    else if (key == "dist_prune_factor") cfg.dist_prune_factor = std::stod(val);
    else if (key == "opt_max_iters") cfg.opt_max_iters = std::stoi(val);
    else if (key == "opt_patience") cfg.opt_patience = std::stoi(val);
    else if (key == "opt_tolerance") cfg.opt_tolerance = std::stod(val);
    else throw std::invalid_argument("config: unknown key: " + key);
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    while (std::getline(in, line)) apply_config_line(cfg, line);
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config: cannot open file: " + path);
    return parse_config(f);
}

ErrorEstimate measure_error(const WeightMatrix& w_hat, const GroundTruth& gt, int m,
                            std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("measure_error: m must be >= 1");
    LabeledSet fresh = sample_clean(gt, m, seed);
    long wrong = 0;
    for (int i = 0; i < m; ++i)
        if (predict(w_hat, fresh.x(i)) != fresh.label(i)) ++wrong;
    ErrorEstimate est;
    est.err = static_cast<double>(wrong) / m;
    est.ci_halfwidth = 1.96 * std::sqrt(est.err * (1.0 - est.err) / m);
    return est;
}

PancakeDensityResult pancake_density(const LabeledSet& S_ref, const WeightMatrix& w, double tau,
                                     const LabeledSet& centers, double rho_threshold) {
    if (tau <= 0.0) throw std::invalid_argument("pancake_density: tau must be positive");
    const auto Xref = S_ref.features();
    Matrix proj_ref = Xref * w.raw().transpose();  // n_ref x k
    PancakeDensityResult res;
    res.rho_hat.reserve(static_cast<std::size_t>(centers.size()));
    int low = 0;
    for (int c = 0; c < centers.size(); ++c) {
        Vector pc = w.raw() * centers.x(c);
        const int label = centers.label(c);
        int inside = 0;
        for (int i = 0; i < S_ref.size(); ++i) {
            if (S_ref.label(i) != label) continue;
            if ((proj_ref.row(i).transpose() - pc).cwiseAbs().maxCoeff() <= tau) ++inside;
        }
        const double rho = static_cast<double>(inside) / S_ref.size();
        if (rho < rho_threshold) ++low;
        res.rho_hat.push_back(rho);
    }
    res.beta_hat = centers.size() > 0 ? static_cast<double>(low) / centers.size() : 0.0;
    return res;
}

std::uint64_t trial_seed(const ExperimentConfig& cfg, int trial, int stage) {
    return derive_seed(derive_seed(cfg.seed, static_cast<std::uint64_t>(trial)),
                       static_cast<std::uint64_t>(stage));
}

GroundTruth make_trial_ground_truth(const ExperimentConfig& cfg, int trial) {
    return make_ground_truth(cfg.k, cfg.d, cfg.gamma, cfg.sigma, cfg.C, cfg.alpha,
                             trial_seed(cfg, trial, 0), cfg.shape, cfg.nu);
}

LabeledSet make_trial_clean(const ExperimentConfig& cfg, const GroundTruth& gt, int trial) {
    return sample_clean(gt, cfg.n, trial_seed(cfg, trial, 1));
}

TrialResult run_trial(const ExperimentConfig& cfg, int trial) {
    const auto t0 = std::chrono::steady_clock::now();

    GroundTruth gt = make_trial_ground_truth(cfg, trial);
    LabeledSet clean = make_trial_clean(cfg, gt, trial);
    AttackConfig attack{cfg.eta, cfg.strategy, trial_seed(cfg, trial, 2)};
    CorruptionResult corr = corrupt(clean, gt, attack);

    auto [w, report] = learn(corr.corrupted, cfg.learn_config());
    ErrorEstimate est = measure_error(w, gt, cfg.eval_m, trial_seed(cfg, trial, 3));

    long n_dirty = 0;
    for (auto b : corr.dirty_mask) n_dirty += b;
    long clean_kept = 0, dirty_kept = 0;
    for (int i : report.kept_indices)
        (corr.dirty_mask[static_cast<std::size_t>(i)] ? dirty_kept : clean_kept) += 1;

    TrialResult r;
    r.trial = trial;
    r.seed = trial_seed(cfg, trial, 0);
    r.err_hat = est.err;
    r.ci_halfwidth = est.ci_halfwidth;
    r.objective = report.objective;
    r.n_pruned = cfg.n - static_cast<int>(report.kept_indices.size());
    r.clean_retained_frac =
        cfg.n > n_dirty ? static_cast<double>(clean_kept) / static_cast<double>(cfg.n - n_dirty) : 0.0;
    r.dirty_surviving_frac =
        n_dirty > 0 ? static_cast<double>(dirty_kept) / static_cast<double>(n_dirty) : 0.0;
    r.fallback = report.fallback;
    r.wallclock_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    return r;
}

const char* const kCsvHeader =
    "trial,seed,k,d,n,eta,strategy,gamma,sigma,alpha,C,err_hat,ci_halfwidth,objective,"
    "n_pruned,clean_retained_frac,dirty_surviving_frac,fallback,wallclock_ms,in_regime";

void write_csv_row(std::ostream& out, const ExperimentConfig& cfg, const TrialResult& r) {
    out << r.trial << "," << r.seed << "," << cfg.k << "," << cfg.d << "," << cfg.n << ","
        << fmt(cfg.eta) << "," << to_string(cfg.strategy) << "," << fmt(cfg.gamma) << ","
        << fmt(cfg.sigma) << "," << fmt(cfg.alpha) << "," << fmt(cfg.C) << "," << fmt(r.err_hat)
        << "," << fmt(r.ci_halfwidth) << "," << fmt(r.objective) << "," << r.n_pruned << ","
        << fmt(r.clean_retained_frac) << "," << fmt(r.dirty_surviving_frac) << ","
        << (r.fallback ? 1 : 0) << "," << r.wallclock_ms << "," << (cfg.in_regime() ? 1 : 0)
        << "\n";
}

std::vector<TrialResult> run_experiment(const ExperimentConfig& cfg, std::ostream& csv) {
    cfg.validate();
    std::vector<TrialResult> results(static_cast<std::size_t>(cfg.trials));
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(cfg.trials));
    std::atomic<int> next{0};

    auto worker = [&] {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= cfg.trials) return;
            try {
                results[static_cast<std::size_t>(t)] = run_trial(cfg, t);
            } catch (...) {
                failures[static_cast<std::size_t>(t)] = std::current_exception();
            }
        }
    };
    if (cfg.threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < cfg.threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (int t = 0; t < cfg.trials; ++t)
        if (failures[static_cast<std::size_t>(t)]) {
            try {
                std::rethrow_exception(failures[static_cast<std::size_t>(t)]);
            } catch (const InfeasibleConfigError& e) {
                throw InfeasibleConfigError("trial " + std::to_string(t) + ": " + e.what());
            } catch (const NumericFailure& e) {
                throw NumericFailure("trial " + std::to_string(t) + ": " + e.what());
            }
        }

    csv << kCsvHeader << "\n";
    for (const auto& r : results) write_csv_row(csv, cfg, r);
    return results;
}

std::vector<TrialResult> run_experiment(const ExperimentConfig& cfg) {
    if (cfg.output.empty()) {
        std::ostringstream sink;
        return run_experiment(cfg, sink);
    }
    std::ofstream f(cfg.output);
    if (!f) throw std::runtime_error("run_experiment: cannot open output: " + cfg.output);
    return run_experiment(cfg, f);
}

}  // namespace mcsvm
