#ifndef MCSVM_LEARNER_HPP
#define MCSVM_LEARNER_HPP

#include <string>
#include <vector>

#include "mcsvm/robust_cluster.hpp"
#include "mcsvm/types.hpp"

namespace mcsvm {

struct OptConfig {
    int max_iters = 2000;
    double tolerance = 1e-7;  // minimum per-sample improvement that resets patience
    int patience = 150;
    double step0 = 0.0;  // 0 -> auto: gamma / max_i ||x_i||
};

struct LearnConfig {
    double gamma = 1.0;
    double alpha = 0.25;
    ClusterConfig cluster_cfg;
    OptConfig opt;
};

struct LearnReport {
    std::vector<std::size_t> cluster_sizes_before;  // per cluster, pre majority pruning
    std::vector<std::size_t> cluster_sizes_after;
    std::vector<std::size_t> merged_sizes;          // |B_j| per class
    std::vector<int> kept_indices;                  // indices of S forming S-hat, ascending
    double objective = 0.0;
    int iterations = 0;
    bool fallback = false;  // clustering produced nothing; optimized on raw S
    std::vector<std::string> warnings;

    std::string to_text() const;
};

// Keeps exactly the points whose label is the cluster majority (ties toward
// the smallest label index).
Cluster majority_label_prune(const Cluster& B, const LabeledSet& S);

// Groups majority-pruned clusters by their unanimous label; classes with no
// cluster get an empty set and a warning on the report.
std::vector<std::vector<int>> merge_by_label(const std::vector<Cluster>& clusters,
                                             const LabeledSet& S, int k,
                                             LearnReport* report = nullptr);

// Projected subgradient minimization of the summed hinge loss over the unit
// ball. Returns the best-objective iterate; `objective` (if given) receives
// an exact recomputation of the hinge loss at the returned point.
WeightMatrix minimize_hinge(const LabeledSet& S_hat, double gamma, int k, int d,
                            const OptConfig& opt, double* objective = nullptr,
                            int* iterations = nullptr);

// Full pipeline: cluster, majority-prune, merge by label, minimize hinge.
std::pair<WeightMatrix, LearnReport> learn(const LabeledSet& S, const LearnConfig& cfg);

}  // namespace mcsvm

#endif
