#ifndef MCSVM_ROBUST_CLUSTER_HPP
#define MCSVM_ROBUST_CLUSTER_HPP

#include <string>
#include <vector>

#include "mcsvm/types.hpp"

namespace mcsvm {

struct ClusterConfig {
    double alpha = 0.25;  // known mixing-weight floor, in (0, 1)
    double C = 2.0;       // universal constant of the guarantees
    int max_filter_iters = 200;
    int kyfan_rank_cap = 64;

    // Admission dedup radius factor: a new candidate mean is admitted only if
    // it is farther than admit_factor * C * sigma_hat / sqrt(alpha) from every
    // already-admitted one. 99 is the literal constant of the source
    // algorithm; it presumes a very large C, so desk-scale configs set a
    // smaller value (see calibrated()).
    double admit_factor = 99.0;

    // Distance-prune threshold factor: cells whose empirical means are within
    // dist_prune_factor * C * (sigma_1 + sigma_2) / sqrt(alpha) are merged.
    // 4761 is the literal constant; same caveat as admit_factor.
    double dist_prune_factor = 4761.0;

    int subsample_stdevs = 2000;
    int subsample_means = 4000;

    // Factors consistent with the separation premise
    // ||mu_i - mu_j|| > C^2 (sigma_i + sigma_j) / sqrt(alpha) at moderate C:
    // admission radius 2*C^2*sigma_hat/sqrt(alpha) and prune threshold
    // C^2 (s1 + s2)/sqrt(alpha), so true components that meet the premise are
    // never merged while duplicate candidates on one component are.
    static ClusterConfig calibrated(double alpha, double C = 2.0) {
        ClusterConfig cfg;
        cfg.alpha = alpha;
        cfg.C = C;
        cfg.admit_factor = 2.0 * C;
        cfg.dist_prune_factor = C;
        return cfg;
    }

    void validate() const;
};

// Candidate mean together with the scale that admitted it.
struct ScaledMean {
    Vector mu;
    double sigma_hat = 0.0;
};

struct Cluster {
    std::vector<int> indices;  // into the input set
    Vector center;             // candidate mean the cell was assigned to
    Vector emp_mean;
    double emp_sigma = 0.0;    // sqrt of top eigenvalue of the cell covariance
    double sigma_hat = 0.0;    // scale recorded for the candidate
};

struct CandidateList {
    std::vector<double> stdevs;          // L_stdev, strictly increasing
    std::vector<Vector> means;           // all neighborhood candidates considered
    std::vector<ScaledMean> admitted;    // L after feasibility admission
    std::vector<ScaledMean> survivors;   // L'' after both prunes
};

struct ClusterDiagnostics {
    CandidateList candidates;
    std::vector<std::string> feasibility_log;
    std::vector<std::string> prune_log;
    std::vector<std::string> warnings;

    std::string report() const;
};

// Step 1: geometric grid (ratio 2) spanning the [q0.01, q0.99] range of
// pairwise distances on a subsample, divided by sqrt(d).
std::vector<double> candidate_stdevs(const LabeledSet& S, const ClusterConfig& cfg);

// Step 2 substitute for list-decodable mean estimation: neighborhood means of
// the ceil(0.9 * alpha * n) nearest neighbors of each subsample point,
// deduplicated at radius C * sigma_hat / sqrt(alpha) (tighter neighborhood
// wins) and capped at ceil(4 / alpha).
std::vector<Vector> candidate_means(const LabeledSet& S, double sigma_hat, const ClusterConfig& cfg);

// Sum of the r largest eigenvalues of a symmetric matrix.
double kyfan_norm(const Matrix& M, int r);

struct FeasibilityResult {
    bool feasible = false;
    Vector q;            // weights in [0,1]^n (meaningful when feasible)
    double norm_value = 0.0;  // Ky Fan norm of the weighted second moment
    double bound = 0.0;       // (2 C^2 sigma_hat^2 / alpha) * sum q
    double mass = 0.0;        // sum q
    int iterations = 0;
};

// Decides the convex feasibility program of Step 4 by iterative soft
// downweighting. Both constraints are asserted on any feasible answer.
FeasibilityResult feasibility_check(const LabeledSet& S, const Vector& mu, double sigma_hat,
                                    const ClusterConfig& cfg);

// Step 5: iteratively drop candidates whose plain Voronoi cell holds fewer
// than 0.96 * alpha * n points (smallest cell first).
std::vector<ScaledMean> size_prune(std::vector<ScaledMean> L, const LabeledSet& S,
                                   const ClusterConfig& cfg, ClusterDiagnostics* diag = nullptr);

// Step 6: iteratively merge candidate pairs whose filtered cells have close
// empirical means, removing the smaller filtered cell (tie: larger emp_sigma).
std::vector<ScaledMean> distance_prune(std::vector<ScaledMean> L, const LabeledSet& S,
                                       const ClusterConfig& cfg, ClusterDiagnostics* diag = nullptr);

// Step 7: nearest-candidate assignment followed by per-cell removal of the
// largest-projection point until the top covariance eigenvalue is at most
// C^2 * sigma_hat_cell^2. Cells filtered to emptiness (or that fail to meet
// the bound within max_filter_iters removals) are dropped with a warning.
std::vector<Cluster> filtered_voronoi(const std::vector<ScaledMean>& L, const LabeledSet& S,
                                      const ClusterConfig& cfg, ClusterDiagnostics* diag = nullptr);

// Full pipeline (Steps 1-7). Output clusters are disjoint and each holds at
// least 0.92 * alpha * |S| points; smaller ones are dropped.
std::vector<Cluster> cluster(const LabeledSet& S, const ClusterConfig& cfg,
                             ClusterDiagnostics* diag = nullptr);

}  // namespace mcsvm

#endif
