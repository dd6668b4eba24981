#include "mcsvm/learner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "mcsvm/core_model.hpp"
#include "mcsvm/errors.hpp"

namespace mcsvm {

Cluster majority_label_prune(const Cluster& B, const LabeledSet& S) {
    if (B.indices.empty()) throw std::invalid_argument("majority_label_prune: empty cluster");
    std::map<int, std::size_t> counts;
    for (int i : B.indices) ++counts[S.label(i)];
    int maj = 0;
    std::size_t best = 0;
    for (const auto& [label, c] : counts)
        if (c > best) {  // map iterates labels ascending, so ties keep the smallest
            best = c;
            maj = label;
        }
    Cluster out = B;
    out.indices.clear();
    for (int i : B.indices)
        if (S.label(i) == maj) out.indices.push_back(i);
    return out;
}

std::vector<std::vector<int>> merge_by_label(const std::vector<Cluster>& clusters,
                                             const LabeledSet& S, int k, LearnReport* report) {
    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(k));
    for (const auto& cl : clusters) {
        if (cl.indices.empty()) continue;
        const int label = S.label(cl.indices.front());
        for (int i : cl.indices) {
            if (S.label(i) != label)
                throw std::invalid_argument("merge_by_label: cluster is not label-unanimous");
            by_class[static_cast<std::size_t>(label - 1)].push_back(i);
        }
    }
    for (int j = 0; j < k; ++j) {
        auto& v = by_class[static_cast<std::size_t>(j)];
        std::sort(v.begin(), v.end());
        if (v.empty() && report)
            report->warnings.push_back("merge_by_label: class " + std::to_string(j + 1) +
                                       " has no cluster");
    }
    return by_class;
}

WeightMatrix minimize_hinge(const LabeledSet& S_hat, double gamma, int k, int d,
                            const OptConfig& opt, double* objective, int* iterations) {
    if (S_hat.size() < 1) throw std::invalid_argument("minimize_hinge: empty sample");
    if (gamma <= 0.0) throw std::invalid_argument("minimize_hinge: gamma must be positive");
    if (S_hat.dim() != d) throw std::invalid_argument("minimize_hinge: dimension mismatch");

    const int n = S_hat.size();
    const auto X = S_hat.features();
    const double max_norm = X.rowwise().norm().maxCoeff();
    const double step0 = opt.step0 > 0.0 ? opt.step0 : gamma / std::max(max_norm, 1e-12);
    const double improve_eps = opt.tolerance * n;

    RowMajorMatrix W = RowMajorMatrix::Zero(k, d);
    RowMajorMatrix best_W = W;
    double best_obj = std::numeric_limits<double>::infinity();
    int since_improve = 0;
    int used = 0;

    RowMajorMatrix G(k, d);
    for (int t = 1; t <= opt.max_iters; ++t) {
        used = t;
        Matrix scores = X * W.transpose();  // n x k
        G.setZero();
        double obj = 0.0;
        for (int i = 0; i < n; ++i) {
            const int y = S_hat.label(i);
            const double true_score = scores(i, y - 1);
            int yhat = -1;
            double best_val = 0.0;
            for (int yp = 1; yp <= k; ++yp) {
                if (yp == y) continue;
                const double val = 1.0 - (true_score - scores(i, yp - 1)) / gamma;
                if (!std::isfinite(val))
                    throw NumericFailure("minimize_hinge: non-finite objective at point index " +
                                         std::to_string(i));
                if (val > best_val) {
                    best_val = val;
                    yhat = yp;
                }
            }
            if (yhat != -1) {
                obj += best_val;
                G.row(yhat - 1) += X.row(i) / gamma;
                G.row(y - 1) -= X.row(i) / gamma;
            }
        }
        if (obj < best_obj - improve_eps)
            since_improve = 0;
        else
            ++since_improve;
        if (obj < best_obj) {
            best_obj = obj;
            best_W = W;
        }
        if (best_obj == 0.0) break;
        if (since_improve >= opt.patience) break;

        W -= (step0 / std::sqrt(static_cast<double>(t))) * G;
        const double norm = W.norm();
        if (norm > 1.0) W /= norm;
    }

    WeightMatrix result(std::move(best_W));
    if (objective) *objective = hinge_loss(result, S_hat, gamma);
    if (iterations) *iterations = used;
    return result;
}

std::pair<WeightMatrix, LearnReport> learn(const LabeledSet& S, const LearnConfig& cfg) {
    if (S.size() < 1) throw std::invalid_argument("learn: empty sample");
    const int k = S.num_classes();
    const int d = S.dim();

    LearnReport report;
    std::vector<int> kept;

    auto clusters = cluster(S, cfg.cluster_cfg);
    if (clusters.empty()) {
        report.fallback = true;
        report.warnings.push_back("learn: clustering returned no clusters; optimizing on raw S");
        kept.resize(static_cast<std::size_t>(S.size()));
        for (int i = 0; i < S.size(); ++i) kept[static_cast<std::size_t>(i)] = i;
        report.merged_sizes.assign(static_cast<std::size_t>(k), 0);
    } else {
        std::vector<Cluster> pruned;
        for (const auto& cl : clusters) {
            report.cluster_sizes_before.push_back(cl.indices.size());
            pruned.push_back(majority_label_prune(cl, S));
            report.cluster_sizes_after.push_back(pruned.back().indices.size());
        }
        auto by_class = merge_by_label(pruned, S, k, &report);
        for (const auto& v : by_class) {
            report.merged_sizes.push_back(v.size());
            kept.insert(kept.end(), v.begin(), v.end());
        }
        std::sort(kept.begin(), kept.end());
    }

    LabeledSet S_hat = S.subset(kept);
    WeightMatrix w = minimize_hinge(S_hat, cfg.gamma, k, d, cfg.opt, &report.objective,
                                    &report.iterations);
    report.kept_indices = std::move(kept);
    return {std::move(w), std::move(report)};
}

std::string LearnReport::to_text() const {
    std::ostringstream os;
    os << "fallback=" << (fallback ? 1 : 0) << "\n";
    os << "clusters:";
    for (std::size_t i = 0; i < cluster_sizes_before.size(); ++i)
        os << " " << cluster_sizes_before[i] << "->" << cluster_sizes_after[i];
    os << "\nmerged:";
    for (auto s : merged_sizes) os << " " << s;
    os << "\nkept=" << kept_indices.size() << "\n";
    os << "objective=" << objective << "\n";
    os << "iterations=" << iterations << "\n";
    for (const auto& w : warnings) os << "warning: " << w << "\n";
    return os.str();
}

}  // namespace mcsvm
