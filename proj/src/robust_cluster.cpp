#include "mcsvm/robust_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "mcsvm/errors.hpp"

namespace mcsvm {

void ClusterConfig::validate() const {
    if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("ClusterConfig: alpha must be in (0, 1)");
    if (C < 1.0) throw std::invalid_argument("ClusterConfig: C must be >= 1");
    if (max_filter_iters < 1) throw std::invalid_argument("ClusterConfig: max_filter_iters must be >= 1");
    if (admit_factor <= 0.0 || dist_prune_factor <= 0.0)
        throw std::invalid_argument("ClusterConfig: prune factors must be positive");
}

namespace {

std::vector<int> strided_subsample(int n, int m) {
    m = std::min(n, m);
    std::vector<int> idx(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i)
        idx[static_cast<std::size_t>(i)] = static_cast<int>(static_cast<long>(i) * n / m);
    return idx;
}

// top-r eigenpairs of a symmetric matrix, eigenvalues descending
std::pair<Vector, Matrix> top_r_eigen(const Matrix& M, int r) {
    const int d = static_cast<int>(M.rows());
    if (d <= 64) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(M);
        Vector vals(r);
        Matrix vecs(d, r);
        for (int i = 0; i < r; ++i) {
            vals[i] = es.eigenvalues()[d - 1 - i];
            vecs.col(i) = es.eigenvectors().col(d - 1 - i);
        }
        return {vals, vecs};
    }
    // block subspace iteration with a deterministic start, relative tol 1e-8
    const int b = std::min(d, r + 2);
    Matrix V = Matrix::Zero(d, b);
    for (int j = 0; j < b; ++j) V(j % d, j) = 1.0;
    V.col(0).setOnes();
    Eigen::HouseholderQR<Matrix> qr0(V);
    V = qr0.householderQ() * Matrix::Identity(d, b);
    // shift so the iteration targets the largest-magnitude end even with
    // negative spectrum
    const double shift = M.cwiseAbs().rowwise().sum().maxCoeff();
    Vector prev = Vector::Zero(r);
    for (int it = 0; it < 1000; ++it) {
        Matrix W = M * V + shift * V;
        Eigen::HouseholderQR<Matrix> qr(W);
        V = qr.householderQ() * Matrix::Identity(d, b);
        Matrix T = V.transpose() * M * V;
        Eigen::SelfAdjointEigenSolver<Matrix> es(T);
        Vector vals(r);
        for (int i = 0; i < r; ++i) vals[i] = es.eigenvalues()[b - 1 - i];
        if ((vals - prev).cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, vals.cwiseAbs().maxCoeff())) {
            Matrix vecs(d, r);
            for (int i = 0; i < r; ++i) vecs.col(i) = V * es.eigenvectors().col(b - 1 - i);
            return {vals, vecs};
        }
        prev = vals;
    }
    Matrix T = V.transpose() * M * V;
    Eigen::SelfAdjointEigenSolver<Matrix> es(T);
    Vector vals(r);
    Matrix vecs(d, r);
    for (int i = 0; i < r; ++i) {
        vals[i] = es.eigenvalues()[b - 1 - i];
        vecs.col(i) = V * es.eigenvectors().col(b - 1 - i);
    }
    return {vals, vecs};
}

struct NeighborhoodCandidates {
    std::vector<Vector> means;   // sorted by ascending radius (tightest first)
    std::vector<double> radii;   // distance to the r-th nearest neighbor
};

// Neighborhood means over a subsample: for each subsample point, the mean of
// its ceil(0.9 * alpha * n) nearest neighbors. Independent of sigma_hat, so
// cluster() computes this once and reuses it across the scale grid.
NeighborhoodCandidates neighborhood_candidates(const LabeledSet& S, const ClusterConfig& cfg) {
    const int n = S.size();
    const auto X = S.features();
    const int r = std::min(n, std::max(1, static_cast<int>(std::ceil(0.9 * cfg.alpha * n))));
    const auto sub = strided_subsample(n, cfg.subsample_means);

    Vector sqnorms = X.rowwise().squaredNorm();
    NeighborhoodCandidates out;
    std::vector<std::pair<double, Vector>> items;
    items.reserve(sub.size());

    std::vector<std::pair<double, int>> dist(static_cast<std::size_t>(n));
    for (int i : sub) {
        Vector dots = X * X.row(i).transpose();
        for (int j = 0; j < n; ++j)
            dist[static_cast<std::size_t>(j)] = {
                std::max(0.0, sqnorms[i] + sqnorms[j] - 2.0 * dots[j]), j};
        std::nth_element(dist.begin(), dist.begin() + (r - 1), dist.end());
        const double radius = std::sqrt(dist[static_cast<std::size_t>(r - 1)].first);
        Vector mean = Vector::Zero(S.dim());
        for (int t = 0; t < r; ++t) mean += X.row(dist[static_cast<std::size_t>(t)].second).transpose();
        mean /= static_cast<double>(r);
        items.emplace_back(radius, std::move(mean));
    }
    std::stable_sort(items.begin(), items.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& it : items) {
        out.radii.push_back(it.first);
        out.means.push_back(std::move(it.second));
    }
    return out;
}

// Dedup tightest-first at the given radius, capped at ceil(4 / alpha).
std::vector<Vector> dedup_candidates(const NeighborhoodCandidates& nc, double dedup_radius,
                                     double alpha) {
    const std::size_t cap = static_cast<std::size_t>(std::ceil(4.0 / alpha));
    std::vector<Vector> kept;
    for (std::size_t i = 0; i < nc.means.size() && kept.size() < cap; ++i) {
        bool close = false;
        for (const auto& m : kept)
            if ((nc.means[i] - m).norm() <= dedup_radius) {
                close = true;
                break;
            }
        if (!close) kept.push_back(nc.means[i]);
    }
    return kept;
}

std::vector<std::vector<int>> voronoi_cells(const std::vector<ScaledMean>& L, const LabeledSet& S) {
    std::vector<std::vector<int>> cells(L.size());
    const auto X = S.features();
    for (int i = 0; i < S.size(); ++i) {
        int best = 0;
        double best_d = (X.row(i).transpose() - L[0].mu).squaredNorm();
        for (std::size_t c = 1; c < L.size(); ++c) {
            const double dd = (X.row(i).transpose() - L[c].mu).squaredNorm();
            if (dd < best_d) {
                best_d = dd;
                best = static_cast<int>(c);
            }
        }
        cells[static_cast<std::size_t>(best)].push_back(i);
    }
    return cells;
}

// Filters one Voronoi cell in place; returns the finished cluster or nullopt
// when the cell empties or the bound is not reached within the iteration cap.
std::optional<Cluster> filter_cell(std::vector<int> cell, const ScaledMean& cand,
                                   const LabeledSet& S, const ClusterConfig& cfg,
                                   ClusterDiagnostics* diag) {
    const auto X = S.features();
    const double bound = cfg.C * cfg.C * cand.sigma_hat * cand.sigma_hat;
    for (int iter = 0; iter <= cfg.max_filter_iters; ++iter) {
        if (cell.empty()) {
            if (diag) diag->warnings.push_back("filtered_voronoi: cell filtered to emptiness; dropped");
            return std::nullopt;
        }
        const int m = static_cast<int>(cell.size());
        Vector mean = Vector::Zero(S.dim());
        for (int i : cell) mean += X.row(i).transpose();
        mean /= static_cast<double>(m);

        // second moment about the recorded center is the asserted guarantee;
        // it dominates the covariance about the mean
        Matrix M2 = Matrix::Zero(S.dim(), S.dim());
        for (int i : cell) {
            Vector v = X.row(i).transpose() - cand.mu;
            M2.noalias() += v * v.transpose();
        }
        M2 /= static_cast<double>(m);
        auto [vals, vecs] = top_r_eigen(M2, 1);
        if (vals[0] <= bound) {
            Cluster cl;
            cl.indices = std::move(cell);
            cl.center = cand.mu;
            cl.emp_mean = std::move(mean);
            cl.emp_sigma = std::sqrt(std::max(0.0, vals[0]));
            cl.sigma_hat = cand.sigma_hat;
            return cl;
        }
        if (iter == cfg.max_filter_iters) break;

        // remove the largest squared projection about the current empirical
        // mean along the top eigenvector of the cell covariance
        Matrix cov = Matrix::Zero(S.dim(), S.dim());
        for (int i : cell) {
            Vector v = X.row(i).transpose() - mean;
            cov.noalias() += v * v.transpose();
        }
        cov /= static_cast<double>(m);
        auto [cvals, cvecs] = top_r_eigen(cov, 1);
        const Vector dir = cvecs.col(0);
        int worst_pos = 0;
        double worst = -1.0;
        for (int p = 0; p < m; ++p) {
            const double proj = dir.dot(X.row(cell[static_cast<std::size_t>(p)]).transpose() - mean);
            if (proj * proj > worst) {
                worst = proj * proj;
                worst_pos = p;
            }
        }
        cell.erase(cell.begin() + worst_pos);
    }
    if (diag)
        diag->warnings.push_back(
            "filtered_voronoi: covariance bound not met within max_filter_iters; cell dropped");
    return std::nullopt;
}

// Cells aligned with L; nullopt where the cell was dropped.
std::vector<std::optional<Cluster>> filtered_cells(const std::vector<ScaledMean>& L,
                                                   const LabeledSet& S, const ClusterConfig& cfg,
                                                   ClusterDiagnostics* diag) {
    auto cells = voronoi_cells(L, S);
    std::vector<std::optional<Cluster>> out;
    out.reserve(L.size());
    for (std::size_t c = 0; c < L.size(); ++c)
        out.push_back(filter_cell(std::move(cells[c]), L[c], S, cfg, diag));
    return out;
}

}  // namespace

std::vector<double> candidate_stdevs(const LabeledSet& S, const ClusterConfig& cfg) {
    cfg.validate();
    const int n = S.size();
    if (n < 2) throw std::invalid_argument("candidate_stdevs: needs at least 2 points");
    const auto X = S.features();
    const auto sub = strided_subsample(n, cfg.subsample_stdevs);
    const int m = static_cast<int>(sub.size());

    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            dists.push_back((X.row(sub[static_cast<std::size_t>(a)]) -
                             X.row(sub[static_cast<std::size_t>(b)]))
                                .norm());

    const auto quantile = [&](double p) {
        const std::size_t pos = static_cast<std::size_t>(p * (dists.size() - 1));
        std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(pos), dists.end());
        return dists[pos];
    };
    const double sqrt_d = std::sqrt(static_cast<double>(S.dim()));
    const double hi = quantile(0.99) / sqrt_d;
    if (hi <= 0.0) {
        // all points identical
        const double scale = std::max(1.0, X.row(0).norm());
        return {std::numeric_limits<double>::epsilon() * scale};
    }
    double lo = quantile(0.01) / sqrt_d;
    if (lo <= 0.0) lo = hi * 1e-6;  // duplicate points in the subsample

    std::vector<double> grid;
    for (double v = lo; v <= hi; v *= 2.0) grid.push_back(v);
    if (grid.empty()) grid.push_back(lo);
    return grid;
}

std::vector<Vector> candidate_means(const LabeledSet& S, double sigma_hat, const ClusterConfig& cfg) {
    cfg.validate();
    if (sigma_hat <= 0.0) throw std::invalid_argument("candidate_means: sigma_hat must be positive");
    auto nc = neighborhood_candidates(S, cfg);
    const double dedup_radius = cfg.C * sigma_hat / std::sqrt(cfg.alpha);
    return dedup_candidates(nc, dedup_radius, cfg.alpha);
}

double kyfan_norm(const Matrix& M, int r) {
    if (M.rows() != M.cols()) throw std::invalid_argument("kyfan_norm: matrix must be square");
    const int d = static_cast<int>(M.rows());
    if (r < 1 || r > d) throw std::invalid_argument("kyfan_norm: r must be in [1, d]");
    const double tol = 1e-9 * std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("kyfan_norm: matrix is not symmetric within tolerance");
    const Matrix sym = 0.5 * (M + M.transpose());
    auto [vals, vecs] = top_r_eigen(sym, r);
    return vals.sum();
}

FeasibilityResult feasibility_check(const LabeledSet& S, const Vector& mu, double sigma_hat,
                                    const ClusterConfig& cfg) {
    cfg.validate();
    if (sigma_hat <= 0.0) throw std::invalid_argument("feasibility_check: sigma_hat must be positive");
    if (mu.size() != S.dim()) throw std::invalid_argument("feasibility_check: dimension mismatch");
    const int n = S.size();
    const int d = S.dim();
    const auto X = S.features();
    const double inv_sqrt_alpha = 1.0 / std::sqrt(cfg.alpha);
    const int r = std::min({d, cfg.kyfan_rank_cap, static_cast<int>(std::ceil(1.0 / cfg.alpha))});
    const double mass_floor = 0.97 * cfg.alpha * n;

    // centered features, computed once
    Matrix Z = X.rowwise() - mu.transpose();
    Vector zsq = Z.rowwise().squaredNorm();

    FeasibilityResult res;
    res.q = Vector::Zero(n);
    const double init_radius = 200.0 * cfg.C * sigma_hat * inv_sqrt_alpha;
    for (int i = 0; i < n; ++i)
        if (zsq[i] <= init_radius * init_radius) res.q[i] = 1.0;

    for (int iter = 1; iter <= cfg.max_filter_iters; ++iter) {
        res.iterations = iter;
        res.mass = res.q.sum();
        if (res.mass < mass_floor) {
            res.feasible = false;
            return res;
        }
        Matrix M = Z.transpose() * res.q.asDiagonal() * Z;
        auto [vals, vecs] = top_r_eigen(M, r);
        res.norm_value = vals.sum();
        res.bound = (2.0 * cfg.C * cfg.C * sigma_hat * sigma_hat / cfg.alpha) * res.mass;
        if (res.norm_value <= res.bound) {
            res.feasible = true;
            return res;
        }
        // squared projection mass onto the top-r eigenspace
        Matrix P = Z * vecs;
        Vector proj = P.rowwise().squaredNorm();
        double proj_max = 0.0;
        for (int i = 0; i < n; ++i)
            if (res.q[i] > 0.0) proj_max = std::max(proj_max, proj[i]);
        if (proj_max <= 0.0) {
            res.feasible = false;
            return res;
        }
        for (int i = 0; i < n; ++i)
            if (res.q[i] > 0.0) res.q[i] *= (1.0 - proj[i] / proj_max);
    }
    res.feasible = false;
    return res;
}

std::vector<ScaledMean> size_prune(std::vector<ScaledMean> L, const LabeledSet& S,
                                   const ClusterConfig& cfg, ClusterDiagnostics* diag) {
    cfg.validate();
    if (L.empty()) throw std::invalid_argument("size_prune: candidate list must be non-empty");
    const double threshold = 0.96 * cfg.alpha * S.size();
    while (!L.empty()) {
        auto cells = voronoi_cells(L, S);
        int victim = -1;
        std::size_t victim_size = 0;
        for (std::size_t c = 0; c < L.size(); ++c) {
            if (static_cast<double>(cells[c].size()) >= threshold) continue;
            if (victim == -1 || cells[c].size() < victim_size) {
                victim = static_cast<int>(c);
                victim_size = cells[c].size();
            }
        }
        if (victim == -1) break;
        if (diag) {
            std::ostringstream os;
            os << "size_prune: removed candidate " << victim << " with cell size " << victim_size
               << " < " << threshold;
            diag->prune_log.push_back(os.str());
        }
        L.erase(L.begin() + victim);
    }
    return L;
}

std::vector<ScaledMean> distance_prune(std::vector<ScaledMean> L, const LabeledSet& S,
                                       const ClusterConfig& cfg, ClusterDiagnostics* diag) {
    cfg.validate();
    const double inv_sqrt_alpha = 1.0 / std::sqrt(cfg.alpha);
    while (L.size() > 1) {
        auto cells = filtered_cells(L, S, cfg, nullptr);
        int remove = -1;
        // a candidate whose filtered cell vanished witnesses nothing; it is
        // the least isolated by definition (covers the duplicate-center case,
        // where the tying cell keeps every point and the other is empty)
        for (std::size_t c = 0; c < L.size() && remove == -1; ++c)
            if (!cells[c]) {
                remove = static_cast<int>(c);
                if (diag)
                    diag->prune_log.push_back("distance_prune: removed candidate with empty filtered cell");
            }
        for (std::size_t a = 0; a < L.size() && remove == -1; ++a) {
            if (!cells[a]) continue;
            for (std::size_t b = a + 1; b < L.size(); ++b) {
                if (!cells[b]) continue;
                const double dist = (cells[a]->emp_mean - cells[b]->emp_mean).norm();
                const double threshold = cfg.dist_prune_factor * cfg.C *
                                         (cells[a]->emp_sigma + cells[b]->emp_sigma) * inv_sqrt_alpha;
                if (dist > threshold) continue;
                // the less isolated one: smaller filtered cell, ties broken
                // toward larger emp_sigma, then higher index
                const std::size_t sa = cells[a]->indices.size();
                const std::size_t sb = cells[b]->indices.size();
                std::size_t victim;
                if (sa != sb)
                    victim = sa < sb ? a : b;
                else if (cells[a]->emp_sigma != cells[b]->emp_sigma)
                    victim = cells[a]->emp_sigma > cells[b]->emp_sigma ? a : b;
                else
                    victim = b;
                if (diag) {
                    std::ostringstream os;
                    os << "distance_prune: cells " << a << " and " << b << " at distance " << dist
                       << " <= " << threshold << "; removed " << victim;
                    diag->prune_log.push_back(os.str());
                }
                remove = static_cast<int>(victim);
                break;
            }
        }
        if (remove == -1) break;
        L.erase(L.begin() + remove);
    }
    return L;
}

std::vector<Cluster> filtered_voronoi(const std::vector<ScaledMean>& L, const LabeledSet& S,
                                      const ClusterConfig& cfg, ClusterDiagnostics* diag) {
    cfg.validate();
    if (L.empty()) throw std::invalid_argument("filtered_voronoi: candidate list must be non-empty");
    auto cells = filtered_cells(L, S, cfg, diag);
    std::vector<Cluster> out;
    for (auto& c : cells)
        if (c) out.push_back(std::move(*c));
    return out;
}

std::vector<Cluster> cluster(const LabeledSet& S, const ClusterConfig& cfg,
                             ClusterDiagnostics* diag) {
    cfg.validate();
    if (static_cast<double>(S.size()) < 1.0 / cfg.alpha)
        throw std::invalid_argument("cluster: needs at least 1/alpha points");

    auto stdevs = candidate_stdevs(S, cfg);
    auto nc = neighborhood_candidates(S, cfg);
    if (diag) {
        diag->candidates.stdevs = stdevs;
        diag->candidates.means = nc.means;
    }

    const double inv_sqrt_alpha = 1.0 / std::sqrt(cfg.alpha);
    std::vector<ScaledMean> admitted;
    for (double sigma_hat : stdevs) {
        auto cands = dedup_candidates(nc, cfg.C * sigma_hat * inv_sqrt_alpha, cfg.alpha);
        for (auto& mu : cands) {
            const double admit_radius = cfg.admit_factor * cfg.C * sigma_hat * inv_sqrt_alpha;
            bool taken = false;
            for (const auto& a : admitted)
                if ((mu - a.mu).norm() <= admit_radius) {
                    taken = true;
                    break;
                }
            if (taken) continue;
            auto fr = feasibility_check(S, mu, sigma_hat, cfg);
            if (diag) {
                std::ostringstream os;
                os << "feasibility at sigma_hat=" << sigma_hat << ": "
                   << (fr.feasible ? "feasible" : "infeasible") << " (norm " << fr.norm_value
                   << " vs bound " << fr.bound << ", mass " << fr.mass << ", iters "
                   << fr.iterations << ")";
                diag->feasibility_log.push_back(os.str());
            }
            if (fr.feasible) admitted.push_back(ScaledMean{mu, sigma_hat});
        }
    }
    if (diag) diag->candidates.admitted = admitted;
    if (admitted.empty()) {
        if (diag) diag->warnings.push_back("cluster: no candidate admitted; returning empty list");
        return {};
    }

    auto pruned = size_prune(admitted, S, cfg, diag);
    if (pruned.empty()) {
        if (diag) diag->warnings.push_back("cluster: size pruning removed every candidate");
        return {};
    }
    pruned = distance_prune(std::move(pruned), S, cfg, diag);
    if (diag) diag->candidates.survivors = pruned;

    auto clusters = filtered_voronoi(pruned, S, cfg, diag);
    const double floor = 0.92 * cfg.alpha * S.size();
    std::vector<Cluster> out;
    for (auto& c : clusters) {
        if (static_cast<double>(c.indices.size()) >= floor) {
            out.push_back(std::move(c));
        } else if (diag) {
            std::ostringstream os;
            os << "cluster: dropped cluster of size " << c.indices.size() << " < " << floor;
            diag->warnings.push_back(os.str());
        }
    }
    return out;
}

std::string ClusterDiagnostics::report() const {
    std::ostringstream os;
    os << "== candidate stdevs ==\n";
    for (double s : candidates.stdevs) os << s << "\n";
    os << "== candidate means: " << candidates.means.size() << " generated ==\n";
    os << "== feasibility ==\n";
    for (const auto& line : feasibility_log) os << line << "\n";
    os << "== admitted: " << candidates.admitted.size() << " ==\n";
    for (const auto& a : candidates.admitted)
        os << "sigma_hat=" << a.sigma_hat << " mu=[" << a.mu.transpose() << "]\n";
    os << "== pruning ==\n";
    for (const auto& line : prune_log) os << line << "\n";
    os << "== survivors: " << candidates.survivors.size() << " ==\n";
    os << "== warnings ==\n";
    for (const auto& w : warnings) os << w << "\n";
    return os.str();
}

}  // namespace mcsvm
