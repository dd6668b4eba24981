#include "mcsvm/adversary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mcsvm/core_model.hpp"
#include "mcsvm/rng.hpp"

namespace mcsvm {

Strategy strategy_from_string(const std::string& s) {
    if (s == "none") return Strategy::none;
    if (s == "random-replace") return Strategy::random_replace;
    if (s == "label-flip-nearest") return Strategy::label_flip_nearest;
    if (s == "boundary-inject") return Strategy::boundary_inject;
    if (s == "fake-cluster") return Strategy::fake_cluster;
    throw std::invalid_argument("unknown attack strategy: " + s);
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::none: return "none";
        case Strategy::random_replace: return "random-replace";
        case Strategy::label_flip_nearest: return "label-flip-nearest";
        case Strategy::boundary_inject: return "boundary-inject";
        case Strategy::fake_cluster: return "fake-cluster";
    }
    throw std::invalid_argument("unknown strategy enum value");
}

namespace {

// m distinct positions chosen uniformly (partial Fisher-Yates)
std::vector<int> choose_positions(int n, int m, Rng& rng) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < m; ++i) {
        const int j = i + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n - i)));
        std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
    }
    idx.resize(static_cast<std::size_t>(m));
    return idx;
}

int runner_up_class(const WeightMatrix& W, const Eigen::Ref<const Vector>& x) {
    Vector scores = W.raw() * x;
    int best = 1, second = -1;
    for (int y = 2; y <= W.num_classes(); ++y)
        if (scores[y - 1] > scores[best - 1]) best = y;
    for (int y = 1; y <= W.num_classes(); ++y) {
        if (y == best) continue;
        if (second == -1 || scores[y - 1] > scores[second - 1]) second = y;
    }
    return second;
}

double max_sigma(const MixtureSpec& spec) {
    double s = 0.0;
    for (const auto& c : spec.components) s = std::max(s, c.sigma);
    return s;
}

}  // namespace

CorruptionResult corrupt(const LabeledSet& clean, const GroundTruth& gt, const AttackConfig& cfg) {
    if (cfg.eta < 0.0 || cfg.eta >= 1.0) throw std::invalid_argument("corrupt: eta must be in [0, 1)");
    const int n = clean.size();
    const int d = clean.dim();
    const int k = clean.num_classes();
    const int m = static_cast<int>(std::floor(cfg.eta * n));

    CorruptionResult res{clean, std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0)};
    if (m == 0 || cfg.strategy == Strategy::none) return res;

    Rng rng(cfg.seed);
    const auto& comps = gt.spec.components;
    const int K = static_cast<int>(comps.size());

    switch (cfg.strategy) {
        case Strategy::none:
            break;
        case Strategy::random_replace: {
            Vector lo = clean.features().colwise().minCoeff().transpose();
            Vector hi = clean.features().colwise().maxCoeff().transpose();
            for (int i : choose_positions(n, m, rng)) {
                Vector x(d);
                for (int j = 0; j < d; ++j) x[j] = rng.uniform(lo[j], hi[j]);
                const int y = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(k)));
                res.corrupted.set_point(i, x, y);
                res.dirty_mask[static_cast<std::size_t>(i)] = 1;
            }
            break;
        }
        case Strategy::label_flip_nearest: {
            // keep x of the m smallest-margin clean points, relabel with the
            // runner-up class under w*
            std::vector<int> order(static_cast<std::size_t>(n));
            std::iota(order.begin(), order.end(), 0);
            std::vector<double> margin(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i)
                margin[static_cast<std::size_t>(i)] =
                    margin_of(gt.wstar, clean.x(i), clean.label(i));
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                return margin[static_cast<std::size_t>(a)] < margin[static_cast<std::size_t>(b)];
            });
            for (int r = 0; r < m; ++r) {
                const int i = order[static_cast<std::size_t>(r)];
                const int y_new = runner_up_class(gt.wstar, clean.x(i));
                res.corrupted.set_point(i, clean.x(i), y_new);
                res.dirty_mask[static_cast<std::size_t>(i)] = 1;
            }
            break;
        }
        case Strategy::boundary_inject: {
            for (int i : choose_positions(n, m, rng)) {
                const int a = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(K)));
                int b = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(K - 1)));
                if (b >= a) ++b;
                const Vector mid = 0.5 * (comps[static_cast<std::size_t>(a)].mean +
                                          comps[static_cast<std::size_t>(b)].mean);
                // midpoint is equidistant; call the higher-index mean "farther"
                const int far = std::max(a, b);
                const int y = predict(gt.wstar, comps[static_cast<std::size_t>(far)].mean);
                res.corrupted.set_point(i, mid, y);
                res.dirty_mask[static_cast<std::size_t>(i)] = 1;
            }
            break;
        }
        case Strategy::fake_cluster: {
            const double sigma = max_sigma(gt.spec);
            // C^2 * 2 sigma / sqrt(alpha) with the default C = 2
            const double sep = 4.0 * 2.0 * sigma / std::sqrt(gt.spec.alpha);
            // place the fake center beyond every true mean
            Vector centroid = Vector::Zero(d);
            for (const auto& c : comps) centroid += c.mean;
            centroid /= static_cast<double>(K);
            Vector dir(d);
            for (int j = 0; j < d; ++j) dir[j] = rng.normal();
            dir.normalize();
            double max_dist = 0.0;
            for (const auto& c : comps) max_dist = std::max(max_dist, (c.mean - centroid).norm());
            const Vector center = centroid + dir * (max_dist + sep + 1.0);
            // single adversarial label: the class whose mean is farthest away
            int far = 0;
            for (int c = 1; c < K; ++c)
                if ((comps[static_cast<std::size_t>(c)].mean - center).norm() >
                    (comps[static_cast<std::size_t>(far)].mean - center).norm())
                    far = c;
            const int y = predict(gt.wstar, comps[static_cast<std::size_t>(far)].mean);
            const double ball = sigma / 10.0;
            for (int i : choose_positions(n, m, rng)) {
                Vector off(d);
                for (int j = 0; j < d; ++j) off[j] = rng.normal();
                const double norm = off.norm();
                const double radius =
                    ball * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
                Vector x = norm == 0.0 ? center : Vector(center + off * (radius / norm));
                res.corrupted.set_point(i, x, y);
                res.dirty_mask[static_cast<std::size_t>(i)] = 1;
            }
            break;
        }
    }
    return res;
}

}  // namespace mcsvm
