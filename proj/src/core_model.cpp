#include "mcsvm/core_model.hpp"

#include <stdexcept>
#include <string>

namespace mcsvm {

namespace {

void check_dims(const WeightMatrix& W, const Eigen::Ref<const Vector>& x) {
    if (x.size() != W.dim())
        throw std::invalid_argument("dimension mismatch: x has " + std::to_string(x.size()) +
                                    " coordinates, W expects " + std::to_string(W.dim()));
}

}  // namespace

Vector feature_map(const Eigen::Ref<const Vector>& x, int y, int k) {
    if (y < 1 || y > k) throw std::invalid_argument("feature_map: label out of range");
    const auto d = x.size();
    Vector psi = Vector::Zero(static_cast<Eigen::Index>(k) * d);
    psi.segment(static_cast<Eigen::Index>(y - 1) * d, d) = x;
    return psi;
}

int predict(const WeightMatrix& W, const Eigen::Ref<const Vector>& x) {
    check_dims(W, x);
    Vector scores = W.raw() * x;
    int best = 1;
    for (int y = 2; y <= W.num_classes(); ++y)
        if (scores[y - 1] > scores[best - 1]) best = y;
    return best;
}

double margin_of(const WeightMatrix& Wstar, const Eigen::Ref<const Vector>& x, int y) {
    check_dims(Wstar, x);
    const int k = Wstar.num_classes();
    if (k < 2) throw std::invalid_argument("margin_of: needs at least two classes");
    if (y < 1 || y > k) throw std::invalid_argument("margin_of: label out of range");
    Vector scores = Wstar.raw() * x;
    double m = std::numeric_limits<double>::infinity();
    for (int yp = 1; yp <= k; ++yp) {
        if (yp == y) continue;
        m = std::min(m, scores[y - 1] - scores[yp - 1]);
    }
    return m;
}

int hinge_argmax(const WeightMatrix& w, const Eigen::Ref<const Vector>& x, int y, double gamma) {
    if (gamma <= 0.0) throw std::invalid_argument("hinge: gamma must be positive");
    check_dims(w, x);
    if (y < 1 || y > w.num_classes()) throw std::invalid_argument("hinge: label out of range");
    Vector scores = w.raw() * x;
    const double true_score = scores[y - 1];
    int best = -1;
    double best_val = 0.0;  // the y' = y term
    for (int yp = 1; yp <= w.num_classes(); ++yp) {
        if (yp == y) continue;
        const double val = 1.0 - (true_score - scores[yp - 1]) / gamma;
        if (val > best_val) {
            best_val = val;
            best = yp;
        }
    }
    // best stays -1 when no competitor beats the zero term: the true label
    // attains the maximum, yielding the zero subgradient.
    return best == -1 ? y : best;
}

double hinge_loss(const WeightMatrix& w, const LabeledPoint& p, double gamma) {
    if (gamma <= 0.0) throw std::invalid_argument("hinge_loss: gamma must be positive");
    check_dims(w, p.x);
    if (p.y < 1 || p.y > w.num_classes()) throw std::invalid_argument("hinge_loss: label out of range");
    Vector scores = w.raw() * p.x;
    const double true_score = scores[p.y - 1];
    double loss = 0.0;
    for (int yp = 1; yp <= w.num_classes(); ++yp) {
        if (yp == p.y) continue;
        loss = std::max(loss, 1.0 - (true_score - scores[yp - 1]) / gamma);
    }
    return loss;
}

double hinge_loss(const WeightMatrix& w, const LabeledSet& S, double gamma) {
    double total = 0.0;
    for (int i = 0; i < S.size(); ++i) total += hinge_loss(w, S.point(i), gamma);
    return total;
}

Vector hinge_subgradient(const WeightMatrix& w, const LabeledPoint& p, double gamma) {
    const int yhat = hinge_argmax(w, p.x, p.y, gamma);
    const int k = w.num_classes();
    const auto d = p.x.size();
    Vector g = Vector::Zero(static_cast<Eigen::Index>(k) * d);
    if (yhat != p.y) {
        g.segment(static_cast<Eigen::Index>(yhat - 1) * d, d) = p.x / gamma;
        g.segment(static_cast<Eigen::Index>(p.y - 1) * d, d) = -p.x / gamma;
    }
    return g;
}

bool pancake_contains(const WeightMatrix& w, double tau, const LabeledPoint& center,
                      const LabeledPoint& candidate) {
    if (tau <= 0.0) throw std::invalid_argument("pancake_contains: tau must be positive");
    check_dims(w, center.x);
    check_dims(w, candidate.x);
    if (candidate.y != center.y) return false;
    Vector proj = w.raw() * (candidate.x - center.x);
    return proj.cwiseAbs().maxCoeff() <= tau;
}

}  // namespace mcsvm
