#ifndef MCSVM_TYPES_HPP
#define MCSVM_TYPES_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcsvm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// Row-major so the flat view of a weight matrix is the row-wise
// concatenation (block y of the flat vector is row y).
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Multiclass linear classifier W in R^{k x d}. Row y is the weight vector
// of class y; the same storage doubles as the flat vector w in R^{kd}.
class WeightMatrix {
public:
    WeightMatrix(int k, int d) : rows_(RowMajorMatrix::Zero(k, d)) {
        if (k < 1 || d < 1) throw std::invalid_argument("WeightMatrix: k and d must be positive");
    }
    explicit WeightMatrix(RowMajorMatrix rows) : rows_(std::move(rows)) {
        if (rows_.rows() < 1 || rows_.cols() < 1)
            throw std::invalid_argument("WeightMatrix: k and d must be positive");
    }

    int num_classes() const { return static_cast<int>(rows_.rows()); }
    int dim() const { return static_cast<int>(rows_.cols()); }

    // label y is 1-based
    Eigen::Map<const Vector> row(int y) const {
        check_label(y);
        return Eigen::Map<const Vector>(rows_.data() + static_cast<std::ptrdiff_t>(y - 1) * dim(), dim());
    }

    RowMajorMatrix& raw() { return rows_; }
    const RowMajorMatrix& raw() const { return rows_; }

    Eigen::Map<const Vector> flat() const {
        return Eigen::Map<const Vector>(rows_.data(), rows_.size());
    }

    double norm() const { return rows_.norm(); }

private:
    void check_label(int y) const {
        if (y < 1 || y > num_classes())
            throw std::invalid_argument("WeightMatrix: label " + std::to_string(y) + " out of range");
    }

    RowMajorMatrix rows_;
};

struct LabeledPoint {
    Vector x;
    int y = 1;
};

// Ordered list of labeled points with fixed (d, k) metadata. Features are
// stored as rows of an Eigen matrix so per-set operations vectorize.
class LabeledSet {
public:
    LabeledSet(int d, int k, int capacity = 0) : d_(d), k_(k) {
        if (d < 1 || k < 1) throw std::invalid_argument("LabeledSet: d and k must be positive");
        xs_.resize(std::max(capacity, 0), d_);
    }

    int dim() const { return d_; }
    int num_classes() const { return k_; }
    int size() const { return n_; }

    void add(const Eigen::Ref<const Vector>& x, int y) {
        if (x.size() != d_) throw std::invalid_argument("LabeledSet::add: dimension mismatch");
        if (y < 1 || y > k_) throw std::invalid_argument("LabeledSet::add: label out of range");
        if (!x.allFinite()) throw std::invalid_argument("LabeledSet::add: non-finite coordinate");
        if (n_ == xs_.rows()) xs_.conservativeResize(std::max<Eigen::Index>(16, xs_.rows() * 2), d_);
        xs_.row(n_) = x.transpose();
        ys_.push_back(y);
        ++n_;
    }

    // column-vector expression over row i of the feature matrix
    auto x(int i) const { return xs_.row(i).transpose(); }
    int label(int i) const { return ys_[static_cast<std::size_t>(i)]; }

    LabeledPoint point(int i) const { return LabeledPoint{xs_.row(i).transpose(), ys_[static_cast<std::size_t>(i)]}; }

    void set_point(int i, const Eigen::Ref<const Vector>& x, int y) {
        if (x.size() != d_ || y < 1 || y > k_) throw std::invalid_argument("LabeledSet::set_point: invalid point");
        xs_.row(i) = x.transpose();
        ys_[static_cast<std::size_t>(i)] = y;
    }

    // n x d view of the features
    Eigen::Block<const Matrix> features() const { return xs_.topRows(n_); }
    const std::vector<int>& labels() const { return ys_; }

    LabeledSet subset(const std::vector<int>& indices) const {
        LabeledSet out(d_, k_, static_cast<int>(indices.size()));
        for (int i : indices) out.add(xs_.row(i).transpose(), ys_[static_cast<std::size_t>(i)]);
        return out;
    }

    // set by sample_clean; fraction of candidate draws rejected by the
    // margin filter
    double rejection_rate = 0.0;

private:
    int d_, k_;
    Matrix xs_;
    std::vector<int> ys_;
    int n_ = 0;
};

struct PancakeParams {
    double tau;   // slab half-width
    double rho;   // density threshold in [0,1]
    double beta;  // failure mass in [0,1]
};

}  // namespace mcsvm

#endif
