#ifndef MCSVM_DATA_GEN_HPP
#define MCSVM_DATA_GEN_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mcsvm/types.hpp"

namespace mcsvm {

enum class Shape { gaussian, uniform_ball, student_t };

Shape shape_from_string(const std::string& s);
std::string to_string(Shape s);

// One mixture component: spherical scale bound sigma (Cov <= sigma^2 I).
// gaussian and uniform-ball are log-concave; student-t(nu > 2) has bounded
// covariance only and is rescaled so its covariance equals sigma^2 I.
struct ComponentSpec {
    Vector mean;
    double sigma = 1.0;
    Shape shape = Shape::gaussian;
    double nu = 4.0;  // student-t only; must be > 2

    void validate() const;
};

struct MixtureSpec {
    std::vector<ComponentSpec> components;
    Vector weights;  // q_j, sums to 1
    double alpha = 0.0;  // known floor: min_j q_j >= alpha

    void validate() const;
};

struct GroundTruth {
    WeightMatrix wstar;
    double gamma = 0.0;
    MixtureSpec spec;
    std::vector<std::string> warnings;
};

// Builds w* with mutually orthogonal rows scaled to unit total norm and one
// component mean per class, placed along the row directions at a radius that
// gives every mean margin >= 2*gamma and pairwise separation
// > C^2 * 2*sigma / sqrt(alpha). Deterministic given seed (the orthogonal
// frame is a seeded random rotation).
GroundTruth make_ground_truth(int k, int d, double gamma, double sigma, double C, double alpha,
                              std::uint64_t seed, Shape shape = Shape::gaussian, double nu = 4.0);

// n i.i.d. draws from one component; rows of the result are the samples.
Matrix sample_component(const ComponentSpec& comp, int n, std::uint64_t seed);

// Draws (x, y) with y = predict(w*, x), rejecting points whose margin under
// w* is below gamma. Throws InfeasibleConfigError when the rejection rate
// exceeds 50% over a 10*n attempt budget. The realized rejection rate is
// recorded on the returned set.
LabeledSet sample_clean(const GroundTruth& gt, int n, std::uint64_t seed);

// Plain-text rows "x_1,...,x_d,y" under a header "#d=<d> k=<k> n=<n>".
// Doubles are printed with 17 significant digits so loads round-trip
// bit-exactly.
void save_labeled_set(const LabeledSet& S, std::ostream& out);
void save_labeled_set(const LabeledSet& S, const std::string& path);
LabeledSet load_labeled_set(std::istream& in);
LabeledSet load_labeled_set(const std::string& path);

// Model file: header "#k=<k> d=<d>" then k comma-separated rows.
void save_model(const WeightMatrix& W, std::ostream& out);
void save_model(const WeightMatrix& W, const std::string& path);
WeightMatrix load_model(std::istream& in);
WeightMatrix load_model(const std::string& path);

// Ground-truth file: model block for w*, then gamma/alpha and one line per
// component (shape, sigma, nu, weight, mean coordinates).
void save_ground_truth(const GroundTruth& gt, std::ostream& out);
void save_ground_truth(const GroundTruth& gt, const std::string& path);
GroundTruth load_ground_truth(std::istream& in);
GroundTruth load_ground_truth(const std::string& path);

}  // namespace mcsvm

#endif
