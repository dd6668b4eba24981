#ifndef MCSVM_CORE_MODEL_HPP
#define MCSVM_CORE_MODEL_HPP

#include "mcsvm/types.hpp"

namespace mcsvm {

// Class-sensitive feature map: block y of the kd-vector is a copy of x,
// all other blocks are zero. Exists for tests and clarity; hot paths work
// with the row form directly.
Vector feature_map(const Eigen::Ref<const Vector>& x, int y, int k);

// argmax_y <w_y, x>; ties broken toward the smallest label index.
int predict(const WeightMatrix& W, const Eigen::Ref<const Vector>& x);

// min over competing labels y' != y of <w_y - w_{y'}, x>. Negative iff the
// point is misclassified by W.
double margin_of(const WeightMatrix& Wstar, const Eigen::Ref<const Vector>& x, int y);

// Generalized multiclass hinge loss
//   max_{y'} ( 1{y' != y} - <w/gamma, Psi(x,y) - Psi(x,y')> ).
// Always >= 0 since the y' = y term is zero.
double hinge_loss(const WeightMatrix& w, const LabeledPoint& p, double gamma);

// Sum of hinge_loss over the set.
double hinge_loss(const WeightMatrix& w, const LabeledSet& S, double gamma);

// The hinge maximizer y-hat with the documented tie rule: prefer y' = y
// whenever the true label attains the maximum, otherwise smallest index.
int hinge_argmax(const WeightMatrix& w, const Eigen::Ref<const Vector>& x, int y, double gamma);

// One subgradient of the hinge loss at w: (1/gamma)(Psi(x, y-hat) - Psi(x, y)).
// Zero vector when y-hat = y.
Vector hinge_subgradient(const WeightMatrix& w, const LabeledPoint& p, double gamma);

// Membership in the multiclass pancake of half-width tau centered at
// `center` under w: same label and |<w_ybar, x' - x>| <= tau for every class
// row ybar.
bool pancake_contains(const WeightMatrix& w, double tau, const LabeledPoint& center,
                      const LabeledPoint& candidate);

}  // namespace mcsvm

#endif
