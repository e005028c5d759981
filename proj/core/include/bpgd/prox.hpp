#ifndef BPGD_PROX_HPP_
#define BPGD_PROX_HPP_

#include "bpgd/common.hpp"

namespace bpgd {

/**
 * @brief Closed-form proximity operator of a proper convex penalty with
 * compact domain.
 *
 * Three variants are supported:
 *  - Box: indicator of a box [lo, hi]; prox is componentwise clamping.
 *  - Ball: indicator of a Euclidean ball; prox is radial projection.
 *  - BoxL1: indicator of a box plus a weighted 1-norm; prox is
 *    componentwise soft-thresholding followed by clamping.
 */
class ProxOperator {
 public:
  enum class Kind { Box, Ball, BoxL1 };

  ProxOperator() = default;  ///< empty operator; use the factories below

  static ProxOperator box(Vec lo, Vec hi);
  static ProxOperator ball(Vec center, double radius);
  static ProxOperator box_l1(Vec lo, Vec hi, Vec weight);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }

  /// prox_{scale * f}(x). Requires scale > 0 and x of matching dimension.
  Vec apply(double scale, const Vec& x) const;

  /// Penalty value: 0 (plus weighted 1-norm for BoxL1) inside the domain,
  /// +infinity outside. Membership is tested with absolute tolerance 1e-9
  /// to absorb floating-point drift of projected iterates.
  double value(const Vec& x) const;

  /// Euclidean diameter of the domain.
  double domain_diameter() const;

  /// max_{x in domain} |x|_2.
  double domain_max_norm() const;

  /// Metric projection onto the domain (ignores any L1 part).
  Vec project(const Vec& x) const;

  /// Axis-aligned bounding box of the domain, for sampling.
  void bounding_box(Vec& lo, Vec& hi) const;

  const Vec& lo() const { return lo_; }
  const Vec& hi() const { return hi_; }
  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  const Vec& weight() const { return weight_; }

 private:
  Kind kind_ = Kind::Box;
  int dim_ = 0;
  Vec lo_, hi_;       // Box, BoxL1
  Vec center_;        // Ball
  double radius_ = 0; // Ball
  Vec weight_;        // BoxL1
};

}  // namespace bpgd

#endif  // BPGD_PROX_HPP_
