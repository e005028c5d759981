#include "bpgd/prox.hpp"

#include <cmath>
#include <limits>

namespace bpgd {

namespace {

constexpr double kMembershipTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_finite(const Vec& v, const char* what) {
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(what) + " must be finite (compact domain required)");
  }
}

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

}  // namespace

ProxOperator ProxOperator::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size() || lo.size() == 0) {
    throw std::invalid_argument("box: lo and hi must have equal, positive length");
  }
  require_finite(lo, "box: lo");
  require_finite(hi, "box: hi");
  if ((lo.array() > hi.array()).any()) {
    throw std::invalid_argument("box: requires lo <= hi componentwise");
  }
  ProxOperator op;
  op.kind_ = Kind::Box;
  op.dim_ = static_cast<int>(lo.size());
  op.lo_ = std::move(lo);
  op.hi_ = std::move(hi);
  return op;
}

ProxOperator ProxOperator::ball(Vec center, double radius) {
  if (center.size() == 0) throw std::invalid_argument("ball: empty center");
  require_finite(center, "ball: center");
  if (!(radius > 0) || !std::isfinite(radius)) {
    throw std::invalid_argument("ball: radius must be positive and finite");
  }
  ProxOperator op;
  op.kind_ = Kind::Ball;
  op.dim_ = static_cast<int>(center.size());
  op.center_ = std::move(center);
  op.radius_ = radius;
  return op;
}

ProxOperator ProxOperator::box_l1(Vec lo, Vec hi, Vec weight) {
  ProxOperator op = box(std::move(lo), std::move(hi));
  if (weight.size() != op.dim_) {
    throw std::invalid_argument("box_l1: weight length mismatch");
  }
  require_finite(weight, "box_l1: weight");
  if ((weight.array() < 0).any()) {
    throw std::invalid_argument("box_l1: weight must be nonnegative");
  }
  op.kind_ = Kind::BoxL1;
  op.weight_ = std::move(weight);
  return op;
}

Vec ProxOperator::apply(double scale, const Vec& x) const {
  if (!(scale > 0)) throw std::invalid_argument("prox: scale must be positive");
  if (x.size() != dim_) throw std::invalid_argument("prox: dimension mismatch");
  switch (kind_) {
    case Kind::Box:
      return x.cwiseMax(lo_).cwiseMin(hi_);
    case Kind::Ball: {
      Vec r = x - center_;
      const double nr = r.norm();
      if (nr <= radius_) return x;
      return center_ + (radius_ / nr) * r;
    }
    case Kind::BoxL1: {
      Vec y(dim_);
      for (int i = 0; i < dim_; ++i) {
        // 1-D objective is convex, so clamping the soft-threshold point is exact.
        y[i] = std::min(std::max(soft_threshold(x[i], scale * weight_[i]), lo_[i]), hi_[i]);
      }
      return y;
    }
  }
  throw std::logic_error("prox: unreachable");
}

double ProxOperator::value(const Vec& x) const {
  if (x.size() != dim_) throw std::invalid_argument("value: dimension mismatch");
  switch (kind_) {
    case Kind::Box:
      if ((x.array() < lo_.array() - kMembershipTol).any() ||
          (x.array() > hi_.array() + kMembershipTol).any()) {
        return kInf;
      }
      return 0.0;
    case Kind::Ball:
      return (x - center_).norm() <= radius_ + kMembershipTol ? 0.0 : kInf;
    case Kind::BoxL1:
      if ((x.array() < lo_.array() - kMembershipTol).any() ||
          (x.array() > hi_.array() + kMembershipTol).any()) {
        return kInf;
      }
      return (weight_.array() * x.array().abs()).sum();
  }
  throw std::logic_error("value: unreachable");
}

double ProxOperator::domain_diameter() const {
  switch (kind_) {
    case Kind::Box:
    case Kind::BoxL1:
      return (hi_ - lo_).norm();
    case Kind::Ball:
      return 2.0 * radius_;
  }
  throw std::logic_error("domain_diameter: unreachable");
}

double ProxOperator::domain_max_norm() const {
  switch (kind_) {
    case Kind::Box:
    case Kind::BoxL1:
      return lo_.cwiseAbs().cwiseMax(hi_.cwiseAbs()).norm();
    case Kind::Ball:
      return center_.norm() + radius_;
  }
  throw std::logic_error("domain_max_norm: unreachable");
}

Vec ProxOperator::project(const Vec& x) const {
  if (x.size() != dim_) throw std::invalid_argument("project: dimension mismatch");
  switch (kind_) {
    case Kind::Box:
    case Kind::BoxL1:
      return x.cwiseMax(lo_).cwiseMin(hi_);
    case Kind::Ball: {
      Vec r = x - center_;
      const double nr = r.norm();
      if (nr <= radius_) return x;
      return center_ + (radius_ / nr) * r;
    }
  }
  throw std::logic_error("project: unreachable");
}

void ProxOperator::bounding_box(Vec& lo, Vec& hi) const {
  switch (kind_) {
    case Kind::Box:
    case Kind::BoxL1:
      lo = lo_;
      hi = hi_;
      return;
    case Kind::Ball:
      lo = center_.array() - radius_;
      hi = center_.array() + radius_;
      return;
  }
  throw std::logic_error("bounding_box: unreachable");
}

}  // namespace bpgd
