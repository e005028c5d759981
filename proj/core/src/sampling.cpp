#include "bpgd/sampling.hpp"

#include <cmath>

namespace bpgd {

namespace {

constexpr std::uint32_t kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19,
                                     23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint32_t base, std::uint64_t i) {
  double inv_base = 1.0 / base;
  double f = inv_base;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv_base;
  }
  return r;
}

}  // namespace

HaltonSequence::HaltonSequence(int dim, std::uint64_t seed) : dim_(dim) {
  if (dim <= 0 || dim > static_cast<int>(std::size(kPrimes))) {
    throw std::invalid_argument("HaltonSequence: unsupported dimension");
  }
  bases_.assign(kPrimes, kPrimes + dim);
  shift_.resize(dim);
  std::uint64_t s = seed;
  for (int d = 0; d < dim; ++d) {
    s = splitmix64(s);
    shift_[d] = static_cast<double>(s >> 11) * 0x1.0p-53;
  }
}

Vec HaltonSequence::next() {
  Vec x(dim_);
  ++index_;  // skip i = 0 (the all-zeros point)
  for (int d = 0; d < dim_; ++d) {
    double v = radical_inverse(bases_[d], index_) + shift_[d];
    x[d] = v - std::floor(v);
  }
  return x;
}

std::vector<Vec> domain_samples(const ProxOperator& op, int count, std::uint64_t seed) {
  Vec lo, hi;
  op.bounding_box(lo, hi);
  HaltonSequence seq(op.dim(), seed);
  std::vector<Vec> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    Vec u = seq.next();
    Vec x = lo.array() + u.array() * (hi - lo).array();
    out.push_back(op.project(x));
  }
  return out;
}

Vec sample_ball(int dim, double radius, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = gauss(rng);
  const double n = v.norm();
  if (n == 0.0) return Vec::Zero(dim);
  const double r = radius * std::pow(unif(rng), 1.0 / dim);
  return (r / n) * v;
}

Vec sample_box(const Vec& lo, const Vec& hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vec x(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    x[i] = lo[i] + unif(rng) * (hi[i] - lo[i]);
  }
  return x;
}

}  // namespace bpgd
