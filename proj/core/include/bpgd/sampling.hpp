#ifndef BPGD_SAMPLING_HPP_
#define BPGD_SAMPLING_HPP_

#include "bpgd/common.hpp"
#include "bpgd/prox.hpp"

#include <random>
#include <vector>

namespace bpgd {

/**
 * @brief Randomized-shift Halton sequence in [0,1)^dim.
 *
 * Deterministic for a given (dim, seed); the Cranley-Patterson shift makes
 * distinct seeds produce distinct but equally well-spread sample plans.
 */
class HaltonSequence {
 public:
  HaltonSequence(int dim, std::uint64_t seed);

  Vec next();

 private:
  int dim_;
  std::uint64_t index_ = 0;
  std::vector<std::uint32_t> bases_;
  Vec shift_;
};

/// `count` low-discrepancy samples from the domain of `op` (bounding box
/// points projected onto the domain).
std::vector<Vec> domain_samples(const ProxOperator& op, int count, std::uint64_t seed);

/// Uniform sample from the closed Euclidean ball of given radius.
Vec sample_ball(int dim, double radius, std::mt19937_64& rng);

/// Uniform sample from an axis-aligned box.
Vec sample_box(const Vec& lo, const Vec& hi, std::mt19937_64& rng);

}  // namespace bpgd

#endif  // BPGD_SAMPLING_HPP_
