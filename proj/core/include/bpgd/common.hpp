#ifndef BPGD_COMMON_HPP_
#define BPGD_COMMON_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bpgd {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Raised when a configuration document is malformed or inconsistent.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a certification prerequisite fails (e.g. no contraction).
struct CertificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a reference solve does not reach its tolerance.
struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// splitmix64 step; used to derive independent sub-seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministically derives a sub-seed from a base seed and a purpose tag.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return splitmix64(seed ^ h);
}

}  // namespace bpgd

#endif  // BPGD_COMMON_HPP_
