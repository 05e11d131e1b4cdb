#ifndef GEQLAB_COMMON_HPP
#define GEQLAB_COMMON_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>

namespace geq {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Rng = std::mt19937_64;

// Lossless (17 significant digit) decimal formatting for doubles.
std::string fmt17(double v);

// FNV-1a, used to derive independent deterministic RNG streams per check name.
std::uint64_t hash_name(const std::string& name);

}  // namespace geq

#endif
