#pragma once

#include <Eigen/Core>

#include <cstdint>

namespace mcig {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Seed = std::uint64_t;

} // namespace mcig
