#ifndef WELFARE_KERNELS_HPP_
#define WELFARE_KERNELS_HPP_

// Per-individual evaluation kernels. Each kernel has a serial reference path
// and an OpenMP path; both produce bit-identical results for any thread
// count, because elementwise work is independent and reductions use a fixed
// blocked pairwise tree rather than thread-local partial sums.

#include <cstddef>
#include <span>
#include <vector>

#include "welfare/core.hpp"

namespace welfare {

enum class Exec { Serial, Parallel };

namespace kernels {

/// Leaf size of the blocked reduction tree. Changing it changes rounding.
inline constexpr std::size_t kReduceBlock = 256;

/// Recursive pairwise sum; the split point depends only on the length.
double pairwise_sum(std::span<const double> values);

/// Pairwise sums over fixed blocks of kReduceBlock, then a pairwise sum of the
/// block results. Serial and Parallel agree bit-for-bit.
double blocked_sum(std::span<const double> values, Exec exec = Exec::Parallel);

std::vector<double> margins(const LinearClassifier& classifier, const Dataset& dataset,
                            Exec exec = Exec::Parallel);

/// max(0, 1 - y_i h(x_i)) for every individual.
std::vector<double> hinge_losses(const LinearClassifier& classifier, const Dataset& dataset,
                                 Exec exec = Exec::Parallel);

/// Number of OpenMP threads the parallel path would use (1 without OpenMP).
int max_threads();

}  // namespace kernels
}  // namespace welfare

#endif  // WELFARE_KERNELS_HPP_
