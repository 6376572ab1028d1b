#include "welfare/kernels.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace welfare::kernels {

namespace {

template <typename Fn>
void for_each_index(std::size_t n, Exec exec, Fn&& fn) {
  if (exec == Exec::Serial) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < count; ++i) fn(static_cast<std::size_t>(i));
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double blocked_sum(std::span<const double> values, Exec exec) {
  const std::size_t blocks = (values.size() + kReduceBlock - 1) / kReduceBlock;
  std::vector<double> partial(blocks, 0.0);
  for_each_index(blocks, exec, [&](std::size_t blk) {
    const std::size_t begin = blk * kReduceBlock;
    const std::size_t len = std::min(kReduceBlock, values.size() - begin);
    partial[blk] = pairwise_sum(values.subspan(begin, len));
  });
  return pairwise_sum(partial);
}

std::vector<double> margins(const LinearClassifier& classifier, const Dataset& dataset, Exec exec) {
  require(classifier.dim() == dataset.dim(), "dimension mismatch: classifier has " +
                                                 std::to_string(classifier.dim()) + ", dataset has " +
                                                 std::to_string(dataset.dim()));
  std::vector<double> out(dataset.size());
  for_each_index(dataset.size(), exec,
                 [&](std::size_t i) { out[i] = margin(classifier, dataset[i].features); });
  return out;
}

std::vector<double> hinge_losses(const LinearClassifier& classifier, const Dataset& dataset, Exec exec) {
  std::vector<double> out = margins(classifier, dataset, exec);
  for_each_index(out.size(), exec, [&](std::size_t i) {
    out[i] = std::max(0.0, 1.0 - sign_of(dataset[i].label) * out[i]);
  });
  return out;
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace welfare::kernels
