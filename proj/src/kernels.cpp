#include "hardyspec/kernels.hpp"

#include <exception>

#include <omp.h>

namespace hardyspec {

void set_thread_count(int jobs) {
  if (jobs > 0) omp_set_num_threads(jobs);
}

int thread_count() { return omp_get_max_threads(); }

Eigen::MatrixXd assemble_symmetric_serial(std::size_t n, const PairEntry& entry) {
  Eigen::MatrixXd out(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a; b < n; ++b) out(a, b) = out(b, a) = entry(a, b);
  return out;
}

Eigen::MatrixXd assemble_symmetric_parallel(std::size_t n, const PairEntry& entry) {
  Eigen::MatrixXd out(n, n);
  // flatten the upper triangle so rows of unequal length balance across threads
  const long long pairs = static_cast<long long>(n * (n + 1) / 2);
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 8)
  for (long long idx = 0; idx < pairs; ++idx) {
    std::size_t a = 0;
    long long rest = idx;
    while (rest >= static_cast<long long>(n - a)) {
      rest -= static_cast<long long>(n - a);
      ++a;
    }
    const std::size_t b = a + static_cast<std::size_t>(rest);
    try {
      out(a, b) = out(b, a) = entry(a, b);
    } catch (...) {
#pragma omp critical
      failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

Eigen::MatrixXd assemble_symmetric(std::size_t n, const PairEntry& entry, Execution exec) {
  return exec == Execution::Parallel ? assemble_symmetric_parallel(n, entry)
                                     : assemble_symmetric_serial(n, entry);
}

std::vector<double> evaluate_family_serial(std::size_t count,
                                           const std::function<double(std::size_t)>& sample) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = sample(i);
  return out;
}

std::vector<double> evaluate_family_parallel(std::size_t count,
                                             const std::function<double(std::size_t)>& sample) {
  std::vector<double> out(count);
  std::exception_ptr failure;
  const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    try {
      out[i] = sample(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical
      failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<double> evaluate_family(std::size_t count,
                                    const std::function<double(std::size_t)>& sample,
                                    Execution exec) {
  return exec == Execution::Parallel ? evaluate_family_parallel(count, sample)
                                     : evaluate_family_serial(count, sample);
}

}  // namespace hardyspec
