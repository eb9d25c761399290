#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace hardyspec {

enum class Execution { Serial, Parallel };

/// Sets the OpenMP team size used by the parallel kernels (<= 0 keeps the default).
void set_thread_count(int jobs);
int thread_count();

using PairEntry = std::function<double(std::size_t, std::size_t)>;

/// Symmetric n x n matrix whose (a, b) entry, a <= b, is entry(a, b). Every
/// entry is computed independently, so both variants agree bitwise.
Eigen::MatrixXd assemble_symmetric_serial(std::size_t n, const PairEntry& entry);
Eigen::MatrixXd assemble_symmetric_parallel(std::size_t n, const PairEntry& entry);
Eigen::MatrixXd assemble_symmetric(std::size_t n, const PairEntry& entry, Execution exec);

/// values[i] = sample(i) for a family of independent evaluations.
std::vector<double> evaluate_family_serial(std::size_t count,
                                           const std::function<double(std::size_t)>& sample);
std::vector<double> evaluate_family_parallel(std::size_t count,
                                             const std::function<double(std::size_t)>& sample);
std::vector<double> evaluate_family(std::size_t count,
                                    const std::function<double(std::size_t)>& sample,
                                    Execution exec);

}  // namespace hardyspec
