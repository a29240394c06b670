#pragma once

#include <complex>
#include <span>

namespace apharm {

// Pairwise (cascade) summation in index order. The split points depend only on
// the length, so the result is the same for every execution schedule that
// produced the inputs.
double pairwise_sum(std::span<const double> v);
std::complex<double> pairwise_sum(std::span<const std::complex<double>> v);

}  // namespace apharm
