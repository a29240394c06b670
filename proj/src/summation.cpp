#include "apharm/summation.hpp"

namespace apharm {
namespace {

template <class T>
T cascade(std::span<const T> v) {
  constexpr std::size_t kLeaf = 8;
  if (v.size() <= kLeaf) {
    T s{};
    for (const T& x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return cascade(v.first(half)) + cascade(v.subspan(half));
}

}  // namespace

double pairwise_sum(std::span<const double> v) { return cascade(v); }

std::complex<double> pairwise_sum(std::span<const std::complex<double>> v) { return cascade(v); }

}  // namespace apharm
