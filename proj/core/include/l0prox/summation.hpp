#pragma once

#include <cstddef>
#include <span>

namespace l0prox {

/// Pairwise (cascade) summation of term(0) + ... + term(n-1).
///
/// Leaves of at most 8 terms are accumulated in long double; the recursion
/// splits at n/2, so the result depends only on n and the terms, never on
/// how the caller orders its loop.
template <class Term>
long double pairwise_sum_ld(std::size_t begin, std::size_t end, const Term& term) {
  const std::size_t n = end - begin;
  if (n <= 8) {
    long double acc = 0.0L;
    for (std::size_t i = begin; i < end; ++i) acc += static_cast<long double>(term(i));
    return acc;
  }
  const std::size_t mid = begin + n / 2;
  return pairwise_sum_ld(begin, mid, term) + pairwise_sum_ld(mid, end, term);
}

template <class Term>
double pairwise_sum(std::size_t n, const Term& term) {
  return static_cast<double>(pairwise_sum_ld(0, n, term));
}

inline double pairwise_sum(std::span<const double> values) {
  return pairwise_sum(values.size(), [&](std::size_t i) { return values[i]; });
}

}  // namespace l0prox
