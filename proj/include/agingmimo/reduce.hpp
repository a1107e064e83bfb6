#pragma once

#include <cstddef>
#include <vector>

namespace agingmimo {

// Pairwise reduction over a pre-ordered sequence. The split point depends
// only on the length, so the result is independent of how the terms were
// produced (worker count, scheduling) once the vector order is fixed.
template <typename T>
T pairwise_sum(const std::vector<T>& terms, std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return terms[lo];
    const std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(terms, lo, mid) + pairwise_sum(terms, mid, hi);
}

template <typename T>
T pairwise_sum(const std::vector<T>& terms) {
    return pairwise_sum(terms, 0, terms.size());
}

} // namespace agingmimo
