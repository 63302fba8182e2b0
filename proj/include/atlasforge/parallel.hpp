#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "atlasforge/common.hpp"

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace af {

// Applies fn to every index in [0, n) and keeps the engaged results in index
// order, so serial and parallel runs produce identical vectors.
template <typename T, typename Fn>
std::vector<T> filter_map_indexed(std::size_t n, ExecMode mode, Fn&& fn) {
    std::vector<std::optional<T>> slots(n);
#if defined(_OPENMP)
    if (mode == ExecMode::Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            slots[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < n; ++i) slots[i] = fn(i);
    }
#else
    (void)mode;
    for (std::size_t i = 0; i < n; ++i) slots[i] = fn(i);
#endif
    std::vector<T> out;
    for (auto& s : slots)
        if (s.has_value()) out.push_back(std::move(*s));
    return out;
}

// All-of over [0, n) with early exit in serial mode.
template <typename Fn>
bool all_of_indexed(std::size_t n, ExecMode mode, Fn&& fn) {
#if defined(_OPENMP)
    if (mode == ExecMode::Parallel) {
        bool ok = true;
#pragma omp parallel for schedule(dynamic, 16) reduction(&& : ok)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            ok = ok && fn(static_cast<std::size_t>(i));
        return ok;
    }
#else
    (void)mode;
#endif
    for (std::size_t i = 0; i < n; ++i)
        if (!fn(i)) return false;
    return true;
}

}  // namespace af
