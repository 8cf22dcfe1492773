#pragma once

#include <cstddef>
#include <cstdint>

namespace aperiodiq {

// serial kernels are the reference; parallel ones must produce identical results
enum class Exec { serial, parallel };

template <class F>
void for_each_index(std::size_t n, Exec exec, F&& f) {
    if (exec == Exec::parallel) {
        const std::int64_t nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 4)
        for (std::int64_t i = 0; i < nn; ++i) f(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < n; ++i) f(i);
    }
}

}  // namespace aperiodiq
