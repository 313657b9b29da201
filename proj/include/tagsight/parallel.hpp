#pragma once

#include <cstddef>
#include <functional>

namespace tagsight {

// Runs fn(i) for i in [0, count) on up to `workers` threads and rethrows the
// lowest-index failure.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

}  // namespace tagsight
