#pragma once

#include <cstddef>
#include <functional>

namespace aircast {

/// Runs body(i) for i in [0, count) on up to `workers` threads. The first
/// exception thrown by any call is rethrown after all threads have joined.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& body);

} // namespace aircast
