#pragma once

#include <cstddef>
#include <functional>

namespace schrodlab {

// Number of worker threads used by parallel_for. Defaults to the
// SCHRODLAB_THREADS environment variable, else hardware concurrency.
unsigned thread_count();
void set_thread_count(unsigned k);

// Runs body(i) for i in [0, count). Each index writes only its own output,
// so results do not depend on the thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace schrodlab
