#include "dhflow/kernels.hpp"

#include <atomic>

#include <omp.h>

namespace dhflow {

namespace {
std::atomic<Exec> g_exec{Exec::Parallel};
}

Exec default_exec() noexcept { return g_exec.load(std::memory_order_relaxed); }
void set_default_exec(Exec e) noexcept { g_exec.store(e, std::memory_order_relaxed); }
int max_threads() noexcept { return omp_get_max_threads(); }

}  // namespace dhflow
