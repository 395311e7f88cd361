#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <vector>

namespace dhflow {

/// Execution policy for node-parallel kernels. `Serial` is the reference
/// path; `Parallel` distributes independent per-node work over OpenMP threads.
/// Both produce bit-identical results: per-node work never reads another
/// node's output and reductions are always summed serially.
enum class Exec { Serial, Parallel };

Exec default_exec() noexcept;
void set_default_exec(Exec e) noexcept;

/// RAII override of the process-wide default policy.
class ScopedExec {
 public:
  explicit ScopedExec(Exec e) : prev_(default_exec()) { set_default_exec(e); }
  ~ScopedExec() { set_default_exec(prev_); }
  ScopedExec(const ScopedExec&) = delete;
  ScopedExec& operator=(const ScopedExec&) = delete;

 private:
  Exec prev_;
};

/// Runs f(i) for every i < n. An exception thrown by any f(i) is rethrown
/// on the calling thread; under `Parallel` the one from the lowest index wins,
/// matching what the serial path would raise.
template <class F>
void for_each_index(std::size_t n, F&& f, Exec e = default_exec()) {
  if (e == Exec::Parallel) {
    const long long m = static_cast<long long>(n);
    std::exception_ptr err;
    long long err_at = m;
    std::mutex mu;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < m; ++i) {
      try {
        f(static_cast<std::size_t>(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < err_at) {
          err_at = i;
          err = std::current_exception();
        }
      }
    }
    if (err) std::rethrow_exception(err);
  } else {
    for (std::size_t i = 0; i < n; ++i) f(i);
  }
}

/// Sum of f(i) over i < n. Terms may be evaluated in parallel; the sum is
/// always accumulated in index order.
template <class F>
double ordered_sum(std::size_t n, F&& f, Exec e = default_exec()) {
  std::vector<double> terms(n);
  for_each_index(n, [&](std::size_t i) { terms[i] = f(i); }, e);
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

int max_threads() noexcept;

}  // namespace dhflow
