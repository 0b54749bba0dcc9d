#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gcl {

/// Worker count and chunk size for sample-parallel estimators.
///
/// The chunk size fixes which stream draws which samples, so it is part of
/// the configuration; the worker count only changes scheduling.
struct ExecConfig {
    unsigned workers = 1;
    std::size_t chunk_size = std::size_t{1} << 16;
};

/// Per-thread current configuration (defaults to one worker).
ExecConfig& current_exec();

/// Installs `cfg` for the calling thread until destruction.
class ScopedExec {
  public:
    explicit ScopedExec(ExecConfig cfg) : saved_(current_exec()) { current_exec() = cfg; }
    ~ScopedExec() { current_exec() = saved_; }
    ScopedExec(const ScopedExec&) = delete;
    ScopedExec& operator=(const ScopedExec&) = delete;

  private:
    ExecConfig saved_;
};

/// Runs fn(index) for index in [0, count) on up to `workers` threads and
/// returns the results in index order.
template <class T, class F>
std::vector<T> parallel_map(std::size_t count, unsigned workers, F&& fn)
{
    std::vector<T> out(count);
    const unsigned nthreads = static_cast<unsigned>(std::min<std::size_t>(std::max(1U, workers), count));
    if (nthreads <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            out[i] = fn(i);
        }
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const ExecConfig inherited = current_exec();
    auto work = [&] {
        // Nested estimators inside a worker stay sequential.
        ScopedExec scope(ExecConfig{1, inherited.chunk_size});
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) {
                return;
            }
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(count);
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) {
        threads.emplace_back(work);
    }
    for (auto& t : threads) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return out;
}

/// Splits `total` samples into chunks of the current chunk size and maps
/// fn(chunk_index, chunk_count) over them. Results come back in chunk order,
/// so an in-order reduction is independent of the worker count.
template <class T, class F>
std::vector<T> map_chunks(std::uint64_t total, F&& fn)
{
    const ExecConfig cfg = current_exec();
    const std::uint64_t chunk = std::max<std::uint64_t>(1, cfg.chunk_size);
    const std::size_t nchunks = static_cast<std::size_t>((total + chunk - 1) / chunk);
    return parallel_map<T>(nchunks, cfg.workers, [&](std::size_t c) {
        const std::uint64_t begin = static_cast<std::uint64_t>(c) * chunk;
        const std::uint64_t count = std::min<std::uint64_t>(chunk, total - begin);
        return fn(static_cast<std::uint64_t>(c), count);
    });
}

} // namespace gcl
