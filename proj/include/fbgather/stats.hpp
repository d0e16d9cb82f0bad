#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <functional>
#include <thread>
#include <vector>

namespace fbgather {

/// Streaming mean/variance (Welford) with Chan's pairwise merge.
class RunningStats {
public:
    void add(double v) {
        ++n_;
        const double delta = v - mean_;
        mean_ += delta / static_cast<double>(n_);
        m2_ += delta * (v - mean_);
    }

    void merge(const RunningStats& other) {
        if (other.n_ == 0) return;
        if (n_ == 0) {
            *this = other;
            return;
        }
        const double total = static_cast<double>(n_ + other.n_);
        const double delta = other.mean_ - mean_;
        mean_ += delta * static_cast<double>(other.n_) / total;
        m2_ += other.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(other.n_) / total;
        n_ += other.n_;
    }

    long count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double standard_error() const { return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

private:
    long n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. Callers write results by index,
/// so output never depends on scheduling.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    const auto workers = static_cast<std::size_t>(std::max(1, jobs));
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    const std::size_t count = std::min(workers, n);
    pool.reserve(count);
    for (std::size_t w = 0; w < count; ++w)
        pool.emplace_back([&] {
            try {
                for (std::size_t i = next++; i < n; i = next++) fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = n;
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace fbgather
