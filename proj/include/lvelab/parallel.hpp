#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace lvelab {

/// Worker count handed to modules as an opaque parallel-map capability.
/// Results never depend on the count: tasks write to their own slot and
/// callers reduce in index order.
class WorkerPool {
public:
    explicit WorkerPool(int jobs = 1) : jobs_(jobs < 1 ? 1 : jobs) {}

    /// LVELAB_JOBS if set and positive, else 1.
    static WorkerPool from_environment();

    int jobs() const noexcept { return jobs_; }

    /// Runs task(i) for i in [0, count). The first exception thrown by any
    /// task is rethrown after all workers stop.
    void for_each_index(std::size_t count, const std::function<void(std::size_t)>& task) const {
        const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs_), count);
        if (workers <= 1) {
            for (std::size_t i = 0; i < count; ++i) task(i);
            return;
        }
        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        std::exception_ptr error;
        std::mutex error_mutex;
        auto worker = [&] {
            for (std::size_t i; !failed.load() && (i = next.fetch_add(1)) < count;) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed = true;
                }
            }
        };
        std::vector<std::thread> threads;
        threads.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(worker);
        worker();
        for (auto& t : threads) t.join();
        if (error) std::rethrow_exception(error);
    }

    template <class T, class F>
    std::vector<T> map(std::size_t count, F&& f) const {
        std::vector<T> out(count);
        for_each_index(count, [&](std::size_t i) { out[i] = f(i); });
        return out;
    }

private:
    int jobs_;
};

}  // namespace lvelab
