#include "lshawkes/numeric.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace lshawkes {

namespace numeric {

std::vector<double> clean_breaks(std::vector<double> pts, double lo, double hi) {
    std::erase_if(pts, [lo, hi](double x) { return !(x > lo && x < hi); });
    pts.push_back(lo);
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

} // namespace numeric

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a) {
    return splitmix64(splitmix64(master) ^ (a + 0x632BE59BD9B4E019ULL));
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(master, a), b);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const std::size_t hw = std::max(1U, std::thread::hardware_concurrency());
    const std::size_t workers = std::min(hw, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) {
                    try {
                        body(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace lshawkes
