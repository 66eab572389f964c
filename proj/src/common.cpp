#include "common.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace survkit {

double quantile_of(std::vector<double> v, double q) {
    require(!v.empty(), ErrorCode::Validation, "quantile of empty vector");
    require(q >= 0.0 && q <= 1.0, ErrorCode::Validation, "quantile level outside [0, 1]");
    std::sort(v.begin(), v.end());
    if (v.size() == 1) return v[0];
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[hi] - v[lo]);
}

FiveNumberSummary five_number_summary(const std::vector<double>& v) {
    require(!v.empty(), ErrorCode::Validation, "five-number summary of empty vector");
    FiveNumberSummary s{};
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    s.q1 = quantile_of(v, 0.25);
    s.median = quantile_of(v, 0.5);
    s.q3 = quantile_of(v, 0.75);
    return s;
}

void parallel_for(std::size_t n, unsigned thread_count, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    if (thread_count <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count, n));
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        threads.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("SURVKIT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return 1;
}

}  // namespace survkit
