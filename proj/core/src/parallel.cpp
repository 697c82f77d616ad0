#include "wbomd/parallel.hpp"

namespace wbomd {

int resolve_thread_count(int requested)
{
    if (requested >= 1)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

double pairwise_sum(std::span<const double> values)
{
    const std::size_t n = values.size();
    if (n <= 8) {
        double acc = 0.0;
        for (double v : values)
            acc += v;
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

} // namespace wbomd
