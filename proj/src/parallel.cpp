#include "todalab/parallel.hpp"

#include <tbb/global_control.h>

#include <memory>
#include <mutex>

namespace todalab {

namespace {
std::mutex g_mutex;
std::unique_ptr<tbb::global_control> g_control;
int g_threads = 0;
}  // namespace

void set_max_threads(int threads) {
    std::lock_guard<std::mutex> lock(g_mutex);
    g_control.reset();
    g_threads = threads > 0 ? threads : 0;
    if (g_threads > 0)
        g_control = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism, g_threads);
}

int max_threads() {
    return static_cast<int>(tbb::global_control::active_value(tbb::global_control::max_allowed_parallelism));
}

}  // namespace todalab
