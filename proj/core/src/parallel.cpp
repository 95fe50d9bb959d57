#include "semiflow/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace semiflow {

std::size_t worker_count() {
    std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SEMIFLOW_THREADS")) {
        try {
            const long cap = std::stol(env);
            if (cap > 0) return std::min<std::size_t>(hw, static_cast<std::size_t>(cap));
        } catch (const std::exception&) {
        }
    }
    return hw;
}

}  // namespace semiflow
