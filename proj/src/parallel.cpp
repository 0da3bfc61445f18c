#include "lvelab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace lvelab {

WorkerPool WorkerPool::from_environment() {
    if (const char* env = std::getenv("LVELAB_JOBS")) {
        try {
            const int jobs = std::stoi(env);
            if (jobs > 0) return WorkerPool(jobs);
        } catch (const std::exception&) {
        }
    }
    return WorkerPool(1);
}

}  // namespace lvelab
