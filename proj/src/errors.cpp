#include "treedamp/errors.hpp"

#include <iostream>
#include <mutex>
#include <set>

namespace treedamp {

void warn(const std::string& message) {
    static std::mutex mutex;
    static std::set<std::string> seen;
    std::lock_guard lock(mutex);
    if (seen.insert(message).second) {
        std::cerr << "treedamp: warning: " << message << '\n';
    }
}

}  // namespace treedamp
