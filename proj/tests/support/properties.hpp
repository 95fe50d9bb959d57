#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace properties {

struct Result {
    std::string module;
    std::string name;
    bool pass;
    std::string detail;
};

struct Property {
    std::string module;
    std::string name;
    std::function<Result()> run;
};

/// Every invariant of every module, each runnable on its own.
std::vector<Property> all(std::uint64_t seed = 20240611);

/// Runs all() in order.
std::vector<Result> run_all(std::uint64_t seed = 20240611);

}  // namespace properties
