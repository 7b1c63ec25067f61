#pragma once

#include <stdexcept>
#include <string>

namespace ggnam {

struct InvalidSpecError : std::runtime_error {
    explicit InvalidSpecError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShapeError : std::runtime_error {
    explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InvalidInputError : std::runtime_error {
    explicit InvalidInputError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TrainingDivergedError : std::runtime_error {
    TrainingDivergedError(const std::string& msg, int epoch)
        : std::runtime_error(msg), epoch(epoch) {}
    int epoch;
};

struct PartitionError : std::runtime_error {
    explicit PartitionError(const std::string& msg) : std::runtime_error(msg) {}
};

struct LoadError : std::runtime_error {
    explicit LoadError(const std::string& msg) : std::runtime_error(msg) {}
};

struct MetricError : std::runtime_error {
    explicit MetricError(const std::string& msg) : std::runtime_error(msg) {}
};

struct LookupError : std::runtime_error {
    explicit LookupError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ggnam
