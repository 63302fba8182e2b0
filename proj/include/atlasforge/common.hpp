#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace af {

// Point sets over a space's point vector. Spaces are capped at 64 points.
using Mask = std::uint64_t;

inline constexpr std::uint8_t kNoPoint = 0xFF;

// Partial/total point function over a carrier: value at index i is the image
// index, kNoPoint outside the domain.
using PointMap = std::vector<std::uint8_t>;

inline int popcount(Mask m) { return __builtin_popcountll(m); }
inline bool subset(Mask a, Mask b) { return (a & ~b) == 0; }
inline bool test_bit(Mask m, std::size_t i) { return (m >> i) & 1u; }

struct MalformedInput : std::runtime_error {
    explicit MalformedInput(const std::string& what) : std::runtime_error(what) {}
};

struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

// Enumeration would exceed the configured cap; never a silent partial answer.
struct BudgetExceeded : std::runtime_error {
    explicit BudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

struct CompositionUndefined : std::runtime_error {
    explicit CompositionUndefined(const std::string& what) : std::runtime_error(what) {}
};

struct InternalConsistencyError : std::runtime_error {
    explicit InternalConsistencyError(const std::string& what) : std::runtime_error(what) {}
};

struct EvaluationError : std::runtime_error {
    explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
};

// Enumeration caps shared by the closure/search routines.
struct Budget {
    std::size_t max_candidates = 1u << 20;
    std::size_t max_maps_per_pair = 1u << 22;
    std::size_t max_cover_families = 1u << 20;
};

enum class ExecMode { Serial, Parallel };

}  // namespace af
