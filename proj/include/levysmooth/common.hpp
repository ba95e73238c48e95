#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace levysmooth {

using Vec = std::vector<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Outcome of a numerical evaluation that may fail to be a plain number.
enum class EvalStatus {
    Ok,
    Divergent,      // the defining integral/moment is provably infinite
    Inconclusive,   // budget exhausted without a provable answer
    NotApplicable,  // the quantity is undefined for this model
    Unreliable      // value produced, but diagnostics flag it (e.g. diverged paths)
};

inline const char* to_string(EvalStatus s) {
    switch (s) {
        case EvalStatus::Ok: return "ok";
        case EvalStatus::Divergent: return "divergent";
        case EvalStatus::Inconclusive: return "inconclusive";
        case EvalStatus::NotApplicable: return "not_applicable";
        case EvalStatus::Unreliable: return "unreliable";
    }
    return "?";
}

struct ScalarResult {
    double value = kNaN;
    EvalStatus status = EvalStatus::Ok;

    bool ok() const { return status == EvalStatus::Ok; }
    static ScalarResult of(double v) { return {v, EvalStatus::Ok}; }
    static ScalarResult divergent() { return {kInf, EvalStatus::Divergent}; }
    static ScalarResult inconclusive() { return {kNaN, EvalStatus::Inconclusive}; }
    static ScalarResult not_applicable() { return {kNaN, EvalStatus::NotApplicable}; }
};

// Monte-Carlo estimate with its standard error.
struct McEstimate {
    double value = kNaN;
    double stderr_ = kNaN;
    std::size_t n = 0;
    EvalStatus status = EvalStatus::Ok;
};

inline void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

inline double sqr(double x) { return x * x; }

}  // namespace levysmooth
