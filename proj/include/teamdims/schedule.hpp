#pragma once

#include <cstddef>
#include <string>

#include "teamdims/error.hpp"

namespace teamdims {

enum class ScheduleKind { linear_decay, constant };

inline std::string to_string(ScheduleKind kind) {
    return kind == ScheduleKind::linear_decay ? "linear_decay" : "constant";
}

inline ScheduleKind schedule_from_string(const std::string& s) {
    if (s == "linear_decay") return ScheduleKind::linear_decay;
    if (s == "constant") return ScheduleKind::constant;
    throw validation_error("unknown schedule: " + s);
}

// Learning rate at 0-based optimizer step `step`. Linear ramp from 0 so that
// lr(warmup_steps) == peak exactly, then linear decay so that
// lr(total_steps - 1) == 0 exactly. Both endpoint identities are relied on
// downstream; keep them bit-exact.
inline double learning_rate(std::size_t step, double peak, std::size_t warmup_steps,
                            std::size_t total_steps,
                            ScheduleKind kind = ScheduleKind::linear_decay) {
    if (total_steps == 0) throw validation_error("learning_rate: total_steps must be positive");
    if (warmup_steps >= total_steps)
        throw validation_error("learning_rate: warmup_steps must be < total_steps");
    if (step >= total_steps) step = total_steps - 1;

    if (warmup_steps > 0 && step <= warmup_steps)
        return peak * static_cast<double>(step) / static_cast<double>(warmup_steps);
    if (step == 0) return peak; // warmup_steps == 0
    if (kind == ScheduleKind::constant) return peak;

    std::size_t last = total_steps - 1; // here step > warmup_steps, so last > warmup_steps
    return peak * static_cast<double>(last - step) / static_cast<double>(last - warmup_steps);
}

} // namespace teamdims
