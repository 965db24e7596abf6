#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>

namespace lpe {

using Clock = std::chrono::steady_clock;
using Deadline = std::optional<Clock::time_point>;

class DeadlineExceeded : public std::runtime_error {
 public:
  DeadlineExceeded() : std::runtime_error("time budget exhausted") {}
};

inline void check_deadline(const Deadline& deadline) {
  if (deadline && Clock::now() > *deadline) throw DeadlineExceeded();
}

}  // namespace lpe
