#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>

namespace odereduce {

struct BudgetExceeded : std::runtime_error {
  BudgetExceeded() : std::runtime_error("time budget exceeded") {}
};

// Wall-clock budget; polled at coarse points of long computations.
class Deadline {
 public:
  Deadline() = default;
  explicit Deadline(double seconds) {
    if (seconds > 0)
      end_ = std::chrono::steady_clock::now() +
             std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(seconds));
  }

  bool expired() const { return end_ && std::chrono::steady_clock::now() >= *end_; }
  void check() const {
    if (expired()) throw BudgetExceeded();
  }

 private:
  std::optional<std::chrono::steady_clock::time_point> end_;
};

}  // namespace odereduce
