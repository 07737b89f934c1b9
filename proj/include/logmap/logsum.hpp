#pragma once

#include <cmath>
#include <limits>

namespace logmap {

// Streaming log-sum-exp: after add(t_1), ..., add(t_k), value() returns
// ln(exp(t_1) + ... + exp(t_k)) without leaving log space. The running
// maximum is rebased on the fly so the accumulated sum stays in [1, k].
class LogSumExp {
 public:
  void add(double t) {
    if (count_ == 0) {
      max_ = t;
      sum_ = 1.0;
    } else if (t <= max_) {
      sum_ += std::exp(t - max_);
    } else {
      sum_ = sum_ * std::exp(max_ - t) + 1.0;
      max_ = t;
    }
    ++count_;
  }

  double value() const {
    if (count_ == 0) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_);
  }

  std::size_t count() const { return count_; }

 private:
  double max_ = 0.0;
  double sum_ = 0.0;
  std::size_t count_ = 0;
};

}  // namespace logmap
