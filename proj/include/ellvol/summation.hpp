#pragma once

#include <cmath>
#include <limits>

namespace ellvol {

/// Compensated (Kahan–Babuška / Neumaier) running sum.
///
/// Unlike plain Kahan summation the correction term also survives when an
/// incoming term is larger in magnitude than the running sum, which is the
/// common situation for the increasing series summed in `asymptotics`.
class CompensatedSum {
 public:
  CompensatedSum& operator+=(double value) {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  [[nodiscard]] double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// Streaming log(Σ exp(x_i)) with a running max shift.
///
/// The shifted partial sum is kept compensated; when a new maximum arrives the
/// accumulated sum is rescaled once.
class LogSumExp {
 public:
  void add(double x) {
    if (x == -std::numeric_limits<double>::infinity()) return;
    if (x > max_) {
      if (max_ != -std::numeric_limits<double>::infinity()) {
        const double scale = std::exp(max_ - x);
        const double old = shifted_.value();
        shifted_ = CompensatedSum{};
        shifted_ += old * scale;
      }
      max_ = x;
    }
    shifted_ += std::exp(x - max_);
  }

  /// log of the accumulated sum; -inf when nothing was added.
  [[nodiscard]] double value() const {
    if (max_ == -std::numeric_limits<double>::infinity()) return max_;
    return max_ + std::log(shifted_.value());
  }

  [[nodiscard]] double max() const { return max_; }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  CompensatedSum shifted_;
};

}  // namespace ellvol
