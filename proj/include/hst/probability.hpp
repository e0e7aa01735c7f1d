#pragma once

#include <cmath>

#include "hst/errors.hpp"

namespace hst {

/// A probability in the open interval (0, 1).
///
/// Internally stores one side of the pair (p, 1-p) exactly so that
/// probabilities within a few ulp of 1 keep their tail information.
/// Constructing from the upper tail (Probability::from_upper_tail) preserves
/// full relative precision of 1-p even when p rounds to 1.0 in double
/// arithmetic; value() then returns the nearest representable double.
class Probability {
 public:
  explicit Probability(double p) : tail_(p), is_upper_(false) {
    if (!std::isfinite(p) || p <= 0.0 || p >= 1.0)
      throw DomainError("probability must lie strictly inside (0, 1)");
  }

  static Probability from_lower_tail(double p) { return Probability(p); }

  static Probability from_upper_tail(double q) {
    if (!std::isfinite(q) || q <= 0.0 || q >= 1.0)
      throw DomainError("upper-tail probability must lie strictly inside (0, 1)");
    Probability r;
    r.tail_ = q;
    r.is_upper_ = true;
    return r;
  }

  /// Nearest double to the probability; may round to 1.0 when the upper tail
  /// is below one ulp. Use lower_tail()/upper_tail() for tail-exact work.
  double value() const { return is_upper_ ? 1.0 - tail_ : tail_; }

  double lower_tail() const { return value(); }
  double upper_tail() const { return is_upper_ ? tail_ : 1.0 - tail_; }

  /// The smaller of the two tails, exact on whichever side was stored.
  double smaller_tail() const {
    double v = tail_ <= 0.5 ? tail_ : 1.0 - tail_;
    return v;
  }

  /// True when the smaller tail is the upper one (probability > 1/2).
  bool smaller_tail_is_upper() const { return is_upper_ == (tail_ <= 0.5); }

 private:
  Probability() : tail_(0.5), is_upper_(false) {}
  double tail_;
  bool is_upper_;
};

}  // namespace hst
