#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "dynspec/errors.hpp"

namespace dynspec {

/// Extended real value: either a finite double or -infinity.  Used for
/// log spectral radii and entropy values, where -inf is a genuine outcome
/// and must never be confused with a large negative float.
class ExtReal {
 public:
  constexpr ExtReal() : neg_inf_(false), v_(0.0) {}
  constexpr ExtReal(double v) : neg_inf_(false), v_(v) {}  // NOLINT(google-explicit-constructor)

  static constexpr ExtReal neg_inf() {
    ExtReal r;
    r.neg_inf_ = true;
    return r;
  }

  bool is_neg_inf() const { return neg_inf_; }
  bool is_finite() const { return !neg_inf_; }

  /// Finite value; throws if -inf.
  double value() const {
    if (neg_inf_) throw DomainError("ExtReal: value() called on -inf");
    return v_;
  }

  /// Lossy conversion for numerics that tolerate IEEE -inf (plots, reports).
  double to_double() const { return neg_inf_ ? -std::numeric_limits<double>::infinity() : v_; }

  ExtReal operator+(const ExtReal& o) const {
    if (neg_inf_ || o.neg_inf_) return neg_inf();
    return ExtReal(v_ + o.v_);
  }
  ExtReal operator-(double d) const { return neg_inf_ ? neg_inf() : ExtReal(v_ - d); }
  ExtReal operator*(double d) const {
    if (neg_inf_) {
      if (d <= 0.0) throw DomainError("ExtReal: -inf scaled by nonpositive factor");
      return neg_inf();
    }
    return ExtReal(v_ * d);
  }

  bool operator<(const ExtReal& o) const {
    if (neg_inf_) return !o.neg_inf_;
    if (o.neg_inf_) return false;
    return v_ < o.v_;
  }
  bool operator<=(const ExtReal& o) const { return !(o < *this); }
  bool operator>(const ExtReal& o) const { return o < *this; }
  bool operator>=(const ExtReal& o) const { return !(*this < o); }
  bool operator==(const ExtReal& o) const {
    if (neg_inf_ || o.neg_inf_) return neg_inf_ == o.neg_inf_;
    return v_ == o.v_;
  }

  std::string str() const { return neg_inf_ ? "-inf" : std::to_string(v_); }

 private:
  bool neg_inf_;
  double v_;
};

inline ExtReal min(const ExtReal& a, const ExtReal& b) { return a < b ? a : b; }
inline ExtReal max(const ExtReal& a, const ExtReal& b) { return a < b ? b : a; }

}  // namespace dynspec
