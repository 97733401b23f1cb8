#pragma once

#include <cmath>
#include <string>

#include "ldg/error.hpp"

namespace ldg {

/// Bulk coefficients a^2, b^2, c^2 and the elastic constant L.
class MaterialParams {
 public:
  MaterialParams(double a2, double b2, double c2, double L = 1.0) : a2_(a2), b2_(b2), c2_(c2), L_(L) {
    if (!(a2 > 0 && b2 > 0 && c2 > 0 && L > 0))
      throw Error(ErrorCode::InvalidArgument, "material constants and L must be positive");
  }

  double a2() const { return a2_; }
  double b2() const { return b2_; }
  double c2() const { return c2_; }
  double L() const { return L_; }

  /// Preferred uniaxial order (b^2 + sqrt(b^4 + 24 a^2 c^2)) / (4 c^2).
  double s_plus() const { return (b2_ + std::sqrt(b2_ * b2_ + 24.0 * a2_ * c2_)) / (4.0 * c2_); }

  /// 6 a^2 + b^2 s_+, the denominator shared by the corrector formulas.
  double corrector_denominator() const { return 6.0 * a2_ + b2_ * s_plus(); }

  MaterialParams with_L(double L) const { return {a2_, b2_, c2_, L}; }

 private:
  double a2_, b2_, c2_, L_;
};

}  // namespace ldg
