#include "reserving/fuzzy.hpp"

namespace reserving {

double membership(const Tfn& t, double x) {
  if (x == t.center) return 1.0;
  if (x < t.center) {
    if (t.left == 0.0) throw ZeroSpreadQuery();
    const double m = 1.0 - (t.center - x) / t.left;
    return m > 0.0 ? m : 0.0;
  }
  if (t.right == 0.0) throw ZeroSpreadQuery();
  if (x > t.center + t.right) return 0.0;
  return 1.0 - (x - t.center) / t.right;
}

HLevelInterval h_level(const Tfn& t, double h) {
  if (!(h >= 0.0 && h <= 1.0)) throw HOutOfRange();
  return {t.center - t.left * (1.0 - h), t.center + t.right * (1.0 - h), h};
}

Tfn sum_tfn(std::span<const Tfn> tfns) {
  if (tfns.empty()) throw EmptySequence();
  Tfn total;
  for (const auto& t : tfns) {
    total.left += t.left;
    total.center += t.center;
    total.right += t.right;
  }
  return total;
}

double expected_value(const Tfn& t, double pi) {
  if (!(pi >= 0.0 && pi <= 1.0)) throw PiOutOfRange();
  return (1.0 - pi) * (t.center - t.left) / 2.0 +
         pi * (t.center + t.right) / 2.0;
}

}  // namespace reserving
