#pragma once

#include <span>

#include "reserving/errors.hpp"

namespace reserving {

/// Triangular fuzzy number. The (left, right) channels are interpreted either
/// as endpoints (left <= center <= right) or as nonnegative spreads around the
/// center; each operation documents which encoding it consumes. The reserving
/// pipeline works with endpoint triples throughout.
struct Tfn {
  double left = 0.0;
  double center = 0.0;
  double right = 0.0;

  friend bool operator==(const Tfn&, const Tfn&) = default;
};

struct HLevelInterval {
  double lo = 0.0;
  double hi = 0.0;
  double h = 0.0;
};

/// Piecewise-linear membership of x for a spread-encoded TFN. Returns 1 at
/// the center. Querying off-center on a side with zero spread throws
/// ZeroSpreadQuery (the membership degenerates to the indicator of the
/// center).
double membership(const Tfn& spread_tfn, double x);

/// h-level interval [center - left*(1-h), center + right*(1-h)] of a
/// spread-encoded TFN; h in [0,1].
HLevelInterval h_level(const Tfn& spread_tfn, double h);

/// Component-wise sum of endpoint-encoded TFNs. Throws EmptySequence.
Tfn sum_tfn(std::span<const Tfn> tfns);

/// Risk-aversion expected value with parameter pi in [0,1]:
///   (1-pi)*(center - left)/2 + pi*(center + right)/2.
/// Applied verbatim to the endpoint triple the pipeline carries. Note the
/// pi=0 branch reads (center - left)/2, which is near zero for endpoint
/// triples; callers wanting a symmetric defuzzifier should not rely on small
/// pi.
double expected_value(const Tfn& t, double pi);

}  // namespace reserving
