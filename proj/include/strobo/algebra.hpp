#pragma once

// Scalar hooks shared by algebra-generic code. Each algebra (double,
// TruncatedSeries, GradedSeries) provides lift/zero_like/is_zero next to its
// definition; the double overloads live here so templates see them at
// definition time.

namespace strobo {

/// Constant `c` in the same algebra (and shape) as `like`.
inline double lift(double, double c) { return c; }
inline double zero_like(double) { return 0.0; }
inline bool is_zero(double x) { return x == 0.0; }

}  // namespace strobo
