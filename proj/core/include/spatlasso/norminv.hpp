#pragma once

namespace spatlasso {

/// Standard normal CDF.
double stdnormal_cdf(double x);

/// Standard normal quantile for p in (0, 1); accurate to near machine
/// precision (rational initial guess plus one Halley refinement).
double stdnormal_quantile(double p);

}  // namespace spatlasso
