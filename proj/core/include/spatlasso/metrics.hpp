#pragma once

#include "spatlasso/types.hpp"

namespace spatlasso {

/// Metric options. `zero_tol` widens what counts as a zero entry (the lasso
/// produces exact zeros, so the default is exact comparison); `literal_pi0`
/// switches the specificity numerator from the intersection of zero sets to
/// the raw count of estimated zeros.
struct MetricOptions {
    double zero_tol = 0.0;
    bool literal_pi0 = false;
};

/// Share of true off-diagonal zero links recovered as zero. NaN when the true
/// matrix has no off-diagonal zeros.
double specificity(const Matrix& w_true, const Matrix& w_hat, const MetricOptions& opts = {});

/// Share of true off-diagonal positive links recovered as nonzero. NaN when
/// the true matrix has no off-diagonal links.
double sensitivity(const Matrix& w_true, const Matrix& w_hat, const MetricOptions& opts = {});

/// Mean of (w_hat - w_true) over the n^2 - n off-diagonal entries.
double weight_bias(const Matrix& w_true, const Matrix& w_hat);

/// Mean absolute off-diagonal error; diagnostic only.
double weight_mae(const Matrix& w_true, const Matrix& w_hat);

/// Mean of (a_hat - a_true) over all T*n cells.
double mean_bias(const Matrix& a_true, const Matrix& a_hat);

/// sqrt(mean((fitted - observed)^2)) over all cells.
double fitted_rmse(const Matrix& panel, const Matrix& fitted);

struct MetricReport {
    double specificity = 0.0;  // Pi_0
    double sensitivity = 0.0;  // Pi_w
    double weight_bias = 0.0;  // B_w
    double mean_bias = 0.0;    // B_a
    double fitted_rmse = 0.0;  // RMSE_y
    double weight_mae = 0.0;   // diagnostic
};

MetricReport evaluate_all(const Matrix& w_true, const Matrix& w_hat, const Matrix& a_true,
                          const Matrix& a_hat, const Matrix& panel, const Matrix& fitted,
                          const MetricOptions& opts = {});

}  // namespace spatlasso
