#include "spatlasso/metrics.hpp"

#include <cmath>
#include <limits>

namespace spatlasso {

namespace {

void check_square_pair(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
        throw InvalidInput("weight metrics: matrices must be square with equal dimensions");
    }
}

bool is_zero(double v, double tol) { return std::abs(v) <= tol; }

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

double specificity(const Matrix& w_true, const Matrix& w_hat, const MetricOptions& opts) {
    check_square_pair(w_true, w_hat);
    const int n = static_cast<int>(w_true.rows());
    int true_zeros = 0;
    int matched = 0;
    int est_zeros = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            bool tz = is_zero(w_true(i, j), opts.zero_tol);
            bool ez = is_zero(w_hat(i, j), opts.zero_tol);
            if (tz) ++true_zeros;
            if (ez) ++est_zeros;
            if (tz && ez) ++matched;
        }
    }
    if (true_zeros == 0) return kNaN;
    return static_cast<double>(opts.literal_pi0 ? est_zeros : matched) /
           static_cast<double>(true_zeros);
}

double sensitivity(const Matrix& w_true, const Matrix& w_hat, const MetricOptions& opts) {
    check_square_pair(w_true, w_hat);
    const int n = static_cast<int>(w_true.rows());
    int true_links = 0;
    int matched = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (!is_zero(w_true(i, j), opts.zero_tol)) {
                ++true_links;
                if (!is_zero(w_hat(i, j), opts.zero_tol)) ++matched;
            }
        }
    }
    if (true_links == 0) return kNaN;
    return static_cast<double>(matched) / static_cast<double>(true_links);
}

double weight_bias(const Matrix& w_true, const Matrix& w_hat) {
    check_square_pair(w_true, w_hat);
    const int n = static_cast<int>(w_true.rows());
    if (n < 2) throw InvalidInput("weight_bias: need at least 2 locations");
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j) acc += w_hat(i, j) - w_true(i, j);
        }
    }
    return acc / static_cast<double>(n * n - n);
}

double weight_mae(const Matrix& w_true, const Matrix& w_hat) {
    check_square_pair(w_true, w_hat);
    const int n = static_cast<int>(w_true.rows());
    if (n < 2) throw InvalidInput("weight_mae: need at least 2 locations");
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j) acc += std::abs(w_hat(i, j) - w_true(i, j));
        }
    }
    return acc / static_cast<double>(n * n - n);
}

double mean_bias(const Matrix& a_true, const Matrix& a_hat) {
    if (a_true.rows() != a_hat.rows() || a_true.cols() != a_hat.cols()) {
        throw InvalidInput("mean_bias: shape mismatch");
    }
    return (a_hat - a_true).sum() / static_cast<double>(a_true.size());
}

double fitted_rmse(const Matrix& panel, const Matrix& fitted) {
    if (panel.rows() != fitted.rows() || panel.cols() != fitted.cols()) {
        throw InvalidInput("fitted_rmse: shape mismatch");
    }
    return std::sqrt((fitted - panel).squaredNorm() / static_cast<double>(panel.size()));
}

MetricReport evaluate_all(const Matrix& w_true, const Matrix& w_hat, const Matrix& a_true,
                          const Matrix& a_hat, const Matrix& panel, const Matrix& fitted,
                          const MetricOptions& opts) {
    MetricReport r;
    r.specificity = specificity(w_true, w_hat, opts);
    r.sensitivity = sensitivity(w_true, w_hat, opts);
    r.weight_bias = weight_bias(w_true, w_hat);
    r.mean_bias = mean_bias(a_true, a_hat);
    r.fitted_rmse = fitted_rmse(panel, fitted);
    r.weight_mae = weight_mae(w_true, w_hat);
    return r;
}

}  // namespace spatlasso
