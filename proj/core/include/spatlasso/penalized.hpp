#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "spatlasso/types.hpp"

namespace spatlasso {

/// Column-compressed design matrix. Columns keep only their nonzero rows, so
/// the coordinate-descent sweeps cost O(nnz) instead of O(m*p); the step and
/// Kronecker designs of the two estimation stages are block-sparse by
/// construction.
class DesignMatrix {
  public:
    DesignMatrix() = default;
    DesignMatrix(int rows, int cols);

    static DesignMatrix from_dense(const Matrix& x);

    int rows() const { return m_; }
    int cols() const { return p_; }

    /// Overwrites column j with the given nonzero pattern (row indices strictly
    /// increasing, values finite).
    void set_column(int j, std::vector<int> row_idx, std::vector<double> values);
    /// Convenience: column j is 1.0 on rows [first_row, last_row].
    void set_step_column(int j, int first_row, int last_row);

    double column_dot(int j, const Vector& v) const;
    void column_axpy(int j, double alpha, Vector& v) const;
    double column_squared_norm(int j) const;

    Vector multiply(const Vector& beta) const;
    Matrix to_dense() const;

    /// Design restricted to a row subset (order preserved, rows renumbered).
    DesignMatrix select_rows(const std::vector<int>& keep) const;

    const std::vector<int>& column_rows(int j) const { return cols_[static_cast<std::size_t>(j)].rows; }
    const std::vector<double>& column_values(int j) const { return cols_[static_cast<std::size_t>(j)].vals; }

  private:
    struct Column {
        std::vector<int> rows;
        std::vector<double> vals;
    };
    int m_ = 0;
    int p_ = 0;
    std::vector<Column> cols_;
};

/// A penalized least-squares problem: minimize ||X b - y||^2 + lambda * sum_j
/// penalty_weights[j] * |b_j| subject to lower <= b <= upper, optionally with
/// an unpenalized intercept. An infinite penalty weight pins the coefficient
/// at zero; bounds must bracket zero so the null model is always feasible.
struct PenalizedProblem {
    DesignMatrix design;
    Vector response;
    Vector penalty_weights;
    Vector lower_bounds;
    Vector upper_bounds;
    bool intercept = false;

    PenalizedProblem() = default;
    PenalizedProblem(DesignMatrix x, Vector y, Vector w, Vector lo, Vector hi, bool with_intercept);

    /// Unit penalty weights and unbounded coefficients.
    static PenalizedProblem plain(DesignMatrix x, Vector y, bool with_intercept = false);

    int n_rows() const { return design.rows(); }
    int n_coef() const { return design.cols(); }
};

struct CdConfig {
    int max_sweeps = 100000;
    double tol = 1e-7;
    bool record_objective_path = false;
};

struct LassoFit {
    Vector coefficients;
    double intercept_value = 0.0;
    double lambda = 0.0;
    double objective = 0.0;
    int iterations = 0;
    std::vector<double> objective_path;  // filled when requested
};

struct CvResult {
    Vector lambda_grid;
    Vector cv_mse;
    Vector cv_se;
    double lambda_min = 0.0;
    double lambda_1se = 0.0;
};

/// clip(sign(z) * max(|z| - threshold, 0), lo, hi); requires lo <= 0 <= hi.
double soft_threshold_clip(double z, double threshold, double lo, double hi);

/// Ridge solution of (X'X + ridge_lambda I) b = X'y.
Vector ridge_fit(const DesignMatrix& design, const Vector& response, double ridge_lambda);
Vector ridge_fit(const Matrix& design, const Vector& response, double ridge_lambda);

/// Normal-equations solve (X'X + lambda I) b = X'y with lambda >= 0, plus a
/// condition estimate taken from the LDLT factor diagonal.
struct NormalEqSolution {
    Vector beta;
    double condition_estimate = 0.0;
};
NormalEqSolution solve_normal_equations(const DesignMatrix& design, const Vector& response,
                                        double lambda);

/// Default ridge level for adaptive pre-estimation: 0.01 * trace(X'X) / p.
double default_ridge_lambda(const DesignMatrix& design);

/// Box-constrained weighted lasso by cyclic coordinate descent. Converges when
/// the largest coefficient change in a full sweep drops below
/// tol * max(1, ||b||_inf); throws NumericError past the sweep cap.
LassoFit lasso_cd(const PenalizedProblem& problem, double lambda,
                  const std::optional<Vector>& warm_start = std::nullopt,
                  const CdConfig& cfg = {});

/// 100 geometrically spaced values from lambda_max (null model) down to
/// 1e-3 * lambda_max.
Vector lambda_grid(const PenalizedProblem& problem, int grid_size = 100, double min_ratio = 1e-3);

/// Warm-started fits along a decreasing lambda path.
std::vector<LassoFit> fit_lambda_path(const PenalizedProblem& problem, const Vector& grid,
                                      const CdConfig& cfg = {});

/// Seeded k-fold cross-validation over the lambda grid with the
/// one-standard-error rule. `fold_ids`, when given, overrides the random
/// partition (values in [0, k)); folds run concurrently when jobs > 1.
CvResult cross_validate(const PenalizedProblem& problem, int k, std::uint64_t seed,
                        const CdConfig& cfg = {},
                        const std::optional<std::vector<int>>& fold_ids = std::nullopt,
                        int grid_size = 100, double grid_min_ratio = 1e-3, int jobs = 1);

/// Largest violation of the box-constrained KKT conditions at (beta,
/// intercept); independent of the solver path, usable as an optimality oracle.
double kkt_max_violation(const PenalizedProblem& problem, const Vector& beta, double intercept,
                         double lambda);

/// ||X b + b0 - y||^2 + lambda * sum_j w_j |b_j|.
double objective_value(const PenalizedProblem& problem, const Vector& beta, double intercept,
                       double lambda);

}  // namespace spatlasso
