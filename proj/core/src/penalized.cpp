#include "spatlasso/penalized.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "spatlasso/parallel.hpp"
#include "spatlasso/rng.hpp"

namespace spatlasso {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

DesignMatrix::DesignMatrix(int rows, int cols) : m_(rows), p_(cols) {
    if (rows < 1 || cols < 0) throw InvalidInput("DesignMatrix: invalid shape");
    cols_.resize(static_cast<std::size_t>(cols));
}

DesignMatrix DesignMatrix::from_dense(const Matrix& x) {
    DesignMatrix d(static_cast<int>(x.rows()), static_cast<int>(x.cols()));
    for (int j = 0; j < d.p_; ++j) {
        std::vector<int> rows;
        std::vector<double> vals;
        for (int i = 0; i < d.m_; ++i) {
            double v = x(i, j);
            if (v != 0.0) {
                rows.push_back(i);
                vals.push_back(v);
            }
        }
        d.set_column(j, std::move(rows), std::move(vals));
    }
    return d;
}

void DesignMatrix::set_column(int j, std::vector<int> row_idx, std::vector<double> values) {
    if (j < 0 || j >= p_) throw InvalidInput("DesignMatrix: column index out of range");
    if (row_idx.size() != values.size()) throw InvalidInput("DesignMatrix: pattern size mismatch");
    for (std::size_t k = 0; k < row_idx.size(); ++k) {
        if (row_idx[k] < 0 || row_idx[k] >= m_) throw InvalidInput("DesignMatrix: row out of range");
        if (k > 0 && row_idx[k] <= row_idx[k - 1]) {
            throw InvalidInput("DesignMatrix: row indices must be strictly increasing");
        }
        if (!std::isfinite(values[k])) throw InvalidInput("DesignMatrix: non-finite value");
    }
    cols_[static_cast<std::size_t>(j)] = Column{std::move(row_idx), std::move(values)};
}

void DesignMatrix::set_step_column(int j, int first_row, int last_row) {
    if (first_row < 0 || last_row >= m_ || first_row > last_row) {
        throw InvalidInput("DesignMatrix: invalid step range");
    }
    std::vector<int> rows(static_cast<std::size_t>(last_row - first_row + 1));
    std::iota(rows.begin(), rows.end(), first_row);
    std::vector<double> vals(rows.size(), 1.0);
    set_column(j, std::move(rows), std::move(vals));
}

double DesignMatrix::column_dot(int j, const Vector& v) const {
    const Column& c = cols_[static_cast<std::size_t>(j)];
    double acc = 0.0;
    const std::size_t nnz = c.rows.size();
    for (std::size_t k = 0; k < nnz; ++k) acc += c.vals[k] * v[c.rows[k]];
    return acc;
}

void DesignMatrix::column_axpy(int j, double alpha, Vector& v) const {
    const Column& c = cols_[static_cast<std::size_t>(j)];
    const std::size_t nnz = c.rows.size();
    for (std::size_t k = 0; k < nnz; ++k) v[c.rows[k]] += alpha * c.vals[k];
}

double DesignMatrix::column_squared_norm(int j) const {
    const Column& c = cols_[static_cast<std::size_t>(j)];
    double acc = 0.0;
    for (double v : c.vals) acc += v * v;
    return acc;
}

Vector DesignMatrix::multiply(const Vector& beta) const {
    if (static_cast<int>(beta.size()) != p_) throw InvalidInput("DesignMatrix: multiply size mismatch");
    Vector out = Vector::Zero(m_);
    for (int j = 0; j < p_; ++j) {
        if (beta[j] != 0.0) column_axpy(j, beta[j], out);
    }
    return out;
}

Matrix DesignMatrix::to_dense() const {
    Matrix out = Matrix::Zero(m_, p_);
    for (int j = 0; j < p_; ++j) {
        const Column& c = cols_[static_cast<std::size_t>(j)];
        for (std::size_t k = 0; k < c.rows.size(); ++k) out(c.rows[k], j) = c.vals[k];
    }
    return out;
}

DesignMatrix DesignMatrix::select_rows(const std::vector<int>& keep) const {
    for (std::size_t k = 1; k < keep.size(); ++k) {
        if (keep[k] <= keep[k - 1]) throw InvalidInput("select_rows: keep list must be sorted");
    }
    std::vector<int> remap(static_cast<std::size_t>(m_), -1);
    for (std::size_t k = 0; k < keep.size(); ++k) {
        if (keep[k] < 0 || keep[k] >= m_) throw InvalidInput("select_rows: row out of range");
        remap[static_cast<std::size_t>(keep[k])] = static_cast<int>(k);
    }
    DesignMatrix out(static_cast<int>(keep.size()), p_);
    for (int j = 0; j < p_; ++j) {
        const Column& c = cols_[static_cast<std::size_t>(j)];
        std::vector<int> rows;
        std::vector<double> vals;
        for (std::size_t k = 0; k < c.rows.size(); ++k) {
            int nr = remap[static_cast<std::size_t>(c.rows[k])];
            if (nr >= 0) {
                rows.push_back(nr);
                vals.push_back(c.vals[k]);
            }
        }
        out.set_column(j, std::move(rows), std::move(vals));
    }
    return out;
}

PenalizedProblem::PenalizedProblem(DesignMatrix x, Vector y, Vector w, Vector lo, Vector hi,
                                   bool with_intercept)
    : design(std::move(x)),
      response(std::move(y)),
      penalty_weights(std::move(w)),
      lower_bounds(std::move(lo)),
      upper_bounds(std::move(hi)),
      intercept(with_intercept) {
    const int m = design.rows();
    const int p = design.cols();
    if (static_cast<int>(response.size()) != m) throw InvalidInput("PenalizedProblem: response length");
    if (!response.allFinite()) throw InvalidInput("PenalizedProblem: non-finite response");
    if (static_cast<int>(penalty_weights.size()) != p ||
        static_cast<int>(lower_bounds.size()) != p || static_cast<int>(upper_bounds.size()) != p) {
        throw InvalidInput("PenalizedProblem: coefficient vector lengths");
    }
    for (int j = 0; j < p; ++j) {
        if (std::isnan(penalty_weights[j]) || penalty_weights[j] < 0.0) {
            throw InvalidInput("PenalizedProblem: penalty weights must be nonnegative");
        }
        if (lower_bounds[j] > upper_bounds[j]) throw InvalidInput("PenalizedProblem: bounds out of order");
        if (lower_bounds[j] > 0.0 || upper_bounds[j] < 0.0) {
            throw InvalidInput("PenalizedProblem: bounds must bracket zero");
        }
    }
}

PenalizedProblem PenalizedProblem::plain(DesignMatrix x, Vector y, bool with_intercept) {
    const int p = x.cols();
    return PenalizedProblem(std::move(x), std::move(y), Vector::Ones(p),
                            Vector::Constant(p, -kInf), Vector::Constant(p, kInf), with_intercept);
}

double soft_threshold_clip(double z, double threshold, double lo, double hi) {
    double mag = std::abs(z) - threshold;
    double v = mag > 0.0 ? (z > 0.0 ? mag : -mag) : 0.0;
    return std::min(std::max(v, lo), hi);
}

namespace {

// Problem rewritten with unit-norm columns; coefficients, weights and bounds
// carry the column scale so the clip step stays exact.
struct Prepared {
    const PenalizedProblem* src = nullptr;
    DesignMatrix xs;        // columns divided by their norms
    Vector scale;           // s_j = ||x_j||_2, 0 for empty columns
    Vector w_scaled;        // w_j / s_j, +inf for excluded coordinates
    Vector lo_scaled;
    Vector hi_scaled;
    std::vector<int> updatable;
};

Prepared prepare(const PenalizedProblem& problem) {
    Prepared prep;
    prep.src = &problem;
    const int p = problem.n_coef();
    prep.xs = problem.design;
    prep.scale = Vector::Zero(p);
    prep.w_scaled = Vector::Constant(p, kInf);
    prep.lo_scaled = Vector::Zero(p);
    prep.hi_scaled = Vector::Zero(p);
    for (int j = 0; j < p; ++j) {
        double s = std::sqrt(problem.design.column_squared_norm(j));
        if (s == 0.0 || problem.penalty_weights[j] == kInf) continue;
        prep.scale[j] = s;
        prep.w_scaled[j] = problem.penalty_weights[j] / s;
        prep.lo_scaled[j] = problem.lower_bounds[j] * s;
        prep.hi_scaled[j] = problem.upper_bounds[j] * s;
        std::vector<int> rows = problem.design.column_rows(j);
        std::vector<double> vals = problem.design.column_values(j);
        for (double& v : vals) v /= s;
        prep.xs.set_column(j, std::move(rows), std::move(vals));
        prep.updatable.push_back(j);
    }
    return prep;
}

struct CdState {
    Vector beta_s;   // coefficients in the scaled space
    double b0 = 0.0;
    Vector residual; // y - b0 - Xs * beta_s
    int sweeps = 0;
};

CdState make_state(const Prepared& prep) {
    CdState st;
    st.beta_s = Vector::Zero(prep.src->n_coef());
    st.b0 = 0.0;
    st.residual = prep.src->response;
    return st;
}

double scaled_penalty(const Prepared& prep, const Vector& beta_s) {
    double acc = 0.0;
    for (int j : prep.updatable) acc += prep.w_scaled[j] * std::abs(beta_s[j]);
    return acc;
}

// One cyclic sweep over `coords`; returns the largest original-space change.
double sweep(const Prepared& prep, double lambda, const std::vector<int>& coords, CdState& st) {
    double max_change = 0.0;
    if (prep.src->intercept) {
        double shift = st.residual.mean();
        if (shift != 0.0) {
            st.b0 += shift;
            st.residual.array() -= shift;
            max_change = std::abs(shift);
        }
    }
    for (int j : coords) {
        double old = st.beta_s[j];
        double c = prep.xs.column_dot(j, st.residual) + old;
        double updated = soft_threshold_clip(c, 0.5 * lambda * prep.w_scaled[j], prep.lo_scaled[j],
                                             prep.hi_scaled[j]);
        double delta = updated - old;
        if (delta != 0.0) {
            st.beta_s[j] = updated;
            prep.xs.column_axpy(j, -delta, st.residual);
            max_change = std::max(max_change, std::abs(delta) / prep.scale[j]);
        }
    }
    ++st.sweeps;
    return max_change;
}

double original_inf_norm(const Prepared& prep, const CdState& st) {
    double mx = 0.0;
    for (int j : prep.updatable) mx = std::max(mx, std::abs(st.beta_s[j]) / prep.scale[j]);
    return mx;
}

void run_cd(const Prepared& prep, double lambda, CdState& st, const CdConfig& cfg,
            std::vector<double>* objective_path) {
    const int sweep_start = st.sweeps;
#ifndef NDEBUG
    double prev_obj = kInf;
#endif
    auto post_sweep = [&](void) {
#ifndef NDEBUG
        double obj = st.residual.squaredNorm() + lambda * scaled_penalty(prep, st.beta_s);
        assert(obj <= prev_obj + 1e-9 * (1.0 + std::abs(prev_obj)) &&
               "coordinate descent objective increased");
        prev_obj = obj;
#endif
        if (objective_path) {
            objective_path->push_back(st.residual.squaredNorm() +
                                      lambda * scaled_penalty(prep, st.beta_s));
        }
    };
    auto threshold = [&](void) { return cfg.tol * std::max(1.0, original_inf_norm(prep, st)); };

    std::vector<int> working;
    for (;;) {
        double change = sweep(prep, lambda, prep.updatable, st);
        post_sweep();
        if (change < threshold()) return;
        if (st.sweeps - sweep_start > cfg.max_sweeps) break;

        working.clear();
        for (int j : prep.updatable) {
            if (st.beta_s[j] != 0.0) working.push_back(j);
        }
        for (;;) {
            double wchange = sweep(prep, lambda, working, st);
            post_sweep();
            if (wchange < threshold() || st.sweeps - sweep_start > cfg.max_sweeps) break;
        }
        if (st.sweeps - sweep_start > cfg.max_sweeps) break;
    }
    std::ostringstream msg;
    msg << "lasso_cd: no convergence after " << (st.sweeps - sweep_start)
        << " sweeps at lambda = " << lambda << " (p = " << prep.src->n_coef()
        << ", m = " << prep.src->n_rows() << ")";
    throw NumericError(msg.str());
}

LassoFit extract_fit(const Prepared& prep, const CdState& st, double lambda,
                     std::vector<double> objective_path) {
    LassoFit fit;
    const int p = prep.src->n_coef();
    fit.coefficients = Vector::Zero(p);
    for (int j : prep.updatable) fit.coefficients[j] = st.beta_s[j] / prep.scale[j];
    fit.intercept_value = st.b0;
    fit.lambda = lambda;
    fit.iterations = st.sweeps;
    fit.objective = st.residual.squaredNorm() + lambda * scaled_penalty(prep, st.beta_s);
    fit.objective_path = std::move(objective_path);
    return fit;
}

void apply_warm_start(const Prepared& prep, const Vector& warm, CdState& st) {
    if (static_cast<int>(warm.size()) != prep.src->n_coef()) {
        throw InvalidInput("lasso_cd: warm start length mismatch");
    }
    for (int j : prep.updatable) {
        double b = std::min(std::max(warm[j], prep.src->lower_bounds[j]), prep.src->upper_bounds[j]);
        double bs = b * prep.scale[j];
        if (bs != 0.0) {
            st.beta_s[j] = bs;
            prep.xs.column_axpy(j, -bs, st.residual);
        }
    }
    if (prep.src->intercept) {
        double shift = st.residual.mean();
        st.b0 += shift;
        st.residual.array() -= shift;
    }
}

Vector lambda_grid_impl(const Prepared& prep, int grid_size, double min_ratio) {
    const PenalizedProblem& problem = *prep.src;
    bool any_finite = false;
    for (int j = 0; j < problem.n_coef(); ++j) {
        if (problem.penalty_weights[j] != kInf) any_finite = true;
    }
    if (!any_finite) throw InvalidInput("lambda_grid: all penalty weights are infinite");
    if (grid_size < 2) throw InvalidInput("lambda_grid: grid size too small");

    Vector y = problem.response;
    if (problem.intercept) y.array() -= y.mean();
    double lambda_max = 0.0;
    for (int j : prep.updatable) {
        double w = problem.penalty_weights[j];
        if (w <= 0.0) continue;  // unpenalized coordinates do not cap the grid
        double c = std::abs(2.0 * problem.design.column_dot(j, y)) / w;
        lambda_max = std::max(lambda_max, c);
    }
    if (lambda_max <= 0.0) lambda_max = 1.0;  // response orthogonal to every column

    Vector grid(grid_size);
    double ratio = std::pow(min_ratio, 1.0 / static_cast<double>(grid_size - 1));
    double v = lambda_max;
    for (int i = 0; i < grid_size; ++i) {
        grid[i] = v;
        v *= ratio;
    }
    return grid;
}

std::vector<LassoFit> fit_path_impl(const Prepared& prep, const Vector& grid, const CdConfig& cfg) {
    std::vector<LassoFit> fits;
    fits.reserve(static_cast<std::size_t>(grid.size()));
    CdState st = make_state(prep);
    for (int g = 0; g < static_cast<int>(grid.size()); ++g) {
        if (g > 0 && grid[g] >= grid[g - 1]) throw InvalidInput("fit_lambda_path: grid must decrease");
        std::vector<double> path;
        st.sweeps = 0;
        run_cd(prep, grid[g], st, cfg, cfg.record_objective_path ? &path : nullptr);
        fits.push_back(extract_fit(prep, st, grid[g], std::move(path)));
    }
    return fits;
}

}  // namespace

Vector ridge_fit(const DesignMatrix& design, const Vector& response, double ridge_lambda) {
    if (!(ridge_lambda > 0.0)) throw InvalidInput("ridge_fit: ridge_lambda must be positive");
    return solve_normal_equations(design, response, ridge_lambda).beta;
}

Vector ridge_fit(const Matrix& design, const Vector& response, double ridge_lambda) {
    return ridge_fit(DesignMatrix::from_dense(design), response, ridge_lambda);
}

double default_ridge_lambda(const DesignMatrix& design) {
    double trace = 0.0;
    for (int j = 0; j < design.cols(); ++j) trace += design.column_squared_norm(j);
    return 0.01 * trace / std::max(1, design.cols());
}

NormalEqSolution solve_normal_equations(const DesignMatrix& design, const Vector& response,
                                        double lambda) {
    const int p = design.cols();
    if (static_cast<int>(response.size()) != design.rows()) {
        throw InvalidInput("solve_normal_equations: response length");
    }
    if (lambda < 0.0) throw InvalidInput("solve_normal_equations: negative lambda");
    Matrix gram = Matrix::Zero(p, p);
    for (int j = 0; j < p; ++j) {
        const auto& rows_j = design.column_rows(j);
        const auto& vals_j = design.column_values(j);
        for (int k = j; k < p; ++k) {
            const auto& rows_k = design.column_rows(k);
            const auto& vals_k = design.column_values(k);
            if (rows_j.empty() || rows_k.empty() || rows_j.back() < rows_k.front() ||
                rows_k.back() < rows_j.front()) {
                continue;  // disjoint row ranges (distinct location blocks)
            }
            double acc = 0.0;
            std::size_t a = 0, b = 0;
            while (a < rows_j.size() && b < rows_k.size()) {
                if (rows_j[a] == rows_k[b]) {
                    acc += vals_j[a] * vals_k[b];
                    ++a;
                    ++b;
                } else if (rows_j[a] < rows_k[b]) {
                    ++a;
                } else {
                    ++b;
                }
            }
            gram(j, k) = acc;
            gram(k, j) = acc;
        }
        gram(j, j) += lambda;
    }
    Vector rhs(p);
    for (int j = 0; j < p; ++j) rhs[j] = design.column_dot(j, response);

    Eigen::LDLT<Matrix> ldlt(gram);
    Vector beta = ldlt.solve(rhs);
    if (ldlt.info() != Eigen::Success || !beta.allFinite()) {
        throw NumericError("solve_normal_equations: factorization failed (singular system)");
    }
    Vector d = ldlt.vectorD();
    double dmax = d.maxCoeff();
    double dmin = d.minCoeff();
    NormalEqSolution out;
    out.beta = std::move(beta);
    out.condition_estimate = dmin > 0.0 ? dmax / dmin : kInf;
    return out;
}

LassoFit lasso_cd(const PenalizedProblem& problem, double lambda,
                  const std::optional<Vector>& warm_start, const CdConfig& cfg) {
    if (lambda < 0.0 || !std::isfinite(lambda)) throw InvalidInput("lasso_cd: invalid lambda");
    Prepared prep = prepare(problem);
    CdState st = make_state(prep);
    if (warm_start) apply_warm_start(prep, *warm_start, st);
    std::vector<double> path;
    run_cd(prep, lambda, st, cfg, cfg.record_objective_path ? &path : nullptr);
    return extract_fit(prep, st, lambda, std::move(path));
}

Vector lambda_grid(const PenalizedProblem& problem, int grid_size, double min_ratio) {
    Prepared prep = prepare(problem);
    return lambda_grid_impl(prep, grid_size, min_ratio);
}

std::vector<LassoFit> fit_lambda_path(const PenalizedProblem& problem, const Vector& grid,
                                      const CdConfig& cfg) {
    Prepared prep = prepare(problem);
    return fit_path_impl(prep, grid, cfg);
}

CvResult cross_validate(const PenalizedProblem& problem, int k, std::uint64_t seed,
                        const CdConfig& cfg, const std::optional<std::vector<int>>& fold_ids,
                        int grid_size, double grid_min_ratio, int jobs) {
    const int m = problem.n_rows();
    if (k < 2) throw InvalidInput("cross_validate: need at least 2 folds");
    if (m < 2 * k) throw InvalidInput("cross_validate: need at least 2k rows");

    std::vector<int> assignment(static_cast<std::size_t>(m));
    if (fold_ids) {
        if (static_cast<int>(fold_ids->size()) != m) {
            throw InvalidInput("cross_validate: fold_ids length mismatch");
        }
        assignment = *fold_ids;
    } else {
        std::vector<int> order(static_cast<std::size_t>(m));
        std::iota(order.begin(), order.end(), 0);
        auto engine = make_engine(seed);
        std::shuffle(order.begin(), order.end(), engine);
        for (int r = 0; r < m; ++r) assignment[static_cast<std::size_t>(order[r])] = r % k;
    }

    Vector grid = lambda_grid(problem, grid_size, grid_min_ratio);
    const int n_lambda = static_cast<int>(grid.size());
    Matrix fold_mse(k, n_lambda);

    parallel_for(k, jobs, [&](int f) {
        std::vector<int> train_rows;
        std::vector<int> test_rows;
        for (int r = 0; r < m; ++r) {
            (assignment[static_cast<std::size_t>(r)] == f ? test_rows : train_rows).push_back(r);
        }
        if (test_rows.empty() || train_rows.empty()) {
            throw InvalidInput("cross_validate: degenerate fold");
        }
        Vector y_train(static_cast<int>(train_rows.size()));
        Vector y_test(static_cast<int>(test_rows.size()));
        for (std::size_t i = 0; i < train_rows.size(); ++i) y_train[static_cast<int>(i)] = problem.response[train_rows[i]];
        for (std::size_t i = 0; i < test_rows.size(); ++i) y_test[static_cast<int>(i)] = problem.response[test_rows[i]];

        PenalizedProblem sub(problem.design.select_rows(train_rows), std::move(y_train),
                             problem.penalty_weights, problem.lower_bounds, problem.upper_bounds,
                             problem.intercept);
        DesignMatrix test_design = problem.design.select_rows(test_rows);

        std::vector<LassoFit> fits = fit_lambda_path(sub, grid, cfg);
        for (int g = 0; g < n_lambda; ++g) {
            Vector pred = test_design.multiply(fits[static_cast<std::size_t>(g)].coefficients);
            pred.array() += fits[static_cast<std::size_t>(g)].intercept_value;
            fold_mse(f, g) = (pred - y_test).squaredNorm() / static_cast<double>(y_test.size());
        }
    });

    CvResult out;
    out.lambda_grid = grid;
    out.cv_mse = fold_mse.colwise().mean().transpose();
    out.cv_se = Vector(n_lambda);
    for (int g = 0; g < n_lambda; ++g) {
        double mean = out.cv_mse[g];
        double ss = 0.0;
        for (int f = 0; f < k; ++f) {
            double d = fold_mse(f, g) - mean;
            ss += d * d;
        }
        out.cv_se[g] = std::sqrt(ss / static_cast<double>(k - 1)) / std::sqrt(static_cast<double>(k));
    }

    int best = 0;
    for (int g = 1; g < n_lambda; ++g) {
        if (out.cv_mse[g] < out.cv_mse[best]) best = g;  // ties keep the larger lambda
    }
    out.lambda_min = grid[best];
    double cutoff = out.cv_mse[best] + out.cv_se[best];
    int chosen = best;
    for (int g = 0; g <= best; ++g) {
        if (out.cv_mse[g] <= cutoff) {
            chosen = g;  // grid decreases, so the first qualifying index is the largest lambda
            break;
        }
    }
    out.lambda_1se = grid[chosen];
    return out;
}

double kkt_max_violation(const PenalizedProblem& problem, const Vector& beta, double intercept,
                         double lambda) {
    const int p = problem.n_coef();
    if (static_cast<int>(beta.size()) != p) throw InvalidInput("kkt_max_violation: beta length");
    Vector r = problem.response - problem.design.multiply(beta);
    if (problem.intercept) r.array() -= intercept;

    double worst = 0.0;
    for (int j = 0; j < p; ++j) {
        double lo = problem.lower_bounds[j];
        double hi = problem.upper_bounds[j];
        double b = beta[j];
        worst = std::max(worst, std::max(lo - b, b - hi));  // feasibility
        if (problem.penalty_weights[j] == kInf) {
            worst = std::max(worst, std::abs(b));
            continue;
        }
        double g = 2.0 * problem.design.column_dot(j, r);
        double lw = lambda * problem.penalty_weights[j];
        if (b == 0.0) {
            double up = hi > 0.0 ? std::max(0.0, g - lw) : 0.0;
            double down = lo < 0.0 ? std::max(0.0, -g - lw) : 0.0;
            worst = std::max(worst, std::max(up, down));
        } else if (b == hi) {
            worst = std::max(worst, std::max(0.0, lw - g));
        } else if (b == lo) {
            worst = std::max(worst, std::max(0.0, g + lw));
        } else {
            worst = std::max(worst, std::abs(g - lw * (b > 0.0 ? 1.0 : -1.0)));
        }
    }
    if (problem.intercept) worst = std::max(worst, std::abs(2.0 * r.sum()));
    return worst;
}

double objective_value(const PenalizedProblem& problem, const Vector& beta, double intercept,
                       double lambda) {
    Vector r = problem.response - problem.design.multiply(beta);
    if (problem.intercept) r.array() -= intercept;
    double penalty = 0.0;
    for (int j = 0; j < problem.n_coef(); ++j) {
        if (beta[j] != 0.0) penalty += problem.penalty_weights[j] * std::abs(beta[j]);
    }
    return r.squaredNorm() + lambda * penalty;
}

}  // namespace spatlasso
