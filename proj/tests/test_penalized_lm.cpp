#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "spatlasso/penalized.hpp"
#include "support/oracles.hpp"

using namespace spatlasso;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Matrix random_matrix(std::mt19937_64& rng, int m, int p, double sd = 1.0) {
    std::normal_distribution<double> gauss(0.0, sd);
    Matrix x(m, p);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < p; ++j) x(i, j) = gauss(rng);
    }
    return x;
}

Vector random_vector(std::mt19937_64& rng, int m, double sd = 1.0) {
    std::normal_distribution<double> gauss(0.0, sd);
    Vector y(m);
    for (int i = 0; i < m; ++i) y[i] = gauss(rng);
    return y;
}
}  // namespace

TEST_SUITE_BEGIN("penalized_lm");

TEST_CASE("soft threshold clip") {
    CHECK(soft_threshold_clip(3.0, 1.0, -kInf, kInf) == 2.0);
    CHECK(soft_threshold_clip(-0.5, 1.0, -kInf, kInf) == 0.0);
    CHECK(soft_threshold_clip(3.0, 1.0, 0.0, 1.0) == 1.0);
    CHECK(soft_threshold_clip(-3.0, 1.0, -kInf, kInf) == -2.0);
    CHECK(soft_threshold_clip(-3.0, 1.0, 0.0, 1.0) == 0.0);
}

TEST_CASE("ridge on the identity design halves the response") {
    Matrix x = Matrix::Identity(2, 2);
    Vector y(2);
    y << 2.0, 4.0;
    Vector beta = ridge_fit(x, y, 1.0);
    CHECK(beta[0] == doctest::Approx(1.0));
    CHECK(beta[1] == doctest::Approx(2.0));
}

TEST_CASE("ridge shrinks everything to zero for a huge penalty") {
    std::mt19937_64 rng(11);
    Matrix x = random_matrix(rng, 12, 4);
    Vector y = random_vector(rng, 12);
    Vector beta = ridge_fit(x, y, 1e12);
    CHECK(beta.cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("ridge matches a from-scratch Gaussian elimination solve") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix x = random_matrix(rng, 20, 5);
        Vector y = random_vector(rng, 20);
        double lambda = 0.1 + 2.0 * static_cast<double>(trial);
        Vector ours = ridge_fit(x, y, lambda);
        Vector ref = oracles::ridge_by_elimination(x, y, lambda);
        CHECK((ours - ref).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("ridge rejects a nonpositive penalty") {
    Matrix x = Matrix::Identity(2, 2);
    Vector y = Vector::Ones(2);
    CHECK_THROWS_AS(ridge_fit(x, y, 0.0), InvalidInput);
}

TEST_CASE("problem validation") {
    Matrix x = Matrix::Identity(2, 2);
    Vector y = Vector::Ones(2);
    Vector w = Vector::Ones(2);
    Vector lo = Vector::Constant(2, 0.5);  // zero not feasible
    Vector hi = Vector::Constant(2, 1.0);
    CHECK_THROWS_AS(PenalizedProblem(DesignMatrix::from_dense(x), y, w, lo, hi, false), InvalidInput);
    lo = Vector::Constant(2, -1.0);
    CHECK_NOTHROW(PenalizedProblem(DesignMatrix::from_dense(x), y, w, lo, hi, false));
}

TEST_CASE("lasso with zero penalty solves least squares") {
    std::mt19937_64 rng(5);
    Matrix x = random_matrix(rng, 3, 3);
    x += 3.0 * Matrix::Identity(3, 3);  // well-conditioned
    Vector y = random_vector(rng, 3);
    CdConfig cfg;
    cfg.tol = 1e-12;
    LassoFit fit = lasso_cd(PenalizedProblem::plain(DesignMatrix::from_dense(x), y), 0.0,
                            std::nullopt, cfg);
    Vector ls = oracles::gauss_solve(x, y);
    CHECK((fit.coefficients - ls).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("lambda grid construction and the null model at its head") {
    std::mt19937_64 rng(9);
    Matrix x = random_matrix(rng, 30, 6);
    Vector y = random_vector(rng, 30);
    PenalizedProblem problem = PenalizedProblem::plain(DesignMatrix::from_dense(x), y);
    Vector grid = lambda_grid(problem);
    REQUIRE(grid.size() == 100);
    double ratio = grid[1] / grid[0];
    for (int i = 1; i < 100; ++i) {
        CHECK(grid[i] < grid[i - 1]);
        CHECK(grid[i] / grid[i - 1] == doctest::Approx(ratio).epsilon(1e-12));
    }
    CHECK(grid[99] == doctest::Approx(1e-3 * grid[0]).epsilon(1e-10));

    LassoFit fit = lasso_cd(problem, grid[0]);
    CHECK(fit.coefficients.cwiseAbs().maxCoeff() == 0.0);

    PenalizedProblem doubled(problem.design, problem.response, 2.0 * problem.penalty_weights,
                             problem.lower_bounds, problem.upper_bounds, problem.intercept);
    CHECK(lambda_grid(doubled)[0] == doctest::Approx(0.5 * grid[0]).epsilon(1e-12));
}

TEST_CASE("lambda grid needs a finite penalty weight") {
    Matrix x = Matrix::Identity(2, 2);
    Vector y = Vector::Ones(2);
    Vector w = Vector::Constant(2, kInf);
    PenalizedProblem problem(DesignMatrix::from_dense(x), y, w, Vector::Constant(2, -kInf),
                             Vector::Constant(2, kInf), false);
    CHECK_THROWS_AS(lambda_grid(problem), InvalidInput);
}

TEST_CASE("box-constrained solutions match the nested grid-search oracle") {
    std::mt19937_64 rng(81);
    std::uniform_int_distribution<int> pick_p(1, 3);
    std::uniform_int_distribution<int> pick_m(6, 30);
    for (int trial = 0; trial < 40; ++trial) {
        int p = pick_p(rng);
        int m = pick_m(rng);
        Matrix x = random_matrix(rng, m, p);
        Vector beta_true = random_vector(rng, p, 0.6);
        Vector y = x * beta_true + random_vector(rng, m, 0.5);
        Vector w = Vector::Ones(p);
        Vector lo = Vector::Zero(p);
        Vector hi = Vector::Ones(p);
        PenalizedProblem problem(DesignMatrix::from_dense(x), y, w, lo, hi, false);
        double lambda = 0.2 + 2.0 * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        CdConfig cfg;
        cfg.tol = 1e-10;
        LassoFit fit = lasso_cd(problem, lambda, std::nullopt, cfg);
        double reference = oracles::grid_search_lasso_objective(x, y, w, lambda, lo, hi);
        CHECK(std::abs(fit.objective - reference) < 2e-3);
        CHECK(kkt_max_violation(problem, fit.coefficients, fit.intercept_value, lambda) < 1e-5);
    }
}

TEST_CASE("orthonormal design with nonnegative bounds matches the closed form") {
    std::mt19937_64 rng(17);
    Matrix base = random_matrix(rng, 20, 5);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(base);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(20, 5);
    Matrix x = q;
    Vector y = random_vector(rng, 20);
    Vector w(5);
    w << 1.0, 0.5, 2.0, 1.0, 3.0;
    PenalizedProblem problem(DesignMatrix::from_dense(x), y, w, Vector::Zero(5),
                             Vector::Constant(5, kInf), false);
    double lambda = 0.4;
    CdConfig cfg;
    cfg.tol = 1e-12;
    LassoFit fit = lasso_cd(problem, lambda, std::nullopt, cfg);
    for (int j = 0; j < 5; ++j) {
        double expect = soft_threshold_clip(x.col(j).dot(y), 0.5 * lambda * w[j], 0.0, kInf);
        CHECK(fit.coefficients[j] == doctest::Approx(expect).epsilon(1e-8).scale(1.0));
    }
}

TEST_CASE("objective is monotone across sweeps") {
    std::mt19937_64 rng(31);
    Matrix x = random_matrix(rng, 40, 10);
    Vector y = random_vector(rng, 40);
    PenalizedProblem problem = PenalizedProblem::plain(DesignMatrix::from_dense(x), y, true);
    CdConfig cfg;
    cfg.record_objective_path = true;
    LassoFit fit = lasso_cd(problem, 1.0, std::nullopt, cfg);
    REQUIRE(fit.objective_path.size() >= 2);
    for (std::size_t i = 1; i < fit.objective_path.size(); ++i) {
        CHECK(fit.objective_path[i] <= fit.objective_path[i - 1] * (1.0 + 1e-12) + 1e-12);
    }
}

TEST_CASE("warm-started path equals cold starts") {
    std::mt19937_64 rng(13);
    Matrix x = random_matrix(rng, 50, 8);
    Vector y = random_vector(rng, 50);
    PenalizedProblem problem = PenalizedProblem::plain(DesignMatrix::from_dense(x), y);
    Vector grid = lambda_grid(problem, 20);
    CdConfig cfg;
    cfg.tol = 1e-10;
    std::vector<LassoFit> path = fit_lambda_path(problem, grid, cfg);
    for (int g = 0; g < 20; g += 4) {
        LassoFit cold = lasso_cd(problem, grid[g], std::nullopt, cfg);
        CHECK((cold.coefficients - path[static_cast<std::size_t>(g)].coefficients)
                  .cwiseAbs()
                  .maxCoeff() < 1e-6);
    }
}

TEST_CASE("infinite penalty weights pin coefficients at zero") {
    std::mt19937_64 rng(23);
    Matrix x = random_matrix(rng, 25, 4);
    Vector beta_true(4);
    beta_true << 2.0, 0.0, -1.0, 1.5;
    Vector y = x * beta_true;
    Vector w = Vector::Ones(4);
    w[3] = kInf;
    PenalizedProblem problem(DesignMatrix::from_dense(x), y, w, Vector::Constant(4, -kInf),
                             Vector::Constant(4, kInf), false);
    LassoFit fit = lasso_cd(problem, 0.01);
    CHECK(fit.coefficients[3] == 0.0);
}

TEST_CASE("cross-validation honors fold structure and the one-SE rule") {
    std::mt19937_64 rng(42);
    Matrix x = random_matrix(rng, 30, 5);
    Vector beta_true(5);
    beta_true << 3.0, 0.0, 0.0, -2.0, 0.0;
    Vector y = x * beta_true + random_vector(rng, 30, 0.3);

    // Stack 4 copies of the same 30 rows and force one copy per fold: every
    // fold sees identical data, so the standard errors collapse.
    Matrix x4(120, 5);
    Vector y4(120);
    std::vector<int> folds(120);
    for (int c = 0; c < 4; ++c) {
        x4.block(30 * c, 0, 30, 5) = x;
        y4.segment(30 * c, 30) = y;
        for (int r = 0; r < 30; ++r) folds[static_cast<std::size_t>(30 * c + r)] = c;
    }
    PenalizedProblem problem = PenalizedProblem::plain(DesignMatrix::from_dense(x4), y4);
    CvResult cv = cross_validate(problem, 4, 0, {}, folds);
    CHECK(cv.cv_se.maxCoeff() < 1e-10);
    CHECK(cv.lambda_1se == cv.lambda_min);
}

TEST_CASE("lambda_1se never falls below lambda_min") {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 5; ++trial) {
        Matrix x = random_matrix(rng, 60, 6);
        Vector y = random_vector(rng, 60);
        PenalizedProblem problem = PenalizedProblem::plain(DesignMatrix::from_dense(x), y);
        CvResult cv = cross_validate(problem, 5, rng());
        CHECK(cv.lambda_1se >= cv.lambda_min);
        bool min_in_grid = false;
        bool onese_in_grid = false;
        for (int g = 0; g < cv.lambda_grid.size(); ++g) {
            if (cv.lambda_grid[g] == cv.lambda_min) min_in_grid = true;
            if (cv.lambda_grid[g] == cv.lambda_1se) onese_in_grid = true;
        }
        CHECK(min_in_grid);
        CHECK(onese_in_grid);
    }
}

TEST_CASE("pure-noise responses select the null or near-null model") {
    std::mt19937_64 rng(99);
    int parsimonious = 0;
    const int runs = 200;
    for (int run = 0; run < runs; ++run) {
        Matrix x = random_matrix(rng, 60, 8);
        Vector y = random_vector(rng, 60);
        PenalizedProblem problem = PenalizedProblem::plain(DesignMatrix::from_dense(x), y, true);
        CvResult cv = cross_validate(problem, 10, rng());
        LassoFit fit = lasso_cd(problem, cv.lambda_1se);
        int nonzero = 0;
        for (int j = 0; j < 8; ++j) {
            if (fit.coefficients[j] != 0.0) ++nonzero;
        }
        if (nonzero <= 1) ++parsimonious;
    }
    CHECK(parsimonious >= static_cast<int>(0.9 * runs));
}

TEST_CASE("cross-validation input checks") {
    std::mt19937_64 rng(3);
    Matrix x = random_matrix(rng, 10, 2);
    Vector y = random_vector(rng, 10);
    PenalizedProblem problem = PenalizedProblem::plain(DesignMatrix::from_dense(x), y);
    CHECK_THROWS_AS(cross_validate(problem, 1, 0), InvalidInput);
    CHECK_THROWS_AS(cross_validate(problem, 6, 0), InvalidInput);  // m < 2k
}

TEST_CASE("kkt checker flags a perturbed solution") {
    std::mt19937_64 rng(61);
    Matrix x = random_matrix(rng, 30, 4);
    Vector y = random_vector(rng, 30);
    PenalizedProblem problem = PenalizedProblem::plain(DesignMatrix::from_dense(x), y);
    CdConfig cfg;
    cfg.tol = 1e-11;
    LassoFit fit = lasso_cd(problem, 0.5, std::nullopt, cfg);
    CHECK(kkt_max_violation(problem, fit.coefficients, 0.0, 0.5) < 1e-6);
    Vector off = fit.coefficients;
    off[0] += 0.25;
    CHECK(kkt_max_violation(problem, off, 0.0, 0.5) > 1e-3);
}

TEST_CASE("sweep cap raises a diagnostic error") {
    std::mt19937_64 rng(77);
    Matrix x = random_matrix(rng, 20, 6);
    // Almost collinear columns force slow coordinate progress.
    x.col(1) = x.col(0) + 1e-9 * random_vector(rng, 20);
    Vector y = random_vector(rng, 20);
    PenalizedProblem problem = PenalizedProblem::plain(DesignMatrix::from_dense(x), y);
    CdConfig cfg;
    cfg.max_sweeps = 2;
    cfg.tol = 1e-15;
    CHECK_THROWS_AS(lasso_cd(problem, 1e-9, std::nullopt, cfg), NumericError);
}

TEST_SUITE_END();
