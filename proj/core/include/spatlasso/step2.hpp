#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spatlasso/model.hpp"
#include "spatlasso/penalized.hpp"
#include "spatlasso/step1.hpp"

namespace spatlasso {

/// One column of the joint design: either a mean-level step for (location,
/// time) or a spatial weight w_{location, source}.
struct JointColumn {
    enum class Kind { break_coef, weight };
    Kind kind = Kind::break_coef;
    int location = 0;  // 0-based block index i
    int time = 0;      // effective break time (1-based), break columns only
    int source = 0;    // 0-based j of w_ij, weight columns only
};

/// Stacked regression for the full model. The response is the column-stacked
/// panel (location-major blocks of length T); every column lives inside a
/// single location block, so the design is block-sparse.
struct JointDesign {
    int n = 0;
    int T = 0;
    DesignMatrix design;
    Vector response;
    std::vector<JointColumn> column_map;
    int n_break_cols = 0;   // baselines + candidates
    int n_weight_cols = 0;  // n * (n - 1)
};

/// Break columns: a baseline (t = 1) column per location plus one step column
/// per candidate instant. Weight columns: the other locations' observed
/// series, placed in this location's block.
JointDesign build_joint_design(const PanelObservations& panel, const CandidateSets& candidates);

/// Which cross-validated lambda the joint fit uses. The per-location
/// screening step always applies the one-standard-error rule; the joint fit
/// defaults to the CV minimiser, which reproduces the reference simulation
/// results, and can be switched to the one-SE rule.
enum class LambdaRule { cv_min, cv_1se };

LambdaRule lambda_rule_from_string(const std::string& name);
std::string to_string(LambdaRule rule);

struct EstimateConfig {
    Step1Config step1;
    LambdaRule lambda_rule = LambdaRule::cv_min;
    double gamma = 1.0;
    int cv_folds = 10;
    double ridge_lambda = 0.0;       // <= 0 selects 0.01 * trace(X'X) / p when ridge is used
    double ols_max_p_ratio = 0.8;    // least-squares pre-estimation needs p <= ratio * nT
    double ols_max_condition = 1e10; // ... and a condition estimate below this
    double tail_freeze_fraction = 0.0;  // 0.05 for the empirical workflow
    std::uint64_t seed = 0;
    int jobs = 1;
    int grid_size = 100;
    // Grid floor as a fraction of lambda_max; 0 picks 1e-4 when the stacked
    // system is overdetermined and 1e-2 otherwise. The adaptive weights
    // inflate lambda_max, so the joint path must reach further down than the
    // per-location step-1 path.
    double grid_min_ratio = 0.0;
    CdConfig cd;
    std::optional<double> lambda_override;  // bypasses cross-validation
};

struct BreakCoef {
    int time = 0;  // 1-based; time 1 is the location's baseline level
    double magnitude = 0.0;
};

struct EstimationDiagnostics {
    double spectral_radius_w_hat = 0.0;
    int total_candidates = 0;
    int selected_breaks = 0;  // nonzero break coefficients with t >= 2
    double lambda_min = 0.0;
    double lambda_1se = 0.0;
    std::string pre_estimation;  // "ols" or "ridge"
    double pre_condition = 0.0;
    int cd_sweeps = 0;
    std::vector<std::string> warnings;
};

struct EstimationResult {
    SpatialWeightMatrix w_hat;
    std::vector<std::vector<BreakCoef>> b_hat;  // nonzero break coefficients per location
    Matrix a_hat;                               // T x n reconstructed local means
    std::optional<Matrix> overall_mean;         // rows (S a_t)', present when rho(w_hat) < 1
    Matrix fitted;                              // T x n in-sample fit
    double selected_lambda = 0.0;
    EstimationDiagnostics diagnostics;
};

/// Adaptive lasso on the joint design: OLS or ridge pre-estimation, weights
/// 1/|pre|^gamma, break coefficients unbounded, weight coefficients in [0,1],
/// lambda by cross-validation with the one-standard-error rule.
EstimationResult fit_joint(const JointDesign& design, const EstimateConfig& cfg, std::uint64_t seed);

struct EstimateRun {
    CandidateSets candidates;  // after tail-freeze filtering
    EstimationResult result;
};

/// The full two-step procedure on a panel.
EstimateRun estimate_full(const PanelObservations& panel, const EstimateConfig& cfg);
EstimationResult estimate(const PanelObservations& panel, const EstimateConfig& cfg);

}  // namespace spatlasso
