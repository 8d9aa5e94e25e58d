#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spatlasso/model.hpp"
#include "spatlasso/penalized.hpp"

namespace spatlasso {

/// The cumulative-step design: K[t, j] = 1 for j <= t, so K b is the running
/// sum of b and column t carries a level change effective at time t. Held
/// implicitly; only the solver's sparse columns are ever materialized.
struct StepDesign {
    int T = 0;

    Vector apply(const Vector& beta) const;           // cumulative sums
    Vector apply_transpose(const Vector& r) const;    // suffix sums
    Matrix gram() const;                              // (K'K)_{jk} = T - max(j, k), 0-based
    DesignMatrix to_design_matrix() const;
    Matrix to_dense() const;
};

StepDesign build_step_design(int T);

struct Step1Config {
    double gamma = 1.0;
    int cv_folds = 10;
    double ridge_lambda = 0.0;  // <= 0 selects 0.01 * trace(K'K) / T
    bool relax = false;  // union candidates over lambda_1se and lambda_min
    int grid_size = 100;
    double grid_min_ratio = 1e-3;  // the step design has as many columns as rows
    CdConfig cd;
    std::optional<double> lambda_override;  // bypasses cross-validation
};

/// Everything the per-location detection produced; candidates are effective
/// break times t in 2..T (the new level holds from t on).
struct LocationDetection {
    std::vector<int> candidates;
    Vector coefficients;     // final adaptive-lasso fit on the step design
    Vector ridge_estimate;   // pre-estimation
    double lambda = 0.0;
    double lambda_min = 0.0;
    double lambda_1se = 0.0;
};

/// Per-location candidate sets plus the dimension-reduction diagnostic.
struct CandidateSets {
    int T = 0;
    std::vector<std::vector<int>> sets;
    int total_candidates = 0;
    std::vector<std::string> location_errors;  // empty string = detection succeeded
    std::vector<std::string> warnings;
};

LocationDetection detect_location(const Vector& series, const Step1Config& cfg, std::uint64_t seed);

/// Candidate change instants for one series: nonzero step coefficients at the
/// cross-validated lambda_1se, excluding the baseline level at t = 1.
std::vector<int> detect_candidates(const Vector& series, const Step1Config& cfg, std::uint64_t seed);

/// Runs detection independently per panel column (concurrently when jobs > 1).
/// Individual failures are collected; throws only when every location fails.
CandidateSets run_all_locations(const PanelObservations& panel, const Step1Config& cfg,
                                std::uint64_t seed, int jobs = 1);

/// JSON document keyed by location label with sorted candidate times.
std::string candidates_json(const CandidateSets& sets, const std::vector<std::string>& labels);

}  // namespace spatlasso
