#pragma once

#include <vector>

#include "spatlasso/types.hpp"

namespace spatlasso {

/// n x n nonnegative spatial dependence weights with a zero diagonal.
/// `row_standardized` marks matrices whose nonzero rows sum to one.
struct SpatialWeightMatrix {
    int n = 0;
    Matrix weights;
    bool row_standardized = false;

    SpatialWeightMatrix() = default;
    SpatialWeightMatrix(Matrix w, bool standardized = false);

    /// Returns a copy scaled by rho (drops the row_standardized flag for rho != 1).
    SpatialWeightMatrix scaled(double rho) const;

    static SpatialWeightMatrix zero(int n);
};

/// T x n panel of observations; rows are time points, columns locations.
struct PanelObservations {
    int T = 0;
    int n = 0;
    Matrix values;

    PanelObservations() = default;
    PanelObservations(Matrix v);
};

/// Piecewise-constant local mean levels a_{t,i} together with the derived
/// change-point sets. change_points(i) holds the indices tau (1-based,
/// 1 <= tau <= T-1) where the level at time tau differs from time tau+1.
struct MeanLevelSchedule {
    int T = 0;
    int n = 0;
    Matrix levels;
    std::vector<std::vector<int>> change_points;

    MeanLevelSchedule() = default;
    explicit MeanLevelSchedule(Matrix lv);
};

struct ModelSpec {
    SpatialWeightMatrix weights;
    MeanLevelSchedule schedule;
    double noise_sd = 1.0;

    ModelSpec() = default;
    ModelSpec(SpatialWeightMatrix w, MeanLevelSchedule s, double sd);
};

/// Largest absolute eigenvalue of a nonnegative matrix, by power iteration
/// (relative tolerance 1e-10, capped at 10000 iterations) with a
/// repeated-squaring fallback for matrices whose dominant eigenvalue the
/// iteration cannot certify within the cap.
double spectral_radius(const SpatialWeightMatrix& w);
double spectral_radius(const Matrix& w);

/// S = (I - W)^{-1} by LU solve; requires spectral_radius(w) < 1. The result
/// satisfies ||(I - W) S - I||_max < 1e-10 or a NumericError is thrown.
Matrix reduced_form(const SpatialWeightMatrix& w);

/// Row t of the result is S * a_t: the observable mean level implied by the
/// local means after spatial propagation.
Matrix expected_panel(const ModelSpec& spec);

}  // namespace spatlasso
