#pragma once

#include <string>
#include <vector>

#include "spatlasso/model.hpp"

namespace spatlasso {

/// Labelled panel as read from disk; NaN marks a missing cell.
struct RawPanel {
    std::vector<std::string> time_labels;      // length T
    std::vector<std::string> location_labels;  // length n
    Matrix values;                             // T x n

    int T() const { return static_cast<int>(values.rows()); }
    int n() const { return static_cast<int>(values.cols()); }
};

/// First column time labels, header row location labels, "NA" for missing.
RawPanel read_panel_csv(const std::string& path);
RawPanel parse_panel_csv(const std::string& text);
std::string panel_csv(const RawPanel& panel);
void write_panel_csv(const std::string& path, const RawPanel& panel);

RawPanel make_raw_panel(const Matrix& values, std::vector<std::string> time_labels = {},
                        std::vector<std::string> location_labels = {});

struct ScreenReport {
    std::vector<std::string> dropped_locations;
    int filled_cells = 0;
};

/// Drops locations whose missing share exceeds max_missing_fraction, then
/// fills remaining gaps by last observation carried forward (leading gaps are
/// back-filled from the first observation).
RawPanel screen_locations(const RawPanel& panel, double max_missing_fraction,
                          ScreenReport* report = nullptr);

/// What pit_to_normal stored per location so scores can be mapped back:
/// strictly increasing original values with their normal scores.
struct TransformState {
    std::vector<std::string> location_labels;
    std::vector<std::vector<double>> values;  // per location, ascending
    std::vector<std::vector<double>> scores;  // same shape, ascending
    int T = 0;
};

/// Rank-based normal scores: the value of rank r (average ranks for ties)
/// among T maps to Phi^{-1}((r - 0.5) / T). Throws on constant columns.
std::pair<PanelObservations, TransformState> pit_to_normal(const RawPanel& panel);

/// Inverts the rank mapping by piecewise-linear interpolation between
/// adjacent order statistics; exact at observed score points. Scores outside
/// the observed range are clamped to the boundary order statistics and
/// counted in *clamped when given.
Matrix normal_to_original(const Matrix& scores, const TransformState& state,
                          int* clamped = nullptr);

std::string transform_state_json(const TransformState& state);
TransformState transform_state_from_json(const std::string& text);

}  // namespace spatlasso
