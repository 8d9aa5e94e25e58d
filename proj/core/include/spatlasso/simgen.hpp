#pragma once

#include <cstdint>
#include <string>

#include "spatlasso/model.hpp"

namespace spatlasso {

/// Rectangular lattice; location i sits at (i / cols, i % cols).
struct GridSpec {
    int rows = 5;
    int cols = 5;

    int n() const { return rows * cols; }
};

enum class SchemeKind { queen, random, block };

SchemeKind scheme_from_string(const std::string& name);
std::string to_string(SchemeKind kind);

struct SchemeConfig {
    SchemeKind kind = SchemeKind::queen;
    double link_probability = 0.2;  // random scheme
    int n_blocks = 3;               // block scheme
    int block_side_min = 1;
    int block_side_max = 5;
    std::uint64_t seed = 0;
};

/// Divides every nonzero row by its sum; zero rows stay zero.
Matrix row_standardize(const Matrix& w);

/// Row-standardized 8-neighbour contiguity on the lattice. Support is
/// symmetric; corner cells keep 3 links, interior cells 8.
SpatialWeightMatrix gen_queen(const GridSpec& grid);

/// Each off-diagonal entry drawn as a link with cfg.link_probability, then
/// row-standardized. Links are directed: w_ij > 0 does not force w_ji > 0.
SpatialWeightMatrix gen_random(int n, const SchemeConfig& cfg);

/// cfg.n_blocks axis-aligned rectangles with side lengths uniform in
/// [block_side_min, block_side_max]; every ordered pair of distinct cells
/// inside a rectangle is linked, then rows are standardized. Overlapping
/// rectangles merge through the union of their links.
SpatialWeightMatrix gen_block(const GridSpec& grid, const SchemeConfig& cfg);

/// Dispatch over cfg.kind.
SpatialWeightMatrix gen_scheme(const GridSpec& grid, const SchemeConfig& cfg);

/// Two-group schedule: locations 1..group1_size jump 0 -> 3 at ceil(0.5 T) and
/// back to 0 at ceil(0.75 T); the rest jump 0 -> 7 at ceil(0.25 T).
MeanLevelSchedule build_break_schedule(int n, int T, int group1_size);

/// Draws eps_t ~ N(0, noise_sd^2 I) per time point and returns rows
/// y_t' = (S (a_t + eps_t))' with S = reduced_form(weights). Deterministic
/// given the seed.
PanelObservations simulate_panel(const ModelSpec& spec, std::uint64_t seed);

}  // namespace spatlasso
