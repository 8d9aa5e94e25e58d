#include "spatlasso/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "spatlasso/rng.hpp"

namespace spatlasso {

SchemeKind scheme_from_string(const std::string& name) {
    if (name == "queen") return SchemeKind::queen;
    if (name == "random") return SchemeKind::random;
    if (name == "block") return SchemeKind::block;
    throw InvalidInput("unknown weighting scheme '" + name + "' (expected queen|random|block)");
}

std::string to_string(SchemeKind kind) {
    switch (kind) {
        case SchemeKind::queen: return "queen";
        case SchemeKind::random: return "random";
        case SchemeKind::block: return "block";
    }
    return "?";
}

Matrix row_standardize(const Matrix& w) {
    Matrix out = w;
    for (int i = 0; i < out.rows(); ++i) {
        double s = out.row(i).sum();
        if (s > 0.0) out.row(i) /= s;
    }
    return out;
}

SpatialWeightMatrix gen_queen(const GridSpec& grid) {
    if (grid.rows < 2 || grid.cols < 2) throw InvalidInput("gen_queen: grid must be at least 2x2");
    const int n = grid.n();
    Matrix adj = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        int r = i / grid.cols;
        int c = i % grid.cols;
        for (int dr = -1; dr <= 1; ++dr) {
            for (int dc = -1; dc <= 1; ++dc) {
                if (dr == 0 && dc == 0) continue;
                int rr = r + dr;
                int cc = c + dc;
                if (rr < 0 || rr >= grid.rows || cc < 0 || cc >= grid.cols) continue;
                adj(i, rr * grid.cols + cc) = 1.0;
            }
        }
    }
    return SpatialWeightMatrix(row_standardize(adj), true);
}

SpatialWeightMatrix gen_random(int n, const SchemeConfig& cfg) {
    if (n < 2) throw InvalidInput("gen_random: need at least 2 locations");
    if (cfg.link_probability < 0.0 || cfg.link_probability > 1.0) {
        throw InvalidInput("gen_random: link_probability outside [0,1]");
    }
    auto engine = make_engine(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Matrix adj = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (unif(engine) < cfg.link_probability) adj(i, j) = 1.0;
        }
    }
    return SpatialWeightMatrix(row_standardize(adj), true);
}

SpatialWeightMatrix gen_block(const GridSpec& grid, const SchemeConfig& cfg) {
    if (grid.rows < 1 || grid.cols < 1) throw InvalidInput("gen_block: empty grid");
    if (cfg.n_blocks < 1) throw InvalidInput("gen_block: need at least one block");
    if (cfg.block_side_min < 1 || cfg.block_side_max < cfg.block_side_min) {
        throw InvalidInput("gen_block: invalid side range");
    }
    const int n = grid.n();
    auto engine = make_engine(cfg.seed);
    Matrix adj = Matrix::Zero(n, n);
    for (int b = 0; b < cfg.n_blocks; ++b) {
        // Side lengths are drawn independently (blocks need not be square) and
        // clamped so the rectangle fits on the grid.
        auto side = [&](int limit) {
            int hi = std::min(cfg.block_side_max, limit);
            int lo = std::min(cfg.block_side_min, hi);
            return std::uniform_int_distribution<int>(lo, hi)(engine);
        };
        int height = side(grid.rows);
        int width = side(grid.cols);
        int top = std::uniform_int_distribution<int>(0, grid.rows - height)(engine);
        int left = std::uniform_int_distribution<int>(0, grid.cols - width)(engine);
        for (int r1 = top; r1 < top + height; ++r1) {
            for (int c1 = left; c1 < left + width; ++c1) {
                for (int r2 = top; r2 < top + height; ++r2) {
                    for (int c2 = left; c2 < left + width; ++c2) {
                        int i = r1 * grid.cols + c1;
                        int j = r2 * grid.cols + c2;
                        if (i != j) adj(i, j) = 1.0;
                    }
                }
            }
        }
    }
    return SpatialWeightMatrix(row_standardize(adj), true);
}

SpatialWeightMatrix gen_scheme(const GridSpec& grid, const SchemeConfig& cfg) {
    switch (cfg.kind) {
        case SchemeKind::queen: return gen_queen(grid);
        case SchemeKind::random: return gen_random(grid.n(), cfg);
        case SchemeKind::block: return gen_block(grid, cfg);
    }
    throw InvalidInput("gen_scheme: unknown kind");
}

MeanLevelSchedule build_break_schedule(int n, int T, int group1_size) {
    if (T < 8) throw InvalidInput("build_break_schedule: T must be at least 8");
    if (group1_size < 1 || group1_size >= n) {
        throw InvalidInput("build_break_schedule: group1_size must lie in [1, n)");
    }
    // A change "at t = cT" means the new level holds from time ceil(cT) on
    // (1-based times).
    const int t_half = static_cast<int>(std::ceil(0.50 * T));
    const int t_three_q = static_cast<int>(std::ceil(0.75 * T));
    const int t_quarter = static_cast<int>(std::ceil(0.25 * T));
    Matrix levels = Matrix::Zero(T, n);
    for (int i = 0; i < n; ++i) {
        for (int t = 1; t <= T; ++t) {
            double v = 0.0;
            if (i < group1_size) {
                if (t >= t_half && t < t_three_q) v = 3.0;
            } else {
                if (t >= t_quarter) v = 7.0;
            }
            levels(t - 1, i) = v;
        }
    }
    return MeanLevelSchedule(std::move(levels));
}

PanelObservations simulate_panel(const ModelSpec& spec, std::uint64_t seed) {
    const int n = spec.weights.n;
    const int T = spec.schedule.T;
    Matrix s = reduced_form(spec.weights);
    auto engine = make_engine(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix values(T, n);
    Vector shocked(n);
    for (int t = 0; t < T; ++t) {
        for (int i = 0; i < n; ++i) {
            shocked[i] = spec.schedule.levels(t, i) + spec.noise_sd * gauss(engine);
        }
        values.row(t) = (s * shocked).transpose();
    }
    return PanelObservations(std::move(values));
}

}  // namespace spatlasso
