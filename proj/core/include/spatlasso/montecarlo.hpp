#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spatlasso/metrics.hpp"
#include "spatlasso/simgen.hpp"
#include "spatlasso/step2.hpp"

namespace spatlasso {

struct Cell {
    SchemeKind scheme = SchemeKind::queen;
    double rho = 0.5;
    int T = 100;

    bool operator==(const Cell&) const = default;
};

std::string to_string(const Cell& cell);

struct ExperimentConfig {
    std::vector<SchemeKind> schemes{SchemeKind::queen, SchemeKind::random, SchemeKind::block};
    std::vector<double> rhos{0.25, 0.5, 0.75};
    std::vector<int> horizons{100, 200};
    GridSpec grid{5, 5};
    int replications = 512;
    std::uint64_t master_seed = 1;
    int group1_size = 10;
    double noise_sd = 1.0;
    double link_probability = 0.2;
    int n_blocks = 3;
    int block_side_min = 1;
    int block_side_max = 5;
    EstimateConfig estimate;
    MetricOptions metrics;
    int jobs = 1;
    std::vector<Cell> cell_filter;  // when nonempty, replaces the scheme x rho x T grid

    std::vector<Cell> cells() const;
};

struct ReplicationRow {
    Cell cell;
    int rep = 0;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    MetricReport metrics;
};

struct AggregateRow {
    Cell cell;
    int n_success = 0;
    int n_failed = 0;
    MetricReport mean;
    MetricReport sd;
};

struct AggregateTable {
    std::vector<AggregateRow> rows;
};

struct ExperimentResult {
    std::vector<ReplicationRow> replications;  // sorted by (cell order, rep)
    AggregateTable table;
    int n_failed = 0;
};

/// Seed for one replication, independent of every other replication and of M,
/// so reruns and extensions reuse earlier draws exactly.
std::uint64_t replication_seed(std::uint64_t master_seed, const Cell& cell, int rep);

/// Simulate + estimate + evaluate one replication. Random and block schemes
/// are redrawn per replication; the queen scheme is deterministic. Estimation
/// failures are returned as failed rows, not thrown.
ReplicationRow run_replication(const Cell& cell, int rep, const ExperimentConfig& cfg);

/// All cells x replications, optionally in parallel. `completed` rows (from a
/// previous run) are reused instead of recomputed; `progress`, when set, is
/// called after each finished replication.
ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::vector<ReplicationRow>* completed = nullptr,
                                const std::function<void(const ReplicationRow&)>& progress = {});

AggregateTable aggregate(const std::vector<ReplicationRow>& rows, const ExperimentConfig& cfg);

std::string replications_csv(const std::vector<ReplicationRow>& rows);
std::vector<ReplicationRow> parse_replications_csv(const std::string& text);
std::string table_csv(const AggregateTable& table);
/// Markdown table shaped like the simulation report: metric rows grouped by
/// rho, one column per (horizon, scheme) pair, three decimals.
std::string table_markdown(const AggregateTable& table, const ExperimentConfig& cfg);

}  // namespace spatlasso
