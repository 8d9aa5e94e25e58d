#include "spatlasso/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <mutex>
#include <sstream>

#include "spatlasso/csvio.hpp"
#include "spatlasso/parallel.hpp"
#include "spatlasso/rng.hpp"

namespace spatlasso {

std::string to_string(const Cell& cell) {
    std::ostringstream out;
    out << to_string(cell.scheme) << ":" << format_double(cell.rho) << ":" << cell.T;
    return out.str();
}

std::vector<Cell> ExperimentConfig::cells() const {
    if (!cell_filter.empty()) return cell_filter;
    std::vector<Cell> out;
    for (double rho : rhos) {
        for (int T : horizons) {
            for (SchemeKind s : schemes) out.push_back({s, rho, T});
        }
    }
    return out;
}

std::uint64_t replication_seed(std::uint64_t master_seed, const Cell& cell, int rep) {
    std::uint64_t rho_bits;
    static_assert(sizeof(rho_bits) == sizeof(cell.rho));
    std::memcpy(&rho_bits, &cell.rho, sizeof(rho_bits));
    return derive_seed(master_seed, {hash_str(to_string(cell.scheme)), rho_bits,
                                     static_cast<std::uint64_t>(cell.T),
                                     static_cast<std::uint64_t>(rep)});
}

ReplicationRow run_replication(const Cell& cell, int rep, const ExperimentConfig& cfg) {
    ReplicationRow row;
    row.cell = cell;
    row.rep = rep;
    row.seed = replication_seed(cfg.master_seed, cell, rep);
    try {
        SchemeConfig scheme_cfg;
        scheme_cfg.kind = cell.scheme;
        scheme_cfg.link_probability = cfg.link_probability;
        scheme_cfg.n_blocks = cfg.n_blocks;
        scheme_cfg.block_side_min = cfg.block_side_min;
        scheme_cfg.block_side_max = cfg.block_side_max;
        scheme_cfg.seed = derive_seed(row.seed, {1});

        SpatialWeightMatrix w_tilde = gen_scheme(cfg.grid, scheme_cfg);
        SpatialWeightMatrix w = w_tilde.scaled(cell.rho);
        MeanLevelSchedule schedule = build_break_schedule(cfg.grid.n(), cell.T, cfg.group1_size);
        ModelSpec spec(w, schedule, cfg.noise_sd);
        PanelObservations panel = simulate_panel(spec, derive_seed(row.seed, {2}));

        EstimateConfig est = cfg.estimate;
        est.seed = derive_seed(row.seed, {3});
        est.jobs = 1;  // parallelism lives at the replication level
        EstimationResult result = estimate(panel, est);

        row.metrics = evaluate_all(w.weights, result.w_hat.weights, schedule.levels, result.a_hat,
                                   panel.values, result.fitted, cfg.metrics);
        row.ok = true;
    } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
    }
    return row;
}

namespace {

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

void accumulate(std::vector<double>& dst, double v) {
    if (!std::isnan(v)) dst.push_back(v);
}

}  // namespace

AggregateTable aggregate(const std::vector<ReplicationRow>& rows, const ExperimentConfig& cfg) {
    AggregateTable table;
    for (const Cell& cell : cfg.cells()) {
        AggregateRow agg;
        agg.cell = cell;
        std::vector<double> pi0, piw, bw, ba, rmse, mae;
        for (const ReplicationRow& row : rows) {
            if (!(row.cell == cell)) continue;
            if (!row.ok) {
                ++agg.n_failed;
                continue;
            }
            ++agg.n_success;
            accumulate(pi0, row.metrics.specificity);
            accumulate(piw, row.metrics.sensitivity);
            accumulate(bw, row.metrics.weight_bias);
            accumulate(ba, row.metrics.mean_bias);
            accumulate(rmse, row.metrics.fitted_rmse);
            accumulate(mae, row.metrics.weight_mae);
        }
        agg.mean.specificity = mean_of(pi0);
        agg.mean.sensitivity = mean_of(piw);
        agg.mean.weight_bias = mean_of(bw);
        agg.mean.mean_bias = mean_of(ba);
        agg.mean.fitted_rmse = mean_of(rmse);
        agg.mean.weight_mae = mean_of(mae);
        agg.sd.specificity = sd_of(pi0, agg.mean.specificity);
        agg.sd.sensitivity = sd_of(piw, agg.mean.sensitivity);
        agg.sd.weight_bias = sd_of(bw, agg.mean.weight_bias);
        agg.sd.mean_bias = sd_of(ba, agg.mean.mean_bias);
        agg.sd.fitted_rmse = sd_of(rmse, agg.mean.fitted_rmse);
        agg.sd.weight_mae = sd_of(mae, agg.mean.weight_mae);
        table.rows.push_back(std::move(agg));
    }
    return table;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                const std::vector<ReplicationRow>* completed,
                                const std::function<void(const ReplicationRow&)>& progress) {
    if (cfg.replications < 1) throw InvalidInput("run_experiment: replications must be positive");
    std::vector<Cell> cells = cfg.cells();
    if (cells.empty()) throw InvalidInput("run_experiment: empty cell grid");

    struct Task {
        Cell cell;
        int rep;
    };
    std::vector<Task> tasks;
    std::vector<ReplicationRow> rows(cells.size() * static_cast<std::size_t>(cfg.replications));
    auto slot = [&](std::size_t cell_idx, int rep) -> ReplicationRow& {
        return rows[cell_idx * static_cast<std::size_t>(cfg.replications) + static_cast<std::size_t>(rep)];
    };

    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        for (int rep = 0; rep < cfg.replications; ++rep) {
            const ReplicationRow* reuse = nullptr;
            if (completed) {
                for (const ReplicationRow& old : *completed) {
                    if (old.cell == cells[ci] && old.rep == rep && old.ok) {
                        reuse = &old;
                        break;
                    }
                }
            }
            if (reuse) {
                slot(ci, rep) = *reuse;
            } else {
                tasks.push_back({cells[ci], rep});
            }
        }
    }

    std::mutex progress_mutex;
    std::vector<std::size_t> cell_index(tasks.size());
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        cell_index[t] = static_cast<std::size_t>(
            std::find_if(cells.begin(), cells.end(), [&](const Cell& c) { return c == tasks[t].cell; }) -
            cells.begin());
    }
    parallel_for(static_cast<int>(tasks.size()), cfg.jobs, [&](int t) {
        ReplicationRow row = run_replication(tasks[static_cast<std::size_t>(t)].cell,
                                             tasks[static_cast<std::size_t>(t)].rep, cfg);
        if (progress) {
            std::lock_guard<std::mutex> lock(progress_mutex);
            progress(row);
        }
        slot(cell_index[static_cast<std::size_t>(t)], tasks[static_cast<std::size_t>(t)].rep) =
            std::move(row);
    });

    ExperimentResult out;
    out.replications = std::move(rows);
    out.table = aggregate(out.replications, cfg);
    for (const ReplicationRow& row : out.replications) {
        if (!row.ok) ++out.n_failed;
    }
    return out;
}

std::string replications_csv(const std::vector<ReplicationRow>& rows) {
    std::string out = "seed,scheme,rho,T,rep,status,pi0,pi_w,b_w,b_a,rmse_y,weight_mae\n";
    for (const ReplicationRow& r : rows) {
        out += std::to_string(r.seed);
        out.push_back(',');
        out += to_string(r.cell.scheme);
        out.push_back(',');
        out += format_double(r.cell.rho);
        out.push_back(',');
        out += std::to_string(r.cell.T);
        out.push_back(',');
        out += std::to_string(r.rep);
        out.push_back(',');
        out += r.ok ? "ok" : "failed";
        if (r.ok) {
            for (double v : {r.metrics.specificity, r.metrics.sensitivity, r.metrics.weight_bias,
                             r.metrics.mean_bias, r.metrics.fitted_rmse, r.metrics.weight_mae}) {
                out.push_back(',');
                out += format_double(v);
            }
        } else {
            out += ",NA,NA,NA,NA,NA,NA";
        }
        out.push_back('\n');
    }
    return out;
}

std::vector<ReplicationRow> parse_replications_csv(const std::string& text) {
    CsvTable t = parse_csv(text, true);
    if (t.header.size() != 12) throw InvalidInput("replications CSV: unexpected column count");
    std::vector<ReplicationRow> rows;
    for (const auto& fields : t.rows) {
        ReplicationRow r;
        r.seed = std::stoull(fields[0]);
        r.cell.scheme = scheme_from_string(fields[1]);
        r.cell.rho = parse_double(fields[2]);
        r.cell.T = static_cast<int>(std::stol(fields[3]));
        r.rep = static_cast<int>(std::stol(fields[4]));
        r.ok = fields[5] == "ok";
        if (r.ok) {
            r.metrics.specificity = parse_double(fields[6], true);
            r.metrics.sensitivity = parse_double(fields[7], true);
            r.metrics.weight_bias = parse_double(fields[8], true);
            r.metrics.mean_bias = parse_double(fields[9], true);
            r.metrics.fitted_rmse = parse_double(fields[10], true);
            r.metrics.weight_mae = parse_double(fields[11], true);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string table_csv(const AggregateTable& table) {
    std::string out =
        "scheme,rho,T,n_success,n_failed,pi0_mean,pi0_sd,pi_w_mean,pi_w_sd,b_w_mean,b_w_sd,"
        "b_a_mean,b_a_sd,rmse_y_mean,rmse_y_sd,weight_mae_mean,weight_mae_sd\n";
    for (const AggregateRow& r : table.rows) {
        out += to_string(r.cell.scheme);
        out.push_back(',');
        out += format_double(r.cell.rho);
        out.push_back(',');
        out += std::to_string(r.cell.T);
        out.push_back(',');
        out += std::to_string(r.n_success);
        out.push_back(',');
        out += std::to_string(r.n_failed);
        for (auto [m, s] : {std::pair{r.mean.specificity, r.sd.specificity},
                            std::pair{r.mean.sensitivity, r.sd.sensitivity},
                            std::pair{r.mean.weight_bias, r.sd.weight_bias},
                            std::pair{r.mean.mean_bias, r.sd.mean_bias},
                            std::pair{r.mean.fitted_rmse, r.sd.fitted_rmse},
                            std::pair{r.mean.weight_mae, r.sd.weight_mae}}) {
            out.push_back(',');
            out += format_double(m);
            out.push_back(',');
            out += format_double(s);
        }
        out.push_back('\n');
    }
    return out;
}

namespace {

std::string fixed3(double v) {
    if (std::isnan(v)) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

}  // namespace

std::string table_markdown(const AggregateTable& table, const ExperimentConfig& cfg) {
    auto find_row = [&](const Cell& cell) -> const AggregateRow* {
        for (const AggregateRow& r : table.rows) {
            if (r.cell == cell) return &r;
        }
        return nullptr;
    };

    // Axes come from the cells actually run, so explicit cell filters render.
    std::vector<double> rhos;
    std::vector<int> horizons;
    std::vector<SchemeKind> schemes;
    for (const Cell& c : cfg.cells()) {
        if (std::find(rhos.begin(), rhos.end(), c.rho) == rhos.end()) rhos.push_back(c.rho);
        if (std::find(horizons.begin(), horizons.end(), c.T) == horizons.end()) horizons.push_back(c.T);
        if (std::find(schemes.begin(), schemes.end(), c.scheme) == schemes.end()) schemes.push_back(c.scheme);
    }

    std::ostringstream out;
    out << "| rho | metric |";
    for (int T : horizons) {
        for (SchemeKind s : schemes) out << " " << to_string(s) << " T=" << T << " |";
    }
    out << "\n|---|---|";
    for (std::size_t i = 0; i < horizons.size() * schemes.size(); ++i) out << "---|";
    out << "\n";

    struct MetricSel {
        const char* name;
        double MetricReport::* field;
    };
    const MetricSel metrics[] = {{"Pi_0", &MetricReport::specificity},
                                 {"Pi_w", &MetricReport::sensitivity},
                                 {"B_w", &MetricReport::weight_bias},
                                 {"B_a", &MetricReport::mean_bias},
                                 {"RMSE_y", &MetricReport::fitted_rmse}};
    for (double rho : rhos) {
        for (const MetricSel& sel : metrics) {
            out << "| " << format_double(rho) << " | " << sel.name << " |";
            for (int T : horizons) {
                for (SchemeKind s : schemes) {
                    const AggregateRow* row = find_row({s, rho, T});
                    out << " " << (row ? fixed3(row->mean.*sel.field) : "NA") << " |";
                }
            }
            out << "\n";
        }
    }
    return out.str();
}

}  // namespace spatlasso
