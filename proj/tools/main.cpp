// spatlasso command-line tool: simulate spatiotemporal panels, estimate the
// spatial weights matrix together with mean-level breaks, run the Monte Carlo
// experiment grid, and apply the rank-based normal transform.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spatlasso/csvio.hpp"
#include "spatlasso/montecarlo.hpp"
#include "spatlasso/panel_io.hpp"
#include "spatlasso/rng.hpp"
#include "spatlasso/simgen.hpp"
#include "spatlasso/step2.hpp"
#include "spatlasso/version.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace spatlasso;

namespace {

// Flat dotted-key JSON config; command-line flags override file values.
ordered_json load_config_file(const std::string& path) {
    if (path.empty()) return ordered_json::object();
    ordered_json doc;
    try {
        doc = ordered_json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("config file " + path + ": " + e.what());
    }
    if (!doc.is_object()) throw InvalidInput("config file must hold a JSON object");
    return doc;
}

template <typename T>
void apply_key(const ordered_json& cfg, const std::string& key, T& value) {
    auto it = cfg.find(key);
    if (it == cfg.end()) return;
    try {
        value = it->get<T>();
    } catch (const nlohmann::json::exception&) {
        throw InvalidInput("config key '" + key + "' has the wrong type");
    }
}

void write_resolved(const fs::path& out_dir, const ordered_json& resolved) {
    write_text_file((out_dir / "config_resolved.json").string(), resolved.dump(2) + "\n");
}

ordered_json resolved_header(const std::string& command) {
    ordered_json doc;
    doc["version"] = kVersion;
    doc["config_schema"] = kConfigSchemaVersion;
    doc["command"] = command;
    return doc;
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

struct SimulateOpts {
    std::string out = "sim_out";
    std::string scheme = "queen";
    double rho = 0.5;
    int rows = 5;
    int cols = 5;
    int T = 100;
    double noise_sd = 1.0;
    int group1_size = 10;
    double link_prob = 0.2;
    int n_blocks = 3;
    int block_side_min = 1;
    int block_side_max = 5;
    std::uint64_t seed = 1;
};

int cmd_simulate(const SimulateOpts& o) {
    if (o.rho < 0.0 || o.rho >= 1.0) {
        throw InvalidInput("--rho must lie in [0, 1) to keep the process stationary");
    }
    SchemeConfig sc;
    sc.kind = scheme_from_string(o.scheme);
    sc.link_probability = o.link_prob;
    sc.n_blocks = o.n_blocks;
    sc.block_side_min = o.block_side_min;
    sc.block_side_max = o.block_side_max;
    sc.seed = derive_seed(o.seed, {1});

    GridSpec grid{o.rows, o.cols};
    SpatialWeightMatrix w_tilde = gen_scheme(grid, sc);
    SpatialWeightMatrix w = w_tilde.scaled(o.rho);
    MeanLevelSchedule schedule = build_break_schedule(grid.n(), o.T, o.group1_size);
    ModelSpec spec(w, schedule, o.noise_sd);
    PanelObservations panel = simulate_panel(spec, derive_seed(o.seed, {2}));

    fs::create_directories(o.out);
    write_panel_csv((fs::path(o.out) / "panel.csv").string(), make_raw_panel(panel.values));
    write_text_file((fs::path(o.out) / "w_true.csv").string(), matrix_csv(w.weights));
    write_panel_csv((fs::path(o.out) / "schedule.csv").string(), make_raw_panel(schedule.levels));

    ordered_json resolved = resolved_header("simulate");
    resolved["simulate.out"] = o.out;
    resolved["simulate.scheme"] = o.scheme;
    resolved["simulate.rho"] = o.rho;
    resolved["simulate.rows"] = o.rows;
    resolved["simulate.cols"] = o.cols;
    resolved["simulate.T"] = o.T;
    resolved["simulate.noise_sd"] = o.noise_sd;
    resolved["simulate.group1_size"] = o.group1_size;
    resolved["simulate.link_prob"] = o.link_prob;
    resolved["simulate.n_blocks"] = o.n_blocks;
    resolved["simulate.block_side_min"] = o.block_side_min;
    resolved["simulate.block_side_max"] = o.block_side_max;
    resolved["simulate.seed"] = o.seed;
    write_resolved(o.out, resolved);
    return 0;
}

struct EstimateOpts {
    std::string input;
    std::string out = "est_out";
    std::uint64_t seed = 1;
    int cv_folds = 10;
    double gamma = 1.0;
    std::string lambda_rule = "min";
    double tail_freeze = 0.0;
    bool relax = false;
    double ridge_lambda = 0.0;
    int grid_size = 100;
    double grid_min_ratio = 0.0;
    int jobs = 1;
};

EstimateConfig to_estimate_config(const EstimateOpts& o) {
    EstimateConfig cfg;
    cfg.seed = o.seed;
    cfg.cv_folds = o.cv_folds;
    cfg.gamma = o.gamma;
    cfg.lambda_rule = lambda_rule_from_string(o.lambda_rule);
    cfg.tail_freeze_fraction = o.tail_freeze;
    cfg.ridge_lambda = o.ridge_lambda;
    cfg.grid_size = o.grid_size;
    cfg.grid_min_ratio = o.grid_min_ratio;
    cfg.jobs = o.jobs;
    cfg.step1.cv_folds = o.cv_folds;
    cfg.step1.gamma = o.gamma;
    cfg.step1.relax = o.relax;
    cfg.step1.grid_size = o.grid_size;
    return cfg;
}

ordered_json estimate_resolved(const EstimateOpts& o, const std::string& command) {
    ordered_json resolved = resolved_header(command);
    resolved["estimate.input"] = o.input;
    resolved["estimate.out"] = o.out;
    resolved["estimate.seed"] = o.seed;
    resolved["estimate.cv_folds"] = o.cv_folds;
    resolved["estimate.gamma"] = o.gamma;
    resolved["estimate.lambda_rule"] = o.lambda_rule;
    resolved["estimate.tail_freeze"] = o.tail_freeze;
    resolved["estimate.relax"] = o.relax;
    resolved["estimate.ridge_lambda"] = o.ridge_lambda;
    resolved["estimate.grid_size"] = o.grid_size;
    resolved["estimate.grid_min_ratio"] = o.grid_min_ratio;
    resolved["estimate.jobs"] = o.jobs;
    return resolved;
}

int cmd_estimate(const EstimateOpts& o) {
    RawPanel raw = read_panel_csv(o.input);
    if (!raw.values.allFinite()) {
        throw InvalidInput("input panel has missing values; run 'transform' (screening) first");
    }
    PanelObservations panel(raw.values);
    EstimateRun run = estimate_full(panel, to_estimate_config(o));
    const EstimationResult& res = run.result;

    fs::create_directories(o.out);
    fs::path out(o.out);
    write_text_file((out / "candidates.json").string(),
                    candidates_json(run.candidates, raw.location_labels));
    write_text_file((out / "w_hat.csv").string(), matrix_csv(res.w_hat.weights));
    write_panel_csv((out / "means.csv").string(),
                    make_raw_panel(res.a_hat, raw.time_labels, raw.location_labels));
    if (res.overall_mean) {
        write_panel_csv((out / "overall_means.csv").string(),
                        make_raw_panel(*res.overall_mean, raw.time_labels, raw.location_labels));
    }

    ordered_json breaks;
    for (int i = 0; i < panel.n; ++i) {
        ordered_json list = ordered_json::array();
        for (const BreakCoef& b : res.b_hat[static_cast<std::size_t>(i)]) {
            if (b.time < 2) continue;  // the baseline level is not a break
            list.push_back({{"t", b.time}, {"magnitude", b.magnitude}});
        }
        breaks[raw.location_labels[static_cast<std::size_t>(i)]] = std::move(list);
    }
    write_text_file((out / "breaks.json").string(), breaks.dump(2) + "\n");

    ordered_json diag;
    diag["spectral_radius_w_hat"] = res.diagnostics.spectral_radius_w_hat;
    diag["selected_lambda"] = res.selected_lambda;
    diag["lambda_min"] = res.diagnostics.lambda_min;
    diag["lambda_1se"] = res.diagnostics.lambda_1se;
    diag["total_candidates"] = res.diagnostics.total_candidates;
    diag["selected_breaks"] = res.diagnostics.selected_breaks;
    diag["pre_estimation"] = res.diagnostics.pre_estimation;
    diag["pre_condition_estimate"] = res.diagnostics.pre_condition;
    diag["cd_sweeps"] = res.diagnostics.cd_sweeps;
    diag["overall_mean_defined"] = res.overall_mean.has_value();
    // Per-location link structure of the estimate: row i of w_hat holds the
    // links location i receives, column i the links it sends out.
    ordered_json links;
    for (int i = 0; i < panel.n; ++i) {
        int incoming = 0;
        int outgoing = 0;
        double in_weight = 0.0;
        double out_weight = 0.0;
        for (int j = 0; j < panel.n; ++j) {
            if (res.w_hat.weights(i, j) > 0.0) {
                ++incoming;
                in_weight += res.w_hat.weights(i, j);
            }
            if (res.w_hat.weights(j, i) > 0.0) {
                ++outgoing;
                out_weight += res.w_hat.weights(j, i);
            }
        }
        links[raw.location_labels[static_cast<std::size_t>(i)]] = {
            {"incoming", incoming},
            {"outgoing", outgoing},
            {"incoming_weight", in_weight},
            {"outgoing_weight", out_weight}};
    }
    diag["links"] = std::move(links);
    diag["warnings"] = res.diagnostics.warnings;
    write_text_file((out / "diagnostics.json").string(), diag.dump(2) + "\n");

    write_resolved(out, estimate_resolved(o, "estimate"));
    for (const std::string& w : res.diagnostics.warnings) {
        std::cerr << "warning: " << w << "\n";
    }
    return 0;
}

struct McOpts {
    std::string out = "mc_out";
    std::string schemes = "queen,random,block";
    std::string rhos = "0.25,0.5,0.75";
    std::string horizons = "100,200";
    std::string cells;
    int reps = 512;
    std::uint64_t master_seed = 1;
    int rows = 5;
    int cols = 5;
    int group1_size = 10;
    double noise_sd = 1.0;
    double link_prob = 0.2;
    int n_blocks = 3;
    int block_side_min = 1;
    int block_side_max = 5;
    int jobs = 1;
    bool resume = false;
    bool literal_pi0 = false;
    EstimateOpts solver;  // shared solver/CV settings
};

Cell parse_cell(const std::string& text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == ':') {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    if (parts.size() != 3) throw InvalidInput("cell '" + text + "' is not scheme:rho:T");
    Cell cell;
    cell.scheme = scheme_from_string(parts[0]);
    cell.rho = parse_double(parts[1]);
    cell.T = static_cast<int>(std::stol(parts[2]));
    return cell;
}

int cmd_mc(const McOpts& o) {
    ExperimentConfig cfg;
    cfg.schemes.clear();
    for (const std::string& s : split_list(o.schemes)) cfg.schemes.push_back(scheme_from_string(s));
    cfg.rhos.clear();
    for (const std::string& r : split_list(o.rhos)) cfg.rhos.push_back(parse_double(r));
    cfg.horizons.clear();
    for (const std::string& h : split_list(o.horizons)) cfg.horizons.push_back(static_cast<int>(std::stol(h)));
    if (!o.cells.empty()) {
        cfg.cell_filter.clear();
        for (const std::string& c : split_list(o.cells)) cfg.cell_filter.push_back(parse_cell(c));
    }
    for (double rho : cfg.rhos) {
        if (rho < 0.0 || rho >= 1.0) throw InvalidInput("--rhos entries must lie in [0, 1)");
    }
    cfg.grid = {o.rows, o.cols};
    cfg.replications = o.reps;
    cfg.master_seed = o.master_seed;
    cfg.group1_size = o.group1_size;
    cfg.noise_sd = o.noise_sd;
    cfg.link_probability = o.link_prob;
    cfg.n_blocks = o.n_blocks;
    cfg.block_side_min = o.block_side_min;
    cfg.block_side_max = o.block_side_max;
    cfg.jobs = o.jobs;
    cfg.metrics.literal_pi0 = o.literal_pi0;
    cfg.estimate = to_estimate_config(o.solver);

    fs::path out(o.out);
    std::vector<ReplicationRow> completed;
    if (o.resume && fs::exists(out / "replications.csv")) {
        completed = parse_replications_csv(read_text_file((out / "replications.csv").string()));
    }

    ExperimentResult res = run_experiment(cfg, completed.empty() ? nullptr : &completed);

    fs::create_directories(out);
    write_text_file((out / "replications.csv").string(), replications_csv(res.replications));
    write_text_file((out / "table.csv").string(), table_csv(res.table));
    write_text_file((out / "table.md").string(), table_markdown(res.table, cfg));

    ordered_json resolved = resolved_header("mc");
    resolved["mc.out"] = o.out;
    resolved["mc.schemes"] = o.schemes;
    resolved["mc.rhos"] = o.rhos;
    resolved["mc.horizons"] = o.horizons;
    resolved["mc.cells"] = o.cells;
    resolved["mc.reps"] = o.reps;
    resolved["mc.master_seed"] = o.master_seed;
    resolved["mc.rows"] = o.rows;
    resolved["mc.cols"] = o.cols;
    resolved["mc.group1_size"] = o.group1_size;
    resolved["mc.noise_sd"] = o.noise_sd;
    resolved["mc.link_prob"] = o.link_prob;
    resolved["mc.n_blocks"] = o.n_blocks;
    resolved["mc.block_side_min"] = o.block_side_min;
    resolved["mc.block_side_max"] = o.block_side_max;
    resolved["mc.jobs"] = o.jobs;
    resolved["mc.resume"] = o.resume;
    resolved["mc.literal_pi0"] = o.literal_pi0;
    resolved["mc.lambda_rule"] = o.solver.lambda_rule;
    resolved["mc.cv_folds"] = o.solver.cv_folds;
    resolved["mc.gamma"] = o.solver.gamma;
    resolved["mc.seed_note"] = "per-replication seeds derive from mc.master_seed";
    write_resolved(out, resolved);

    int total = static_cast<int>(res.replications.size());
    if (res.n_failed > 0) {
        std::cerr << res.n_failed << " of " << total << " replications failed\n";
        for (const ReplicationRow& row : res.replications) {
            if (!row.ok) std::cerr << "  " << to_string(row.cell) << " rep " << row.rep << ": " << row.error << "\n";
        }
    }
    double success_rate = total == 0 ? 0.0 : static_cast<double>(total - res.n_failed) / total;
    return success_rate >= 0.95 ? 0 : 1;
}

struct TransformOpts {
    std::string direction;
    std::string input;
    std::string output;
    std::string state;
    double max_missing = 0.5;
};

int cmd_transform(const TransformOpts& o) {
    RawPanel raw = read_panel_csv(o.input);
    fs::path out_path(o.output);
    fs::path out_dir = out_path.parent_path().empty() ? fs::path(".") : out_path.parent_path();

    ordered_json resolved = resolved_header("transform");
    resolved["transform.direction"] = o.direction;
    resolved["transform.input"] = o.input;
    resolved["transform.output"] = o.output;
    resolved["transform.state"] = o.state;
    resolved["transform.max_missing"] = o.max_missing;

    if (o.direction == "to-normal") {
        ScreenReport report;
        RawPanel screened = screen_locations(raw, o.max_missing, &report);
        auto [scores, state] = pit_to_normal(screened);
        fs::create_directories(out_dir);
        write_panel_csv(o.output, make_raw_panel(scores.values, screened.time_labels,
                                                 screened.location_labels));
        write_text_file(o.state, transform_state_json(state));
        for (const std::string& label : report.dropped_locations) {
            std::cerr << "warning: dropped location " << label << " (too many missing months)\n";
        }
        if (report.filled_cells > 0) {
            std::cerr << "warning: filled " << report.filled_cells
                      << " missing cells by last-observation-carried-forward\n";
        }
    } else if (o.direction == "to-original") {
        if (!raw.values.allFinite()) throw InvalidInput("score panel has missing values");
        TransformState state = transform_state_from_json(read_text_file(o.state));
        if (state.location_labels != raw.location_labels) {
            throw InvalidInput("state file does not match the input panel's locations");
        }
        int clamped = 0;
        Matrix values = normal_to_original(raw.values, state, &clamped);
        fs::create_directories(out_dir);
        write_panel_csv(o.output, make_raw_panel(values, raw.time_labels, raw.location_labels));
        if (clamped > 0) {
            std::cerr << "warning: " << clamped
                      << " scores fell outside the fitted range and were clamped\n";
        }
    } else {
        throw InvalidInput("--direction must be to-normal or to-original");
    }
    write_resolved(out_dir, resolved);
    return 0;
}

void add_solver_flags(CLI::App* cmd, EstimateOpts& o) {
    cmd->add_option("--seed", o.seed, "Master seed");
    cmd->add_option("--cv-folds", o.cv_folds, "Cross-validation folds (10; 25 mirrors the location count)");
    cmd->add_option("--gamma", o.gamma, "Adaptive-weight exponent");
    cmd->add_option("--lambda-rule", o.lambda_rule, "Joint-fit lambda selection: min or 1se")
        ->check(CLI::IsMember({"min", "1se"}));
    cmd->add_option("--ridge-lambda", o.ridge_lambda, "Ridge level for pre-estimation (0 = auto)");
    cmd->add_option("--grid-size", o.grid_size, "Lambda grid length");
    cmd->add_option("--grid-min-ratio", o.grid_min_ratio, "Grid floor as a fraction of lambda_max (0 = auto)");
    cmd->add_flag("--relax", o.relax, "Union step-1 candidates over lambda_1se and lambda_min");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatial weights matrix and structural-break estimation for spatiotemporal panels"};
    app.require_subcommand(1);
    std::string version_line = std::string("spatlasso ") + kVersion + " (config schema " +
                               std::to_string(kConfigSchemaVersion) + ")";
    app.set_version_flag("--version", version_line);

    std::string config_path;
    app.add_option("--config", config_path, "JSON config file with flat dotted keys (flags win)")
        ->expected(1);

    // Pre-scan for --config so file values become defaults before parsing.
    ordered_json file_cfg = ordered_json::object();
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            file_cfg = load_config_file(argv[i + 1]);
            break;
        }
    }

    SimulateOpts sim;
    apply_key(file_cfg, "simulate.out", sim.out);
    apply_key(file_cfg, "simulate.scheme", sim.scheme);
    apply_key(file_cfg, "simulate.rho", sim.rho);
    apply_key(file_cfg, "simulate.rows", sim.rows);
    apply_key(file_cfg, "simulate.cols", sim.cols);
    apply_key(file_cfg, "simulate.T", sim.T);
    apply_key(file_cfg, "simulate.noise_sd", sim.noise_sd);
    apply_key(file_cfg, "simulate.group1_size", sim.group1_size);
    apply_key(file_cfg, "simulate.link_prob", sim.link_prob);
    apply_key(file_cfg, "simulate.n_blocks", sim.n_blocks);
    apply_key(file_cfg, "simulate.block_side_min", sim.block_side_min);
    apply_key(file_cfg, "simulate.block_side_max", sim.block_side_max);
    apply_key(file_cfg, "simulate.seed", sim.seed);
    CLI::App* simulate = app.add_subcommand("simulate", "Draw a synthetic panel from the model");
    simulate->add_option("--out", sim.out, "Output directory");
    simulate->add_option("--scheme", sim.scheme, "Weighting scheme: queen, random, or block")
        ->check(CLI::IsMember({"queen", "random", "block"}));
    simulate->add_option("--rho", sim.rho, "Dependence level, spectral radius of W (in [0,1))");
    simulate->add_option("--rows", sim.rows, "Lattice rows");
    simulate->add_option("--cols", sim.cols, "Lattice columns");
    simulate->add_option("--T", sim.T, "Time points");
    simulate->add_option("--noise-sd", sim.noise_sd, "Innovation standard deviation");
    simulate->add_option("--group1-size", sim.group1_size, "Locations with the two-break schedule");
    simulate->add_option("--link-prob", sim.link_prob, "Random-scheme link probability");
    simulate->add_option("--n-blocks", sim.n_blocks, "Block-scheme rectangle count");
    simulate->add_option("--block-side-min", sim.block_side_min, "Smallest rectangle side");
    simulate->add_option("--block-side-max", sim.block_side_max, "Largest rectangle side");
    simulate->add_option("--seed", sim.seed, "Master seed");

    EstimateOpts est;
    apply_key(file_cfg, "estimate.input", est.input);
    apply_key(file_cfg, "estimate.out", est.out);
    apply_key(file_cfg, "estimate.seed", est.seed);
    apply_key(file_cfg, "estimate.cv_folds", est.cv_folds);
    apply_key(file_cfg, "estimate.gamma", est.gamma);
    apply_key(file_cfg, "estimate.lambda_rule", est.lambda_rule);
    apply_key(file_cfg, "estimate.tail_freeze", est.tail_freeze);
    apply_key(file_cfg, "estimate.relax", est.relax);
    apply_key(file_cfg, "estimate.ridge_lambda", est.ridge_lambda);
    apply_key(file_cfg, "estimate.grid_size", est.grid_size);
    apply_key(file_cfg, "estimate.grid_min_ratio", est.grid_min_ratio);
    apply_key(file_cfg, "estimate.jobs", est.jobs);
    CLI::App* estimate = app.add_subcommand("estimate", "Two-step estimation on a panel CSV");
    estimate->add_option("--input", est.input, "Panel CSV (complete, no missing cells)")->required();
    estimate->add_option("--out", est.out, "Output directory");
    estimate->add_option("--tail-freeze", est.tail_freeze,
                         "Fraction of trailing time points barred from breaks (0.05 for monthly data)");
    estimate->add_option("--jobs", est.jobs, "Concurrent location detections / CV folds");
    add_solver_flags(estimate, est);

    McOpts mc;
    apply_key(file_cfg, "mc.out", mc.out);
    apply_key(file_cfg, "mc.schemes", mc.schemes);
    apply_key(file_cfg, "mc.rhos", mc.rhos);
    apply_key(file_cfg, "mc.horizons", mc.horizons);
    apply_key(file_cfg, "mc.cells", mc.cells);
    apply_key(file_cfg, "mc.reps", mc.reps);
    apply_key(file_cfg, "mc.master_seed", mc.master_seed);
    apply_key(file_cfg, "mc.rows", mc.rows);
    apply_key(file_cfg, "mc.cols", mc.cols);
    apply_key(file_cfg, "mc.group1_size", mc.group1_size);
    apply_key(file_cfg, "mc.noise_sd", mc.noise_sd);
    apply_key(file_cfg, "mc.link_prob", mc.link_prob);
    apply_key(file_cfg, "mc.n_blocks", mc.n_blocks);
    apply_key(file_cfg, "mc.block_side_min", mc.block_side_min);
    apply_key(file_cfg, "mc.block_side_max", mc.block_side_max);
    apply_key(file_cfg, "mc.jobs", mc.jobs);
    apply_key(file_cfg, "mc.literal_pi0", mc.literal_pi0);
    apply_key(file_cfg, "mc.lambda_rule", mc.solver.lambda_rule);
    apply_key(file_cfg, "mc.cv_folds", mc.solver.cv_folds);
    apply_key(file_cfg, "mc.gamma", mc.solver.gamma);
    CLI::App* mc_cmd = app.add_subcommand("mc", "Replicated simulation experiment over a cell grid");
    mc_cmd->add_option("--out", mc.out, "Output directory");
    mc_cmd->add_option("--schemes", mc.schemes, "Comma-separated schemes");
    mc_cmd->add_option("--rhos", mc.rhos, "Comma-separated dependence levels");
    mc_cmd->add_option("--horizons", mc.horizons, "Comma-separated T values");
    mc_cmd->add_option("--cells", mc.cells, "Explicit cells scheme:rho:T, comma-separated (overrides the grid)");
    mc_cmd->add_option("--reps", mc.reps, "Replications per cell");
    mc_cmd->add_option("--master-seed", mc.master_seed, "Master seed");
    mc_cmd->add_option("--rows", mc.rows, "Lattice rows");
    mc_cmd->add_option("--cols", mc.cols, "Lattice columns");
    mc_cmd->add_option("--group1-size", mc.group1_size, "Locations with the two-break schedule");
    mc_cmd->add_option("--noise-sd", mc.noise_sd, "Innovation standard deviation");
    mc_cmd->add_option("--link-prob", mc.link_prob, "Random-scheme link probability");
    mc_cmd->add_option("--n-blocks", mc.n_blocks, "Block-scheme rectangle count");
    mc_cmd->add_option("--jobs", mc.jobs, "Concurrent replications");
    mc_cmd->add_flag("--resume", mc.resume, "Reuse completed rows from replications.csv");
    mc_cmd->add_flag("--literal-pi0", mc.literal_pi0, "Report the literal zero-count ratio as Pi_0");
    mc_cmd->add_option("--lambda-rule", mc.solver.lambda_rule, "Joint-fit lambda selection: min or 1se")
        ->check(CLI::IsMember({"min", "1se"}));
    mc_cmd->add_option("--cv-folds", mc.solver.cv_folds, "Cross-validation folds");
    mc_cmd->add_option("--gamma", mc.solver.gamma, "Adaptive-weight exponent");

    TransformOpts tr;
    apply_key(file_cfg, "transform.direction", tr.direction);
    apply_key(file_cfg, "transform.input", tr.input);
    apply_key(file_cfg, "transform.output", tr.output);
    apply_key(file_cfg, "transform.state", tr.state);
    apply_key(file_cfg, "transform.max_missing", tr.max_missing);
    CLI::App* transform = app.add_subcommand("transform", "Rank-based normal transform and its inverse");
    transform->add_option("--direction", tr.direction, "to-normal or to-original")
        ->required()
        ->check(CLI::IsMember({"to-normal", "to-original"}));
    transform->add_option("--input", tr.input, "Input panel CSV")->required();
    transform->add_option("--output", tr.output, "Output panel CSV")->required();
    transform->add_option("--state", tr.state, "Transform state JSON (written by to-normal)")->required();
    transform->add_option("--max-missing", tr.max_missing,
                          "Drop locations with a larger missing fraction (to-normal)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim);
        if (estimate->parsed()) return cmd_estimate(est);
        if (mc_cmd->parsed()) return cmd_mc(mc);
        if (transform->parsed()) return cmd_transform(tr);
    } catch (const InvalidInput& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
