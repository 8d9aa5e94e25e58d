#include "spatlasso/step2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spatlasso/rng.hpp"

namespace spatlasso {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

LambdaRule lambda_rule_from_string(const std::string& name) {
    if (name == "min") return LambdaRule::cv_min;
    if (name == "1se") return LambdaRule::cv_1se;
    throw InvalidInput("unknown lambda rule '" + name + "' (expected min|1se)");
}

std::string to_string(LambdaRule rule) {
    return rule == LambdaRule::cv_min ? "min" : "1se";
}

JointDesign build_joint_design(const PanelObservations& panel, const CandidateSets& candidates) {
    const int n = panel.n;
    const int T = panel.T;
    if (static_cast<int>(candidates.sets.size()) != n) {
        throw InvalidInput("build_joint_design: candidate sets do not match panel width");
    }
    for (const auto& set : candidates.sets) {
        for (std::size_t k = 0; k < set.size(); ++k) {
            if (set[k] < 2 || set[k] > T) throw InvalidInput("build_joint_design: candidate time out of range");
            if (k > 0 && set[k] <= set[k - 1]) throw InvalidInput("build_joint_design: candidates must be sorted");
        }
    }

    JointDesign jd;
    jd.n = n;
    jd.T = T;
    for (const auto& set : candidates.sets) jd.n_break_cols += 1 + static_cast<int>(set.size());
    jd.n_weight_cols = n * (n - 1);
    jd.design = DesignMatrix(n * T, jd.n_break_cols + jd.n_weight_cols);
    jd.column_map.reserve(static_cast<std::size_t>(jd.n_break_cols + jd.n_weight_cols));

    jd.response = Vector(n * T);
    for (int i = 0; i < n; ++i) {
        for (int t = 0; t < T; ++t) jd.response[i * T + t] = panel.values(t, i);
    }

    int col = 0;
    for (int i = 0; i < n; ++i) {
        const int block = i * T;
        jd.design.set_step_column(col, block, block + T - 1);
        jd.column_map.push_back({JointColumn::Kind::break_coef, i, 1, 0});
        ++col;
        for (int t : candidates.sets[static_cast<std::size_t>(i)]) {
            jd.design.set_step_column(col, block + (t - 1), block + T - 1);
            jd.column_map.push_back({JointColumn::Kind::break_coef, i, t, 0});
            ++col;
        }
    }
    for (int i = 0; i < n; ++i) {
        const int block = i * T;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            std::vector<int> rows(static_cast<std::size_t>(T));
            std::vector<double> vals(static_cast<std::size_t>(T));
            for (int t = 0; t < T; ++t) {
                rows[static_cast<std::size_t>(t)] = block + t;
                vals[static_cast<std::size_t>(t)] = panel.values(t, j);
            }
            jd.design.set_column(col, std::move(rows), std::move(vals));
            jd.column_map.push_back({JointColumn::Kind::weight, i, 0, j});
            ++col;
        }
    }
    return jd;
}

namespace {

Vector joint_adaptive_weights(const Vector& pre, double gamma) {
    Vector w(pre.size());
    for (int j = 0; j < static_cast<int>(pre.size()); ++j) {
        double a = std::abs(pre[j]);
        w[j] = a == 0.0 ? kInf : 1.0 / std::pow(a, gamma);
    }
    return w;
}

}  // namespace

EstimationResult fit_joint(const JointDesign& jd, const EstimateConfig& cfg, std::uint64_t seed) {
    const int n = jd.n;
    const int T = jd.T;
    const int p = jd.design.cols();
    const int m = jd.design.rows();
    if (p < 1 || m != n * T) throw InvalidInput("fit_joint: malformed joint design");

    EstimationResult out;
    out.diagnostics.total_candidates = jd.n_break_cols - n;

    // Pre-estimation: plain least squares when the system is comfortably
    // overdetermined and well-conditioned, ridge otherwise.
    Vector pre;
    bool ols_allowed = p <= cfg.ols_max_p_ratio * static_cast<double>(m);
    if (ols_allowed) {
        try {
            NormalEqSolution sol = solve_normal_equations(jd.design, jd.response, 0.0);
            if (sol.condition_estimate < cfg.ols_max_condition) {
                pre = std::move(sol.beta);
                out.diagnostics.pre_estimation = "ols";
                out.diagnostics.pre_condition = sol.condition_estimate;
            }
        } catch (const NumericError&) {
            // fall through to ridge
        }
    }
    if (out.diagnostics.pre_estimation.empty()) {
        double rl = cfg.ridge_lambda > 0.0 ? cfg.ridge_lambda : default_ridge_lambda(jd.design);
        NormalEqSolution sol = solve_normal_equations(jd.design, jd.response, rl);
        pre = std::move(sol.beta);
        out.diagnostics.pre_estimation = "ridge";
        out.diagnostics.pre_condition = sol.condition_estimate;
    }

    Vector lo(p);
    Vector hi(p);
    for (int j = 0; j < p; ++j) {
        if (jd.column_map[static_cast<std::size_t>(j)].kind == JointColumn::Kind::weight) {
            lo[j] = 0.0;
            hi[j] = 1.0;
        } else {
            lo[j] = -kInf;
            hi[j] = kInf;
        }
    }
    PenalizedProblem problem(jd.design, jd.response, joint_adaptive_weights(pre, cfg.gamma),
                             std::move(lo), std::move(hi), false);

    double lambda;
    if (cfg.lambda_override) {
        lambda = *cfg.lambda_override;
        out.diagnostics.lambda_min = lambda;
        out.diagnostics.lambda_1se = lambda;
    } else {
        double min_ratio = cfg.grid_min_ratio;
        if (min_ratio <= 0.0) min_ratio = m > p ? 1e-4 : 1e-2;
        // Fold fits only rank lambdas; run them at a relaxed tolerance.
        CdConfig cv_cd = cfg.cd;
        cv_cd.tol = std::max(cv_cd.tol, 1e-4);
        CvResult cv = cross_validate(problem, cfg.cv_folds, seed, cv_cd, std::nullopt,
                                     cfg.grid_size, min_ratio, cfg.jobs);
        lambda = cfg.lambda_rule == LambdaRule::cv_1se ? cv.lambda_1se : cv.lambda_min;
        out.diagnostics.lambda_min = cv.lambda_min;
        out.diagnostics.lambda_1se = cv.lambda_1se;
    }
    LassoFit fit = lasso_cd(problem, lambda, std::nullopt, cfg.cd);
    out.selected_lambda = lambda;
    out.diagnostics.cd_sweeps = fit.iterations;

    // Assemble the estimate from the coefficient stack.
    Matrix w = Matrix::Zero(n, n);
    out.b_hat.assign(static_cast<std::size_t>(n), {});
    Matrix jumps = Matrix::Zero(T, n);
    for (int j = 0; j < p; ++j) {
        const JointColumn& info = jd.column_map[static_cast<std::size_t>(j)];
        double b = fit.coefficients[j];
        if (info.kind == JointColumn::Kind::weight) {
            w(info.location, info.source) = b;
        } else if (b != 0.0) {
            out.b_hat[static_cast<std::size_t>(info.location)].push_back({info.time, b});
            jumps(info.time - 1, info.location) += b;
            if (info.time >= 2) ++out.diagnostics.selected_breaks;
        }
    }
    out.w_hat = SpatialWeightMatrix(std::move(w), false);

    out.a_hat = Matrix(T, n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int t = 0; t < T; ++t) {
            acc += jumps(t, i);
            out.a_hat(t, i) = acc;
        }
    }

    Vector stacked_fit = jd.design.multiply(fit.coefficients);
    out.fitted = Matrix(T, n);
    for (int i = 0; i < n; ++i) {
        for (int t = 0; t < T; ++t) out.fitted(t, i) = stacked_fit[i * T + t];
    }

    out.diagnostics.spectral_radius_w_hat = spectral_radius(out.w_hat);
    if (out.diagnostics.spectral_radius_w_hat < 1.0) {
        try {
            Matrix s = reduced_form(out.w_hat);
            out.overall_mean = out.a_hat * s.transpose();
        } catch (const NumericError& e) {
            out.diagnostics.warnings.push_back(std::string("overall mean omitted: ") + e.what());
        }
    } else {
        std::ostringstream msg;
        msg << "overall mean omitted: spectral radius of the estimate is "
            << out.diagnostics.spectral_radius_w_hat << " >= 1";
        out.diagnostics.warnings.push_back(msg.str());
    }
    return out;
}

EstimateRun estimate_full(const PanelObservations& panel, const EstimateConfig& cfg) {
    if (cfg.tail_freeze_fraction < 0.0 || cfg.tail_freeze_fraction >= 1.0) {
        throw InvalidInput("estimate: tail_freeze_fraction must lie in [0, 1)");
    }
    EstimateRun run;
    run.candidates = run_all_locations(panel, cfg.step1, derive_seed(cfg.seed, {1}), cfg.jobs);

    if (cfg.tail_freeze_fraction > 0.0) {
        // No break may fall in the trailing fraction of the sample, so every
        // mean level keeps a minimum number of observations behind it.
        int cutoff = panel.T - static_cast<int>(std::ceil(cfg.tail_freeze_fraction * panel.T));
        for (auto& set : run.candidates.sets) {
            std::erase_if(set, [&](int t) { return t > cutoff; });
        }
        run.candidates.total_candidates = 0;
        for (const auto& set : run.candidates.sets) {
            run.candidates.total_candidates += static_cast<int>(set.size());
        }
    }

    JointDesign jd = build_joint_design(panel, run.candidates);
    run.result = fit_joint(jd, cfg, derive_seed(cfg.seed, {2}));
    run.result.diagnostics.total_candidates = run.candidates.total_candidates;
    for (const auto& w : run.candidates.warnings) run.result.diagnostics.warnings.push_back(w);
    return run;
}

EstimationResult estimate(const PanelObservations& panel, const EstimateConfig& cfg) {
    return estimate_full(panel, cfg).result;
}

}  // namespace spatlasso
