#include "spatlasso/step1.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "spatlasso/parallel.hpp"
#include "spatlasso/rng.hpp"

namespace spatlasso {

Vector StepDesign::apply(const Vector& beta) const {
    if (static_cast<int>(beta.size()) != T) throw InvalidInput("StepDesign: size mismatch");
    Vector out(T);
    double acc = 0.0;
    for (int t = 0; t < T; ++t) {
        acc += beta[t];
        out[t] = acc;
    }
    return out;
}

Vector StepDesign::apply_transpose(const Vector& r) const {
    if (static_cast<int>(r.size()) != T) throw InvalidInput("StepDesign: size mismatch");
    Vector out(T);
    double acc = 0.0;
    for (int t = T - 1; t >= 0; --t) {
        acc += r[t];
        out[t] = acc;
    }
    return out;
}

Matrix StepDesign::gram() const {
    Matrix g(T, T);
    for (int j = 0; j < T; ++j) {
        for (int k = 0; k < T; ++k) g(j, k) = static_cast<double>(T - std::max(j, k));
    }
    return g;
}

DesignMatrix StepDesign::to_design_matrix() const {
    DesignMatrix d(T, T);
    for (int j = 0; j < T; ++j) d.set_step_column(j, j, T - 1);
    return d;
}

Matrix StepDesign::to_dense() const {
    Matrix k = Matrix::Zero(T, T);
    for (int t = 0; t < T; ++t) {
        for (int j = 0; j <= t; ++j) k(t, j) = 1.0;
    }
    return k;
}

StepDesign build_step_design(int T) {
    if (T < 2) throw InvalidInput("build_step_design: T must be at least 2");
    return StepDesign{T};
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector adaptive_weights(const Vector& pre_estimate, double gamma) {
    Vector w(pre_estimate.size());
    for (int j = 0; j < static_cast<int>(pre_estimate.size()); ++j) {
        double a = std::abs(pre_estimate[j]);
        w[j] = a == 0.0 ? kInf : 1.0 / std::pow(a, gamma);
    }
    return w;
}

std::vector<int> nonzero_change_times(const Vector& beta) {
    std::vector<int> out;
    for (int j = 1; j < static_cast<int>(beta.size()); ++j) {
        if (beta[j] != 0.0) out.push_back(j + 1);  // column j is a change effective at t = j+1
    }
    return out;
}

}  // namespace

LocationDetection detect_location(const Vector& series, const Step1Config& cfg, std::uint64_t seed) {
    const int T = static_cast<int>(series.size());
    if (T < 8) throw InvalidInput("detect_location: series must have at least 8 points");
    if (!series.allFinite()) throw InvalidInput("detect_location: non-finite observation");
    if (cfg.gamma <= 0.0) throw InvalidInput("detect_location: gamma must be positive");

    StepDesign k = build_step_design(T);
    DesignMatrix design = k.to_design_matrix();

    // Ridge pre-estimation: the step model has exactly as many coefficients as
    // observations, so plain least squares would interpolate.
    double ridge_lambda = cfg.ridge_lambda > 0.0 ? cfg.ridge_lambda : default_ridge_lambda(design);
    Matrix gram = k.gram();
    gram.diagonal().array() += ridge_lambda;
    Eigen::LDLT<Matrix> ldlt(gram);
    Vector pre = ldlt.solve(k.apply_transpose(series));
    if (ldlt.info() != Eigen::Success || !pre.allFinite()) {
        throw NumericError("detect_location: ridge pre-estimation failed");
    }

    Vector weights = adaptive_weights(pre, cfg.gamma);
    LocationDetection out;
    out.ridge_estimate = pre;
    if (weights.minCoeff() == kInf) {
        // Identically-zero series: every coefficient is pinned at zero.
        out.coefficients = Vector::Zero(T);
        return out;
    }

    PenalizedProblem problem(std::move(design), series, std::move(weights),
                             Vector::Constant(T, -kInf), Vector::Constant(T, kInf), false);
    if (cfg.lambda_override) {
        out.lambda = *cfg.lambda_override;
        out.lambda_min = out.lambda;
        out.lambda_1se = out.lambda;
    } else {
        // Fold fits only rank lambdas; run them at a relaxed tolerance.
        CdConfig cv_cd = cfg.cd;
        cv_cd.tol = std::max(cv_cd.tol, 1e-4);
        CvResult cv = cross_validate(problem, cfg.cv_folds, seed, cv_cd, std::nullopt,
                                     cfg.grid_size, cfg.grid_min_ratio);
        out.lambda = cv.lambda_1se;
        out.lambda_min = cv.lambda_min;
        out.lambda_1se = cv.lambda_1se;
    }

    LassoFit fit = lasso_cd(problem, out.lambda, std::nullopt, cfg.cd);
    out.coefficients = fit.coefficients;
    out.candidates = nonzero_change_times(fit.coefficients);
    if (cfg.relax && out.lambda_min < out.lambda) {
        LassoFit relaxed = lasso_cd(problem, out.lambda_min, fit.coefficients, cfg.cd);
        std::vector<int> extra = nonzero_change_times(relaxed.coefficients);
        std::vector<int> merged;
        std::set_union(out.candidates.begin(), out.candidates.end(), extra.begin(), extra.end(),
                       std::back_inserter(merged));
        out.candidates = std::move(merged);
    }
    return out;
}

std::vector<int> detect_candidates(const Vector& series, const Step1Config& cfg, std::uint64_t seed) {
    return detect_location(series, cfg, seed).candidates;
}

CandidateSets run_all_locations(const PanelObservations& panel, const Step1Config& cfg,
                                std::uint64_t seed, int jobs) {
    CandidateSets out;
    out.T = panel.T;
    out.sets.assign(static_cast<std::size_t>(panel.n), {});
    out.location_errors.assign(static_cast<std::size_t>(panel.n), "");

    // Every location shares the same CV fold seed; detection then commutes
    // with column permutations.
    parallel_for(panel.n, jobs, [&](int i) {
        try {
            Vector series = panel.values.col(i);
            out.sets[static_cast<std::size_t>(i)] = detect_candidates(series, cfg, seed);
        } catch (const std::exception& e) {
            out.location_errors[static_cast<std::size_t>(i)] = e.what();
        }
    });

    bool any_ok = false;
    for (int i = 0; i < panel.n; ++i) {
        if (out.location_errors[static_cast<std::size_t>(i)].empty()) {
            any_ok = true;
            out.total_candidates += static_cast<int>(out.sets[static_cast<std::size_t>(i)].size());
        }
    }
    if (!any_ok) {
        throw NumericError("run_all_locations: detection failed for every location: " +
                           out.location_errors.front());
    }
    if (out.total_candidates >= panel.T) {
        std::ostringstream w;
        w << "candidate count " << out.total_candidates << " is not smaller than T = " << panel.T;
        out.warnings.push_back(w.str());
    }
    if (out.total_candidates >= panel.n * panel.T) {
        std::ostringstream w;
        w << "candidate count " << out.total_candidates << " is not smaller than nT = "
          << panel.n * panel.T;
        out.warnings.push_back(w.str());
    }
    return out;
}

std::string candidates_json(const CandidateSets& sets, const std::vector<std::string>& labels) {
    if (labels.size() != sets.sets.size()) throw InvalidInput("candidates_json: label count mismatch");
    nlohmann::ordered_json doc;
    for (std::size_t i = 0; i < sets.sets.size(); ++i) {
        doc[labels[i]] = sets.sets[i];
    }
    return doc.dump(2) + "\n";
}

}  // namespace spatlasso
