#include "spatlasso/model.hpp"

#include <Eigen/LU>
#include <cmath>
#include <limits>
#include <sstream>

namespace spatlasso {

namespace {

void check_weight_invariants(const Matrix& w, bool standardized) {
    if (w.rows() != w.cols() || w.rows() < 1) {
        throw InvalidInput("SpatialWeightMatrix: weights must be square and nonempty");
    }
    const int n = static_cast<int>(w.rows());
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j) {
            double v = w(i, j);
            if (!std::isfinite(v)) throw InvalidInput("SpatialWeightMatrix: non-finite entry");
            if (v < 0.0 || v > 1.0) {
                std::ostringstream msg;
                msg << "SpatialWeightMatrix: entry (" << i << "," << j << ") = " << v
                    << " outside [0,1]";
                throw InvalidInput(msg.str());
            }
            row_sum += v;
        }
        if (w(i, i) != 0.0) throw InvalidInput("SpatialWeightMatrix: nonzero diagonal entry");
        if (standardized && row_sum != 0.0 && std::abs(row_sum - 1.0) > 1e-12) {
            std::ostringstream msg;
            msg << "SpatialWeightMatrix: row " << i << " sums to " << row_sum
                << ", expected 0 or 1";
            throw InvalidInput(msg.str());
        }
    }
}

}  // namespace

SpatialWeightMatrix::SpatialWeightMatrix(Matrix w, bool standardized)
    : n(static_cast<int>(w.rows())), weights(std::move(w)), row_standardized(standardized) {
    check_weight_invariants(weights, row_standardized);
}

SpatialWeightMatrix SpatialWeightMatrix::scaled(double rho) const {
    if (rho < 0.0 || rho > 1.0) throw InvalidInput("scaled: rho must lie in [0,1]");
    return SpatialWeightMatrix(rho * weights, row_standardized && rho == 1.0);
}

SpatialWeightMatrix SpatialWeightMatrix::zero(int n) {
    return SpatialWeightMatrix(Matrix::Zero(n, n), false);
}

PanelObservations::PanelObservations(Matrix v)
    : T(static_cast<int>(v.rows())), n(static_cast<int>(v.cols())), values(std::move(v)) {
    if (T < 1 || n < 1) throw InvalidInput("PanelObservations: empty panel");
    if (!values.allFinite()) throw InvalidInput("PanelObservations: non-finite entry");
}

MeanLevelSchedule::MeanLevelSchedule(Matrix lv)
    : T(static_cast<int>(lv.rows())), n(static_cast<int>(lv.cols())), levels(std::move(lv)) {
    if (T < 1 || n < 1) throw InvalidInput("MeanLevelSchedule: empty levels");
    if (!levels.allFinite()) throw InvalidInput("MeanLevelSchedule: non-finite level");
    change_points.assign(static_cast<std::size_t>(n), {});
    for (int i = 0; i < n; ++i) {
        for (int tau = 1; tau <= T - 1; ++tau) {
            if (levels(tau - 1, i) != levels(tau, i)) {
                change_points[static_cast<std::size_t>(i)].push_back(tau);
            }
        }
    }
}

ModelSpec::ModelSpec(SpatialWeightMatrix w, MeanLevelSchedule s, double sd)
    : weights(std::move(w)), schedule(std::move(s)), noise_sd(sd) {
    if (weights.n != schedule.n) throw InvalidInput("ModelSpec: weight/schedule dimension mismatch");
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
        throw InvalidInput("ModelSpec: noise_sd must be a nonnegative real");
    }
    double rho = spectral_radius(weights);
    if (!(rho < 1.0)) {
        std::ostringstream msg;
        msg << "ModelSpec: spectral radius " << rho << " >= 1, process not well-defined";
        throw NumericError(msg.str());
    }
}

double spectral_radius(const SpatialWeightMatrix& w) { return spectral_radius(w.weights); }

namespace {

// Gelfand fallback: rho(W) = lim ||W^(2^k)||^(1/2^k). Renormalizing between
// squarings keeps the powers representable; fifty squarings drive the
// polynomial slack below machine precision. Handles the defective and
// weakly-coupled matrices the power iteration cannot certify within its cap.
double spectral_radius_by_squaring(const Matrix& w) {
    Matrix m = w;
    double log_rho = 0.0;
    double weight = 1.0;
    for (int k = 0; k < 50; ++k) {
        double norm = m.norm();
        if (norm == 0.0) return 0.0;
        log_rho += weight * std::log(norm);
        weight *= 0.5;
        m = (m / norm) * (m / norm);
    }
    log_rho += weight * std::log(std::max(m.norm(), 1e-300));
    return std::exp(log_rho);
}

}  // namespace

double spectral_radius(const Matrix& w) {
    if (w.rows() != w.cols() || w.rows() < 1) throw InvalidInput("spectral_radius: matrix not square");
    if (!w.allFinite()) throw InvalidInput("spectral_radius: non-finite entry");
    const int n = static_cast<int>(w.rows());

    // Power iteration on W + I: the Perron root shifts by exactly one, and the
    // shift removes the sign-flip cycles a bipartite support pattern causes.
    const double tol = 1e-10;
    const int max_iter = 10000;
    Vector v = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    double est = 0.0;
    double prev_diff = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        Vector av = w * v + v;
        double norm = av.norm();
        if (norm == 0.0) return 0.0;
        double new_est = norm;  // Rayleigh-style norm ratio; ||v|| == 1
        av /= norm;
        double diff = std::abs(new_est - est);
        v.swap(av);
        est = new_est;
        if (it > 0) {
            // The iteration converges linearly; extrapolate the remaining gap
            // from the ratio of successive differences before accepting.
            double ratio = prev_diff > 0.0 ? diff / prev_diff : 0.0;
            double projected = ratio < 0.999 ? diff * ratio / (1.0 - ratio) : diff;
            if (diff <= tol * std::max(1.0, est) && projected <= tol * std::max(1.0, est)) {
                return std::max(0.0, est - 1.0);
            }
        }
        prev_diff = diff;
    }
    return spectral_radius_by_squaring(w);
}

Matrix reduced_form(const SpatialWeightMatrix& w) {
    const int n = w.n;
    Matrix a = Matrix::Identity(n, n) - w.weights;
    Eigen::PartialPivLU<Matrix> lu(a);
    Matrix s = lu.solve(Matrix::Identity(n, n));
    double residual = (a * s - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    if (!s.allFinite() || residual >= 1e-10) {
        std::ostringstream msg;
        msg << "reduced_form: (I - W) is singular or near-singular (residual " << residual
            << ", spectral radius " << spectral_radius(w) << ")";
        throw NumericError(msg.str());
    }
    return s;
}

Matrix expected_panel(const ModelSpec& spec) {
    Matrix s = reduced_form(spec.weights);
    // Row t of the panel is (S a_t)', i.e. levels * S'.
    return spec.schedule.levels * s.transpose();
}

}  // namespace spatlasso
