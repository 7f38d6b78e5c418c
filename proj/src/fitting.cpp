#include "dfs/fitting.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "dfs/constants.hpp"

namespace dfs {

int fit_param_count(FitModel model) {
    return model == FitModel::Cosine ? 4 : 3;
}

std::vector<std::string> fit_param_names(FitModel model) {
    if (model == FitModel::Cosine) return {"amplitude", "period_s", "phase_rad", "offset"};
    return {"amplitude", "time_constant_s", "offset"};
}

double fit_model_eval(FitModel model, const std::vector<double>& params, double t) {
    switch (model) {
        case FitModel::Exponential:
            return params[0] * std::exp(-t / params[1]) + params[2];
        case FitModel::GaussianDecay: {
            const double u = t / params[1];
            return params[0] * std::exp(-u * u) + params[2];
        }
        case FitModel::Cosine:
            return params[0] * std::cos(2.0 * pi * t / params[1] + params[2]) + params[3];
    }
    throw std::logic_error("fit_model_eval: unknown model");
}

namespace {

void eval_jacobian_row(FitModel model, const std::vector<double>& p, double t,
                       double* row) {
    switch (model) {
        case FitModel::Exponential: {
            const double e = std::exp(-t / p[1]);
            row[0] = e;
            row[1] = p[0] * e * t / (p[1] * p[1]);
            row[2] = 1.0;
            return;
        }
        case FitModel::GaussianDecay: {
            const double u = t / p[1];
            const double e = std::exp(-u * u);
            row[0] = e;
            row[1] = p[0] * e * 2.0 * t * t / (p[1] * p[1] * p[1]);
            row[2] = 1.0;
            return;
        }
        case FitModel::Cosine: {
            const double arg = 2.0 * pi * t / p[1] + p[2];
            row[0] = std::cos(arg);
            row[1] = p[0] * std::sin(arg) * 2.0 * pi * t / (p[1] * p[1]);
            row[2] = -p[0] * std::sin(arg);
            row[3] = 1.0;
            return;
        }
    }
}

double chi2_of(FitModel model, const std::vector<double>& p,
               const std::vector<double>& t, const std::vector<double>& y,
               const std::vector<double>& w) {
    double chi2 = 0.0;
    for (size_t i = 0; i < t.size(); ++i) {
        const double r = y[i] - fit_model_eval(model, p, t[i]);
        if (!std::isfinite(r)) return std::numeric_limits<double>::infinity();
        chi2 += w[i] * r * r;
    }
    return chi2;
}

}  // namespace

namespace {
FitResult fit_model_single(const std::vector<double>& t, const std::vector<double>& y,
                           const std::vector<double>& sigma_y, FitModel model,
                           const std::vector<double>& initial,
                           const FitOptions& options);
}

// Multi-start over rescalings of the time/period parameter guards against the
// local minima of the decay and oscillation models; the lowest-chi2 start wins.
FitResult fit_model(const std::vector<double>& t, const std::vector<double>& y,
                    const std::vector<double>& sigma_y, FitModel model,
                    const std::vector<double>& initial, const FitOptions& options) {
    if (initial.size() != static_cast<size_t>(fit_param_count(model)))
        throw std::invalid_argument("fit_model: wrong number of initial parameters");
    if (initial[1] == 0.0)
        throw std::invalid_argument("fit_model: time/period guess must be nonzero");
    const std::vector<bool>& fixed = options.fixed;
    const bool time_free = fixed.empty() || (fixed.size() > 1 && !fixed[1]);
    FitResult best;
    bool have_best = false;
    std::string error;
    for (double scale : {1.0, 0.5, 0.75, 1.5, 2.0, 3.0}) {
        std::vector<double> start = initial;
        start[1] *= scale;
        try {
            FitResult candidate = fit_model_single(t, y, sigma_y, model, start, options);
            const bool better =
                !have_best ||
                (candidate.converged && !best.converged) ||
                (candidate.converged == best.converged &&
                 candidate.chi2_reduced < best.chi2_reduced * (1.0 - 1e-12));
            if (better) {
                best = candidate;
                have_best = true;
            }
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::runtime_error& err) {
            error = err.what();
        }
        if (!time_free) break;  // nothing to rescale
    }
    if (!have_best) throw std::runtime_error(error);
    return best;
}

namespace {
FitResult fit_model_single(const std::vector<double>& t, const std::vector<double>& y,
                           const std::vector<double>& sigma_y, FitModel model,
                           const std::vector<double>& initial,
                           const FitOptions& options) {
    const size_t n = t.size();
    const int n_params = fit_param_count(model);
    if (y.size() != n || sigma_y.size() != n)
        throw std::invalid_argument("fit_model: t, y and sigma_y lengths differ");
    if (initial.size() != static_cast<size_t>(n_params))
        throw std::invalid_argument("fit_model: wrong number of initial parameters");
    std::vector<bool> fixed = options.fixed;
    if (fixed.empty()) fixed.assign(static_cast<size_t>(n_params), false);
    if (fixed.size() != static_cast<size_t>(n_params))
        throw std::invalid_argument("fit_model: fixed mask length mismatch");
    int n_free = 0;
    for (bool f : fixed)
        if (!f) ++n_free;
    if (n_free == 0) throw std::invalid_argument("fit_model: no free parameters");
    if (static_cast<int>(n) < n_free)
        throw std::invalid_argument("fit_model: fewer points than free parameters");
    std::vector<double> w(n);
    for (size_t i = 0; i < n; ++i) {
        if (sigma_y[i] <= 0) throw std::invalid_argument("fit_model: sigma_y must be > 0");
        w[i] = 1.0 / (sigma_y[i] * sigma_y[i]);
    }

    std::vector<int> free_index;
    for (int j = 0; j < n_params; ++j)
        if (!fixed[static_cast<size_t>(j)]) free_index.push_back(j);

    std::vector<double> p = initial;
    double chi2 = chi2_of(model, p, t, y, w);
    double lambda = 1e-3;
    bool converged = false;
    int iter = 0;

    Eigen::MatrixXd jtj(n_free, n_free);
    Eigen::VectorXd jtr(n_free);
    std::vector<double> row(static_cast<size_t>(n_params));

    for (; iter < options.max_iterations; ++iter) {
        jtj.setZero();
        jtr.setZero();
        for (size_t i = 0; i < n; ++i) {
            eval_jacobian_row(model, p, t[i], row.data());
            const double r = y[i] - fit_model_eval(model, p, t[i]);
            for (int a = 0; a < n_free; ++a) {
                const double ja = row[static_cast<size_t>(free_index[a])];
                jtr(a) += w[i] * ja * r;
                for (int b = a; b < n_free; ++b)
                    jtj(a, b) += w[i] * ja * row[static_cast<size_t>(free_index[b])];
            }
        }
        for (int a = 0; a < n_free; ++a)
            for (int b = 0; b < a; ++b) jtj(a, b) = jtj(b, a);

        // Equilibrate so wildly different parameter scales (or near-exact
        // points with huge weights) do not wreck the conditioning.
        Eigen::VectorXd scale_d(n_free);
        for (int a = 0; a < n_free; ++a)
            scale_d(a) = jtj(a, a) > 0.0 ? 1.0 / std::sqrt(jtj(a, a)) : 1.0;
        const Eigen::MatrixXd jtj_eq =
            scale_d.asDiagonal() * jtj * scale_d.asDiagonal();
        const Eigen::VectorXd jtr_eq = scale_d.asDiagonal() * jtr;

        // Damped step; retry with stronger damping until chi2 improves.
        bool stepped = false;
        for (int attempt = 0; attempt < 60; ++attempt) {
            Eigen::MatrixXd damped = jtj_eq;
            for (int a = 0; a < n_free; ++a) damped(a, a) += lambda;
            Eigen::LDLT<Eigen::MatrixXd> solver(damped);
            if (solver.info() != Eigen::Success) {
                lambda *= 10.0;
                continue;
            }
            Eigen::VectorXd delta = scale_d.asDiagonal() * solver.solve(jtr_eq);
            if (!delta.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            std::vector<double> trial = p;
            for (int a = 0; a < n_free; ++a)
                trial[static_cast<size_t>(free_index[a])] += delta(a);
            const double trial_chi2 = chi2_of(model, trial, t, y, w);
            if (trial_chi2 <= chi2) {
                double rel_step = 0.0;
                for (int a = 0; a < n_free; ++a) {
                    const double scale =
                        std::abs(p[static_cast<size_t>(free_index[a])]) + 1e-30;
                    rel_step = std::max(rel_step, std::abs(delta(a)) / scale);
                }
                p = trial;
                chi2 = trial_chi2;
                lambda = std::max(lambda * 0.1, 1e-14);
                stepped = true;
                if (rel_step < options.step_tolerance) converged = true;
                break;
            }
            lambda *= 10.0;
        }
        if (converged) break;
        if (!stepped) {
            // No downhill step found at any damping: stationary point.
            converged = true;
            break;
        }
    }

    // Information matrix at the solution.
    jtj.setZero();
    for (size_t i = 0; i < n; ++i) {
        eval_jacobian_row(model, p, t[i], row.data());
        for (int a = 0; a < n_free; ++a)
            for (int b = a; b < n_free; ++b)
                jtj(a, b) += w[i] * row[static_cast<size_t>(free_index[a])] *
                             row[static_cast<size_t>(free_index[b])];
    }
    for (int a = 0; a < n_free; ++a)
        for (int b = 0; b < a; ++b) jtj(a, b) = jtj(b, a);

    Eigen::VectorXd scale_d(n_free);
    for (int a = 0; a < n_free; ++a) {
        if (jtj(a, a) <= 0.0) throw std::runtime_error("fit_model: rank-deficient Jacobian");
        scale_d(a) = 1.0 / std::sqrt(jtj(a, a));
    }
    const Eigen::MatrixXd jtj_eq = scale_d.asDiagonal() * jtj * scale_d.asDiagonal();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj_eq);
    if (!lu.isInvertible())
        throw std::runtime_error("fit_model: rank-deficient Jacobian");
    const Eigen::MatrixXd cov_free =
        scale_d.asDiagonal() * lu.inverse() * scale_d.asDiagonal();

    FitResult result;
    result.params = p;
    result.iterations = iter;
    result.converged = converged;
    const int dof = static_cast<int>(n) - n_free;
    result.chi2_reduced = dof > 0 ? chi2 / dof : 0.0;
    const double scale = std::max(result.chi2_reduced, 1.0);
    result.covariance = Eigen::MatrixXd::Zero(n_params, n_params);
    result.sigmas.assign(static_cast<size_t>(n_params), 0.0);
    for (int a = 0; a < n_free; ++a) {
        for (int b = 0; b < n_free; ++b)
            result.covariance(free_index[a], free_index[b]) = cov_free(a, b) * scale;
        result.sigmas[static_cast<size_t>(free_index[a])] =
            std::sqrt(cov_free(a, a) * scale);
    }
    return result;
}
}  // namespace

}  // namespace dfs
