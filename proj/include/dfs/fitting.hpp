#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

// Weighted nonlinear least squares via damped Gauss-Newton (Levenberg-style
// damping) for the decay and oscillation models used by the analysis layer.

namespace dfs {

enum class FitModel { Exponential, GaussianDecay, Cosine };

// Parameter layout per model:
//   Exponential:   y = A exp(-t/T) + c          params {A, T, c}
//   GaussianDecay: y = A exp(-(t/T)^2) + c      params {A, T, c}
//   Cosine:        y = A cos(2 pi t / T + p0) + c   params {A, T, p0, c}
int fit_param_count(FitModel model);
std::vector<std::string> fit_param_names(FitModel model);
double fit_model_eval(FitModel model, const std::vector<double>& params, double t);

struct FitOptions {
    int max_iterations = 200;
    double step_tolerance = 1e-10;
    // Entries set to true are pinned at their initial value. Empty = all free.
    std::vector<bool> fixed;
};

struct FitResult {
    std::vector<double> params;
    std::vector<double> sigmas;       // 1-sigma; zero for fixed parameters
    double chi2_reduced = 0.0;
    bool converged = false;
    Eigen::MatrixXd covariance;       // full size, zero rows/cols for fixed
    int iterations = 0;

    double param(int i) const { return params.at(static_cast<size_t>(i)); }
    double sigma(int i) const { return sigmas.at(static_cast<size_t>(i)); }
};

// Weighted fit of `model` to (t, y) with per-point standard errors sigma_y.
// Throws std::invalid_argument on malformed input and std::runtime_error when
// the information matrix of the free parameters is rank-deficient. A fit that
// runs out of iterations returns converged=false with the best point found.
FitResult fit_model(const std::vector<double>& t, const std::vector<double>& y,
                    const std::vector<double>& sigma_y, FitModel model,
                    const std::vector<double>& initial, const FitOptions& options = {});

}  // namespace dfs
