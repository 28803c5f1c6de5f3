// Copyright 2026 The qread Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qread/analysis_fit.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

namespace qread {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Fills residual (model - data) and Jacobian d(model)/d(param).
using ModelFn = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::MatrixXd&)>;

struct LmSolution {
    Eigen::VectorXd params;
    Eigen::VectorXd covariance_diag;
    double residual_norm = 0;
    double scaled_gradient = 0;
    bool converged = false;
    int iterations = 0;
    std::vector<double> history;
};

// Largest |J_j . r| / (|J_j| |y|): the residual's pull along any parameter
// direction, relative to the data.
double scaled_gradient(const Eigen::MatrixXd& jac, const Eigen::VectorXd& r, double data_norm) {
    if (r.norm() == 0) {
        return 0;
    }
    const double denom_scale = data_norm > 0 ? data_norm : r.norm();
    double worst = 0;
    for (Eigen::Index j = 0; j < jac.cols(); ++j) {
        const double cnorm = jac.col(j).norm();
        if (cnorm > 0) {
            worst = std::max(worst, std::abs(jac.col(j).dot(r)) / (cnorm * denom_scale));
        }
    }
    return worst;
}

// Levenberg-Marquardt with Marquardt diagonal scaling. Parameters are
// internally divided by the magnitude of the initial guess.
LmSolution levenberg_marquardt(const ModelFn& fn, const Eigen::VectorXd& initial, Eigen::Index n_obs,
                               double data_norm, const FitOptions& options) {
    const Eigen::Index np = initial.size();
    Eigen::VectorXd scale(np);
    for (Eigen::Index i = 0; i < np; ++i) {
        scale[i] = initial[i] != 0 ? std::abs(initial[i]) : 1.0;
    }

    Eigen::VectorXd theta = initial.cwiseQuotient(scale);
    Eigen::VectorXd r(n_obs);
    Eigen::MatrixXd jac(n_obs, np);
    auto evaluate = [&](const Eigen::VectorXd& th, Eigen::VectorXd& res, Eigen::MatrixXd& js) {
        fn(th.cwiseProduct(scale), res, js);
        js = js * scale.asDiagonal();
    };

    evaluate(theta, r, jac);
    double cost = r.squaredNorm();
    LmSolution sol;
    sol.history.push_back(std::sqrt(cost));

    double lambda = 1e-3;
    bool step_small = false;
    Eigen::VectorXd r_try(n_obs);
    Eigen::MatrixXd j_try(n_obs, np);
    int iter = 0;
    for (; iter < options.max_iterations && !step_small; ++iter) {
        if (cost == 0) {
            step_small = true;
            break;
        }
        const Eigen::MatrixXd normal = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * r;
        Eigen::VectorXd diag = normal.diagonal();
        const double floor = std::max(diag.maxCoeff(), 1.0) * 1e-12;
        diag = diag.cwiseMax(floor);

        bool accepted = false;
        while (!accepted && lambda < 1e16) {
            Eigen::MatrixXd damped = normal;
            damped.diagonal() += lambda * diag;
            const Eigen::VectorXd delta = damped.ldlt().solve(-grad);
            const Eigen::VectorXd candidate = theta + delta;
            evaluate(candidate, r_try, j_try);
            const double cost_try = r_try.squaredNorm();
            if (std::isfinite(cost_try) && cost_try < cost) {
                accepted = true;
                step_small = true;
                for (Eigen::Index i = 0; i < np; ++i) {
                    if (std::abs(delta[i]) > options.parameter_tolerance * (std::abs(candidate[i]) + 1e-12)) {
                        step_small = false;
                    }
                }
                theta = candidate;
                r = r_try;
                jac = j_try;
                cost = cost_try;
                sol.history.push_back(std::sqrt(cost));
                lambda = std::max(lambda / 3.0, 1e-12);
            } else {
                lambda *= 4.0;
            }
        }
        if (!accepted) {
            // No descent direction left at working precision.
            step_small = true;
        }
    }

    sol.params = theta.cwiseProduct(scale);
    sol.residual_norm = std::sqrt(cost);
    sol.scaled_gradient = scaled_gradient(jac, r, data_norm);
    sol.iterations = iter;

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(jac);
    qr.setThreshold(1e-10);
    const bool full_rank = qr.rank() == np;
    sol.converged = step_small && full_rank && sol.scaled_gradient <= options.gradient_tolerance;

    sol.covariance_diag = Eigen::VectorXd::Constant(np, kInf);
    if (full_rank) {
        const double dof = static_cast<double>(std::max<Eigen::Index>(n_obs - np, 1));
        const double sigma2 = cost / dof;
        const Eigen::MatrixXd inv = (jac.transpose() * jac).inverse();
        for (Eigen::Index i = 0; i < np; ++i) {
            sol.covariance_diag[i] = sigma2 * inv(i, i) * scale[i] * scale[i];
        }
    }
    return sol;
}

double span_norm(std::span<const double> v) {
    double s = 0;
    for (double x : v) {
        s += x * x;
    }
    return std::sqrt(s);
}

void require_same_size(std::span<const double> a, std::span<const double> b, const char* who) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(std::string(who) + ": x and y differ in length");
    }
}

}  // namespace

double FitResult::value(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            return values[i];
        }
    }
    throw std::out_of_range("FitResult: no parameter named " + std::string(name));
}

double FitResult::variance(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            return variances[i];
        }
    }
    throw std::out_of_range("FitResult: no parameter named " + std::string(name));
}

// ---------------------------------------------------------------------------
// Exponential decay

FitResult fit_exponential(std::span<const double> x, std::span<const double> y, bool with_amplitude,
                          const FitOptions& options) {
    require_same_size(x, y, "fit_exponential");
    if (x.size() < 3) {
        throw std::invalid_argument("fit_exponential: need at least 3 points");
    }
    for (double v : y) {
        if (!(v > 0 && v <= 1)) {
            throw std::invalid_argument("fit_exponential: y must lie in (0, 1]");
        }
    }
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) {
        throw std::invalid_argument("fit_exponential: degenerate data (all y equal)");
    }

    // Log-linear seed.
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double ly = std::log(y[i]);
        sx += x[i];
        sy += ly;
        sxx += x[i] * x[i];
        sxy += x[i] * ly;
    }
    double lifetime0 = 0;
    double amplitude0 = 1;
    if (with_amplitude) {
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        lifetime0 = -1.0 / slope;
        amplitude0 = std::exp((sy - slope * sx) / n);
    } else {
        lifetime0 = -sxx / sxy;
    }
    if (!(lifetime0 > 0) || !std::isfinite(lifetime0)) {
        const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
        lifetime0 = std::max(*hi - *lo, 1.0);
    }

    const auto m = static_cast<Eigen::Index>(x.size());
    ModelFn fn = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r, Eigen::MatrixXd& jac) {
        const double lifetime = p[0];
        const double amplitude = with_amplitude ? p[1] : 1.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            const double xi = x[static_cast<std::size_t>(i)];
            const double e = std::exp(-xi / lifetime);
            r[i] = amplitude * e - y[static_cast<std::size_t>(i)];
            jac(i, 0) = amplitude * e * xi / (lifetime * lifetime);
            if (with_amplitude) {
                jac(i, 1) = e;
            }
        }
    };
    Eigen::VectorXd initial(with_amplitude ? 2 : 1);
    initial[0] = lifetime0;
    if (with_amplitude) {
        initial[1] = amplitude0;
    }
    const LmSolution sol = levenberg_marquardt(fn, initial, m, span_norm(y), options);

    FitResult out;
    out.names = {"lifetime"};
    out.values = {sol.params[0]};
    out.variances = {sol.covariance_diag[0]};
    if (with_amplitude) {
        out.names.push_back("amplitude");
        out.values.push_back(sol.params[1]);
        out.variances.push_back(sol.covariance_diag[1]);
    }
    out.residual_norm = sol.residual_norm;
    out.scaled_gradient = sol.scaled_gradient;
    out.converged = sol.converged && sol.params[0] > 0;
    out.iterations = sol.iterations;
    out.residual_history = sol.history;
    return out;
}

double loss_per_cycle_from_lifetime(double lifetime) {
    if (!(lifetime > 0)) {
        throw std::invalid_argument("loss_per_cycle_from_lifetime: lifetime must be positive");
    }
    return -std::expm1(-1.0 / lifetime);
}

// ---------------------------------------------------------------------------
// Damped sinusoid

double damped_sinusoid(double t, double offset, double amplitude, double frequency, double decoherence_time) {
    return offset + 0.5 * amplitude * (1.0 - std::cos(kTwoPi * frequency * t) * std::exp(-t / decoherence_time));
}

namespace {

struct LinearSeed {
    double sse = kInf;
    double offset = 0;
    double amplitude = 0;
    double frequency = 0;
    double decay_rate = 0;
};

// Best (C, A) for fixed (f, decay rate): ordinary least squares on the
// shape g(t) = (1 - cos(2 pi f t) e^{-rate t}) / 2.
LinearSeed solve_linear(std::span<const double> t, std::span<const double> p, double frequency, double rate) {
    const auto n = static_cast<double>(t.size());
    double sg = 0, sgg = 0, sp = 0, sgp = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double g = 0.5 * (1.0 - std::cos(kTwoPi * frequency * t[i]) * std::exp(-rate * t[i]));
        sg += g;
        sgg += g * g;
        sp += p[i];
        sgp += g * p[i];
    }
    LinearSeed seed;
    const double det = n * sgg - sg * sg;
    if (!(std::abs(det) > 1e-14 * n * std::max(sgg, 1e-300))) {
        return seed;
    }
    seed.amplitude = (n * sgp - sg * sp) / det;
    seed.offset = (sp - seed.amplitude * sg) / n;
    seed.frequency = frequency;
    seed.decay_rate = rate;
    double sse = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double g = 0.5 * (1.0 - std::cos(kTwoPi * frequency * t[i]) * std::exp(-rate * t[i]));
        const double d = seed.offset + seed.amplitude * g - p[i];
        sse += d * d;
    }
    seed.sse = sse;
    return seed;
}

LinearSeed best_seed(std::span<const double> t, std::span<const double> p, double f_lo, double f_hi, int points,
                     double span) {
    LinearSeed best;
    const double rates[] = {3.0 / span, 1.0 / span, 1.0 / (3.0 * span)};
    for (int k = 0; k < points; ++k) {
        const double f = points == 1 ? f_lo : f_lo + (f_hi - f_lo) * k / (points - 1);
        if (f <= 0) {
            continue;
        }
        for (double rate : rates) {
            const LinearSeed s = solve_linear(t, p, f, rate);
            if (s.sse < best.sse) {
                best = s;
            }
        }
    }
    return best;
}

}  // namespace

FitResult fit_damped_sinusoid(std::span<const double> t, std::span<const double> p, const FitOptions& options) {
    require_same_size(t, p, "fit_damped_sinusoid");
    if (t.size() < 8) {
        throw std::invalid_argument("fit_damped_sinusoid: need at least 8 points");
    }
    const auto [tmin, tmax] = std::minmax_element(t.begin(), t.end());
    const double span = *tmax - *tmin;
    if (!(span > 0)) {
        throw std::invalid_argument("fit_damped_sinusoid: times must span a positive interval");
    }

    // Coarse grid, then a fine scan across the neighbouring grid cells.
    constexpr int kGridPoints = 20;
    const double f_lo = 0.2 / span;
    const double f_hi = 25.0 / span;
    const double step = (f_hi - f_lo) / (kGridPoints - 1);
    LinearSeed seed = best_seed(t, p, f_lo, f_hi, kGridPoints, span);
    if (std::isfinite(seed.sse)) {
        seed = best_seed(t, p, std::max(seed.frequency - step, 0.5 * f_lo), seed.frequency + step, 81, span);
    }

    FitResult out;
    out.names = {"offset", "amplitude", "frequency", "decoherence_time"};
    if (!std::isfinite(seed.sse)) {
        // Shape is collinear with the offset at every candidate.
        double mean = 0;
        for (double v : p) {
            mean += v;
        }
        mean /= static_cast<double>(p.size());
        out.values = {mean, 0.0, 0.0, kInf};
        out.variances = {kInf, kInf, kInf, kInf};
        out.converged = false;
        return out;
    }

    const auto m = static_cast<Eigen::Index>(t.size());
    ModelFn fn = [&](const Eigen::VectorXd& q, Eigen::VectorXd& r, Eigen::MatrixXd& jac) {
        const double c = q[0], a = q[1], f = q[2], rate = q[3];
        for (Eigen::Index i = 0; i < m; ++i) {
            const double ti = t[static_cast<std::size_t>(i)];
            const double phase = kTwoPi * f * ti;
            const double e = std::exp(-rate * ti);
            const double cs = std::cos(phase);
            r[i] = c + 0.5 * a * (1.0 - cs * e) - p[static_cast<std::size_t>(i)];
            jac(i, 0) = 1.0;
            jac(i, 1) = 0.5 * (1.0 - cs * e);
            jac(i, 2) = 0.5 * a * std::sin(phase) * kTwoPi * ti * e;
            jac(i, 3) = 0.5 * a * cs * e * ti;
        }
    };
    Eigen::VectorXd initial(4);
    initial << seed.offset, seed.amplitude, seed.frequency, seed.decay_rate;
    const LmSolution sol = levenberg_marquardt(fn, initial, m, span_norm(p), options);

    const double rate = sol.params[3];
    out.values = {sol.params[0], sol.params[1], sol.params[2], 1.0 / rate};
    // Delta method for tau = 1 / rate.
    out.variances = {sol.covariance_diag[0], sol.covariance_diag[1], sol.covariance_diag[2],
                     sol.covariance_diag[3] / (rate * rate * rate * rate)};
    out.residual_norm = sol.residual_norm;
    out.scaled_gradient = sol.scaled_gradient;
    out.converged = sol.converged && rate > 0 && sol.params[2] > 0;
    out.iterations = sol.iterations;
    out.residual_history = sol.history;
    return out;
}

// ---------------------------------------------------------------------------
// Counting statistics

Histogram build_histogram(std::span<const std::uint32_t> counts) {
    Histogram h;
    if (counts.empty()) {
        return h;
    }
    const std::uint32_t top = *std::max_element(counts.begin(), counts.end());
    h.frequencies.assign(static_cast<std::size_t>(top) + 1, 0);
    h.bin_edges.resize(h.frequencies.size());
    for (std::uint32_t k = 0; k <= top; ++k) {
        h.bin_edges[k] = k;
    }
    for (std::uint32_t c : counts) {
        ++h.frequencies[c];
    }
    h.total = counts.size();
    return h;
}

std::pair<double, double> binomial_interval(std::uint64_t successes, std::uint64_t trials, double confidence) {
    if (trials == 0 || successes > trials) {
        throw std::invalid_argument("binomial_interval: need 0 <= successes <= trials, trials > 0");
    }
    if (!(confidence > 0 && confidence < 1)) {
        throw std::invalid_argument("binomial_interval: confidence must lie in (0, 1)");
    }
    const boost::math::normal_distribution<double> standard;
    const double z = boost::math::quantile(standard, 0.5 + 0.5 * confidence);
    const auto n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2n = z * z / n;
    const double center = (phat + 0.5 * z2n) / (1.0 + z2n);
    const double half = z / (1.0 + z2n) * std::sqrt(phat * (1.0 - phat) / n + z2n / (4.0 * n));
    const double low = successes == 0 ? 0.0 : std::max(0.0, std::min(center - half, phat));
    const double high = successes == trials ? 1.0 : std::min(1.0, std::max(center + half, phat));
    return {low, high};
}

double binomial_standard_error(double p, std::uint64_t trials) {
    if (trials == 0) {
        throw std::invalid_argument("binomial_standard_error: trials must be positive");
    }
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

double chi_square_p_value(std::span<const std::uint64_t> observed, std::span<const double> probabilities,
                          double min_expected) {
    if (observed.size() != probabilities.size() || observed.empty()) {
        throw std::invalid_argument("chi_square_p_value: observed and probabilities must be parallel, non-empty");
    }
    double n = 0;
    for (auto o : observed) {
        n += static_cast<double>(o);
    }
    std::vector<double> obs(observed.begin(), observed.end());
    std::vector<double> expct;
    for (double pr : probabilities) {
        expct.push_back(pr * n);
    }
    // Pool from the tail into the previous category.
    while (expct.size() > 1 && expct.back() < min_expected) {
        expct[expct.size() - 2] += expct.back();
        obs[obs.size() - 2] += obs.back();
        expct.pop_back();
        obs.pop_back();
    }
    // Leading small categories pool forward.
    while (expct.size() > 1 && expct.front() < min_expected) {
        expct[1] += expct[0];
        obs[1] += obs[0];
        expct.erase(expct.begin());
        obs.erase(obs.begin());
    }
    if (expct.size() < 2) {
        throw std::invalid_argument("chi_square_p_value: fewer than two categories after pooling");
    }
    double stat = 0;
    for (std::size_t i = 0; i < expct.size(); ++i) {
        const double d = obs[i] - expct[i];
        stat += d * d / expct[i];
    }
    const boost::math::chi_squared_distribution<double> dist(static_cast<double>(expct.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace qread
