#include "cwseed/levenberg_marquardt.hpp"

#include "cwseed/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

namespace cwseed {
namespace {

struct Trial {
    Eigen::VectorXd residual;
    bool ok = false;
};

Trial evaluate(const ResidualFn& fn, const Eigen::VectorXd& x) {
    try {
        Trial t{fn(x), true};
        t.ok = t.residual.allFinite();
        return t;
    } catch (const Error&) {
        return {};
    }
}

}  // namespace

int resolve_thread_count(int requested) {
    int count = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
    if (const char* cap = std::getenv("CW_SEED_THREADS")) {
        const int limit = std::atoi(cap);
        if (limit > 0) count = std::min(count, limit);
    }
    return std::max(count, 1);
}

double finite_difference_step(double x, const LmSettings& settings) {
    return std::max(settings.fd_relative_step * std::abs(x), settings.fd_min_step);
}

Eigen::MatrixXd assemble_columns(
    Eigen::Index cols, const std::function<std::optional<Eigen::VectorXd>(Eigen::Index)>& column,
    int threads) {
    std::vector<std::optional<Eigen::VectorXd>> columns(static_cast<std::size_t>(cols));
    auto work = [&](Eigen::Index begin, Eigen::Index end) {
        for (Eigen::Index j = begin; j < end; ++j) columns[static_cast<std::size_t>(j)] = column(j);
    };

    threads = std::min<int>(resolve_thread_count(threads), static_cast<int>(std::max<Eigen::Index>(cols, 1)));
    if (threads <= 1) {
        work(0, cols);
    } else {
        std::vector<std::thread> pool;
        const Eigen::Index chunk = (cols + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const Eigen::Index begin = t * chunk;
            const Eigen::Index end = std::min(cols, begin + chunk);
            if (begin < end) pool.emplace_back(work, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    Eigen::Index rows = -1;
    for (const auto& c : columns)
        if (c) rows = c->size();
    if (rows < 0) throw Error("every Jacobian column failed to evaluate");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        if (const auto& c = columns[static_cast<std::size_t>(j)]) out.col(j) = *c;
    return out;
}

Eigen::MatrixXd finite_difference_jacobian(const ResidualFn& fn, const Eigen::VectorXd& x,
                                           const LmSettings& settings) {
    return assemble_columns(
        x.size(),
        [&](Eigen::Index j) -> std::optional<Eigen::VectorXd> {
            Eigen::VectorXd probe = x;
            const double h = finite_difference_step(x[j], settings);
            probe[j] = x[j] + h;
            const Trial plus = evaluate(fn, probe);
            probe[j] = x[j] - h;
            const Trial minus = evaluate(fn, probe);
            if (!plus.ok || !minus.ok) return std::nullopt;
            return Eigen::VectorXd((plus.residual - minus.residual) / (2.0 * h));
        },
        settings.threads);
}

LmResult levenberg_marquardt(const ResidualFn& fn, const Eigen::VectorXd& x0,
                             const LmSettings& settings, const JacobianFn& jacobian) {
    LmResult result;
    result.x = x0;
    Trial current = evaluate(fn, x0);
    ++result.evaluations;
    if (!current.ok) throw Error("residual function failed at the initial point");
    result.residual = current.residual;
    result.residual_norm = current.residual.norm();
    result.trace.push_back(result.residual_norm);
    if (result.residual_norm <= settings.tol) {
        result.converged = true;
        return result;
    }

    double cost = 0.5 * current.residual.squaredNorm();
    double mu = -1.0;
    double nu = 2.0;
    bool need_jacobian = true;
    Eigen::MatrixXd jac;
    Eigen::VectorXd grad;
    const Eigen::Index n = x0.size();

    while (result.iterations < settings.max_iterations) {
        if (need_jacobian) {
            jac = jacobian ? jacobian(result.x, result.residual)
                           : finite_difference_jacobian(fn, result.x, settings);
            result.evaluations += 2 * static_cast<int>(n);
            ++result.iterations;
            grad = jac.transpose() * result.residual;
            need_jacobian = false;
            if (mu < 0.0) {
                const double diag = jac.colwise().squaredNorm().maxCoeff();
                mu = settings.initial_damping * std::max(diag, std::numeric_limits<double>::min());
            }
            if (grad.lpNorm<Eigen::Infinity>() <= 1e-300) break;
        }

        // (J^T J + mu I) step = -J^T r, solved in whichever dimension is smaller.
        Eigen::VectorXd step;
        const Eigen::Index m = jac.rows();
        if (m < n) {
            Eigen::MatrixXd gram = jac * jac.transpose();
            gram.diagonal().array() += mu;
            step = -jac.transpose() * gram.ldlt().solve(result.residual);
        } else {
            Eigen::MatrixXd normal = jac.transpose() * jac;
            normal.diagonal().array() += mu;
            step = normal.ldlt().solve(-grad);
        }

        if (step.norm() <= 1e-15 * (result.x.norm() + 1e-15)) break;

        const Eigen::VectorXd trial_x = result.x + step;
        const Trial trial = evaluate(fn, trial_x);
        ++result.evaluations;
        const double predicted = 0.5 * step.dot(mu * step - grad);
        const double trial_cost = trial.ok ? 0.5 * trial.residual.squaredNorm()
                                           : std::numeric_limits<double>::infinity();
        const double rho = predicted > 0.0 ? (cost - trial_cost) / predicted : -1.0;

        if (trial.ok && trial_cost < cost && rho > 0.0) {
            result.x = trial_x;
            result.residual = trial.residual;
            result.residual_norm = trial.residual.norm();
            result.trace.push_back(result.residual_norm);
            cost = trial_cost;
            const double r3 = 2.0 * rho - 1.0;
            mu *= std::max(1.0 / 3.0, 1.0 - r3 * r3 * r3);
            nu = 2.0;
            need_jacobian = true;
            if (result.residual_norm <= settings.tol) {
                result.converged = true;
                break;
            }
        } else {
            mu *= nu;
            nu *= 2.0;
            if (!std::isfinite(mu) || mu > 1e300) break;
        }
    }
    return result;
}

}  // namespace cwseed
