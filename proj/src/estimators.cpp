#include "levyma/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "levyma/common.hpp"
#include "levyma/power_variation.hpp"

namespace levyma::est {

namespace {

// Interior margins of the feasible triangle {alpha > 0, 1/beta in (1/2,1),
// alpha + 1/beta in (1/2,1)}; all constraints are strict, so boundary-violating
// candidates are pulled a hair inside.
constexpr double kEdge = 1e-9;
constexpr double kPsiCap = 1.0 - 1e-6;  // keeps a nonempty alpha interval

struct Point {
    double a = 0.0;    // alpha
    double psi = 0.0;  // 1/beta
};

void project(Point& x) {
    x.psi = std::clamp(x.psi, 0.5 + kEdge, kPsiCap);
    x.a = std::clamp(x.a, kEdge, 1.0 - x.psi - kEdge);
}

std::vector<double> trapezoid_weights(const std::vector<double>& p) {
    const std::size_t m = p.size();
    std::vector<double> w(m);
    w.front() = 0.5 * (p[1] - p[0]);
    for (std::size_t i = 1; i + 1 < m; ++i) w[i] = 0.5 * (p[i + 1] - p[i - 1]);
    w.back() = 0.5 * (p[m - 1] - p[m - 2]);
    return w;
}

class Objective {
public:
    Objective(const std::vector<double>& p_grid, const std::vector<double>& observed)
        : p_(p_grid), obs_(observed), w_(trapezoid_weights(p_grid)) {}

    double operator()(const Point& x) const {
        KahanSum s;
        const double beta = 1.0 / x.psi;
        for (std::size_t i = 0; i < p_.size(); ++i) {
            const double d = obs_[i] - theoretical_scale_function(x.a, beta, p_[i]);
            s.add(w_[i] * d * d);
        }
        return s.value();
    }

private:
    const std::vector<double>& p_;
    const std::vector<double>& obs_;
    std::vector<double> w_;
};

struct Vertex {
    Point x;
    double f = 0.0;
};

// Nelder-Mead on the feasible triangle with the standard coefficients
// (reflect 1, expand 2, contract 1/2, shrink 1/2). Every trial point is
// projected back into the feasible region before evaluation. The best vertex
// is never discarded, so the incumbent objective is non-increasing; each
// iteration appends it to trace.
Vertex nelder_mead(const Objective& f, Point seed, double h, int max_iter,
                   std::vector<double>& trace) {
    auto make_vertex = [&](Point p) {
        project(p);
        return Vertex{p, f(p)};
    };
    // Axis-aligned initial simplex; flip a step that projection squashed.
    std::vector<Vertex> v;
    v.push_back(make_vertex(seed));
    for (int dim = 0; dim < 2; ++dim) {
        Point p = seed;
        (dim == 0 ? p.a : p.psi) += h;
        project(p);
        const double moved = (dim == 0 ? p.a - v[0].x.a : p.psi - v[0].x.psi);
        if (std::fabs(moved) < 0.25 * h) {
            p = seed;
            (dim == 0 ? p.a : p.psi) -= h;
        }
        v.push_back(make_vertex(p));
    }

    auto by_f = [](const Vertex& l, const Vertex& r) { return l.f < r.f; };
    std::sort(v.begin(), v.end(), by_f);
    auto shrink = [&] {
        for (int i = 1; i < 3; ++i) {
            v[i].x.a = v[0].x.a + 0.5 * (v[i].x.a - v[0].x.a);
            v[i].x.psi = v[0].x.psi + 0.5 * (v[i].x.psi - v[0].x.psi);
            v[i] = make_vertex(v[i].x);
        }
    };

    double incumbent = v[0].f;
    for (int it = 0; it < max_iter; ++it) {
        const Point c{0.5 * (v[0].x.a + v[1].x.a), 0.5 * (v[0].x.psi + v[1].x.psi)};
        auto along = [&](double t) {
            return make_vertex(Point{c.a + t * (c.a - v[2].x.a), c.psi + t * (c.psi - v[2].x.psi)});
        };

        const Vertex refl = along(1.0);
        if (refl.f < v[0].f) {
            const Vertex expd = along(2.0);
            v[2] = expd.f < refl.f ? expd : refl;
        } else if (refl.f < v[1].f) {
            v[2] = refl;
        } else if (refl.f < v[2].f) {
            const Vertex outside = along(0.5);
            if (outside.f <= refl.f)
                v[2] = outside;
            else
                shrink();
        } else {
            const Vertex inside = along(-0.5);
            if (inside.f < v[2].f)
                v[2] = inside;
            else
                shrink();
        }
        std::sort(v.begin(), v.end(), by_f);
        if (v[0].f > incumbent)
            throw std::logic_error("nelder_mead: best vertex worsened");
        incumbent = v[0].f;
        trace.push_back(incumbent);

        const double diam = std::max(std::fabs(v[2].x.a - v[0].x.a) + std::fabs(v[2].x.psi - v[0].x.psi),
                                     std::fabs(v[1].x.a - v[0].x.a) + std::fabs(v[1].x.psi - v[0].x.psi));
        if (diam < 1e-13 && v[2].f - v[0].f < 1e-30) break;
    }
    return v[0];
}

} // namespace

double theoretical_scale_function(double alpha, double beta, double p) {
    if (!(alpha > 0.0))
        throw std::domain_error("theoretical_scale_function: alpha must be positive");
    if (!(beta > 1.0 && beta < 2.0))
        throw std::domain_error("theoretical_scale_function: beta must lie in (1,2)");
    if (!(p > 1.0 && p < 2.0))
        throw std::domain_error("theoretical_scale_function: p must lie in (1,2)");
    const double H = alpha + 1.0 / beta;
    if (!(H > 0.5 && H < 1.0))
        throw std::domain_error("theoretical_scale_function: alpha + 1/beta must lie in (1/2,1)");

    if (p > beta) return alpha < 1.0 - 1.0 / p ? alpha * p : p - 1.0;
    if (p < beta) return alpha < 1.0 - 1.0 / beta ? p * H - 1.0 : p - 1.0;
    // p == beta: the two adjacent branches meet at alpha*p, so the boundary
    // value follows by continuity.
    return alpha > 1.0 - 1.0 / beta ? p - 1.0 : alpha * p;
}

std::vector<double> default_p_grid() {
    std::vector<double> p(33);
    for (int i = 0; i < 33; ++i) p[i] = 1.05 + 0.9 * i / 32.0;
    return p;
}

EstimatorResult fit_scale_curve(const std::vector<double>& p_grid,
                                const std::vector<double>& observed_scale,
                                const FitConfig& cfg) {
    require(p_grid.size() >= 8, "fit_scale_curve: need at least 8 powers");
    require(p_grid.size() == observed_scale.size(),
            "fit_scale_curve: p_grid and observed_scale lengths differ");
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
        require(p_grid[i] > 1.0 && p_grid[i] < 2.0, "fit_scale_curve: powers must lie in (1,2)");
        if (i > 0) require(p_grid[i] > p_grid[i - 1], "fit_scale_curve: powers must increase");
    }
    require(cfg.grid_points >= 2 && cfg.max_iterations >= 1 && cfg.restarts >= 1,
            "fit_scale_curve: invalid optimizer config");
    for (double s : observed_scale)
        if (!std::isfinite(s))
            throw std::runtime_error("fit_scale_curve: observed scale statistics are degenerate");

    const Objective f(p_grid, observed_scale);

    // Coarse pass over the feasible triangle alpha in (0,1/2), 1/beta in
    // (1/2,1), alpha + 1/beta < 1. The golden-ratio offset keeps grid nodes
    // off the branch boundaries of the theoretical curve.
    const int N = cfg.grid_points;
    const double step = 0.5 / N;
    constexpr double kOffset = 0.6180339887498949;
    std::vector<Vertex> cells;
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            Point x{(i + kOffset) * step, 0.5 + (j + kOffset) * step};
            if (x.a + x.psi >= 1.0 - kEdge) continue;
            cells.push_back(Vertex{x, f(x)});
        }
    }
    if (cells.empty()) throw std::runtime_error("fit_scale_curve: empty feasible grid");

    const int seeds = std::min<int>(cfg.restarts, static_cast<int>(cells.size()));
    std::partial_sort(cells.begin(), cells.begin() + seeds, cells.end(),
                      [](const Vertex& l, const Vertex& r) { return l.f < r.f; });

    EstimatorResult result;
    Vertex best = cells.front();
    result.objective_trace.push_back(best.f);
    auto absorb = [&](const Vertex& run, const std::vector<double>& run_trace) {
        if (run.f < best.f) best = run;
        for (double v : run_trace)
            result.objective_trace.push_back(std::min(result.objective_trace.back(), v));
    };
    for (int s = 0; s < seeds; ++s) {
        std::vector<double> run_trace;
        const Vertex run = nelder_mead(f, cells[s].x, step, cfg.max_iterations, run_trace);
        absorb(run, run_trace);
    }
    // One tight restart from the incumbent guards against a prematurely
    // collapsed simplex.
    std::vector<double> polish_trace;
    const Vertex polish = nelder_mead(f, best.x, 1e-4, cfg.max_iterations, polish_trace);
    absorb(polish, polish_trace);

    result.alpha_hat = best.x.a;
    result.beta_hat = 1.0 / best.x.psi;
    result.H_hat = best.x.a + best.x.psi;
    result.objective_value = best.f;
    result.p_grid = p_grid;
    result.observed_scale = observed_scale;
    return result;
}

EstimatorResult scale_function_fit(const std::vector<double>& path,
                                   const std::vector<double>& p_grid, const FitConfig& cfg) {
    require(p_grid.size() >= 8, "scale_function_fit: need at least 8 powers");
    std::vector<double> observed(p_grid.size());
    try {
        for (std::size_t i = 0; i < p_grid.size(); ++i)
            observed[i] = pv::log_scale_statistic(path, p_grid[i]);
    } catch (const std::domain_error& e) {
        throw std::runtime_error(std::string("scale_function_fit: degenerate path (") + e.what() +
                                 ")");
    }
    return fit_scale_curve(p_grid, observed, cfg);
}

EstimatorResult scale_function_fit(const path::PathSample& sample,
                                   const std::vector<double>& p_grid, const FitConfig& cfg) {
    return scale_function_fit(sample.values, p_grid, cfg);
}

double estimate_H_ratio(const std::vector<double>& path, double p) {
    return pv::ratio_statistic(path, p).second;
}

double estimate_H_ratio(const path::PathSample& sample, double p) {
    return estimate_H_ratio(sample.values, p);
}

} // namespace levyma::est
