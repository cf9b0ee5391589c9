#pragma once

// Parameter sweeps, maxima and power-law fits near the critical field.

#include "qbattery/closed_forms.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace qbattery {

enum class SweepAxis { f, temperature };

inline const char* to_string(SweepAxis a) { return a == SweepAxis::f ? "f" : "T"; }

struct SweepPoint {
    double value = 0.0;
    std::uint64_t seed = 0;
    std::optional<CycleReport> report;
    std::string error;
};

struct SweepResult {
    SweepAxis axis = SweepAxis::f;
    ChainSpec spec;
    Partition part;
    PhasePolicy policy;
    std::uint64_t seed = 0;
    std::vector<SweepPoint> points;
};

inline void check_grid(const std::vector<double>& grid) {
    if (grid.empty())
        throw std::domain_error("grid: must not be empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw std::domain_error("grid: values must be strictly increasing");
}

inline std::vector<double> linear_grid(double lo, double hi, int steps) {
    if (steps < 1)
        throw std::domain_error("grid: step count must be >= 1");
    if (steps == 1)
        return {lo};
    std::vector<double> g(static_cast<std::size_t>(steps));
    for (int i = 0; i < steps; ++i)
        g[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (steps - 1);
    g.back() = hi;
    return g;
}

// `count` fields f in [lo, hi] with f_c - f log-spaced; increasing in f.
inline std::vector<double> critical_window_grid(double lo, double hi, int count) {
    if (!(lo < hi && hi < kCriticalField && lo > 0.0) || count < 2)
        throw std::domain_error("window: need 0 < lo < hi < 1/2 and at least two points");
    const double a = std::log(kCriticalField - lo);
    const double b = std::log(kCriticalField - hi);
    std::vector<double> g(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        g[static_cast<std::size_t>(i)] = kCriticalField - std::exp(a + (b - a) * i / (count - 1));
    g.front() = lo;
    g.back() = hi;
    return g;
}

// Runs each grid point independently; failures are kept in the row.
inline SweepResult sweep(const ChainSpec& base, const Partition& part, SweepAxis axis, const std::vector<double>& grid,
                         const PhasePolicy& policy, std::uint64_t seed, unsigned workers = 0) {
    check_grid(grid);
    SweepResult out;
    out.axis = axis;
    out.spec = base;
    out.part = part;
    out.policy = policy;
    out.seed = seed;
    out.points.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.points[i].value = grid[i];
        out.points[i].seed = mix_seed(seed, i);
    }

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            SweepPoint& p = out.points[i];
            try {
                ChainSpec s = base;
                (axis == SweepAxis::f ? s.f : s.temperature) = p.value;
                PhasePolicy pol = policy;
                pol.seed = p.seed;
                p.report = run_cycle(s, part, pol);
            } catch (const std::exception& e) {
                p.error = e.what();
            }
        }
    };
    if (workers == 0)
        workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(grid.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < workers; ++t)
        pool.emplace_back(work);
    work();
    for (auto& t : pool)
        t.join();
    return out;
}

struct Series {
    std::vector<double> x;
    std::vector<double> y;
};

template <class Get>
Series series_of(const SweepResult& r, Get&& get) {
    Series s;
    for (const auto& p : r.points)
        if (p.report)
            if (const std::optional<double> v = get(*p.report)) {
                s.x.push_back(p.value);
                s.y.push_back(*v);
            }
    return s;
}

struct ExponentFit {
    std::string quantity;
    double exponent = 0.0;
    double stderr_exponent = 0.0;
    double prefactor = 0.0;
    double r_squared = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
    int points = 0;
};

inline constexpr int kMinFitPoints = 8;

// Least-squares slope of log(value) against log(f_c - f) over the window.
inline ExponentFit fit_exponent(const Series& s, double lo, double hi, std::string quantity = "value") {
    if (!(lo > 0.0 && hi < kCriticalField && lo < hi))
        throw std::domain_error("window: must lie strictly inside (0, 1/2)");
    if (s.x.size() != s.y.size())
        throw std::domain_error("fit_exponent: series length mismatch");
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (s.x[i] < lo || s.x[i] > hi)
            continue;
        if (!(s.y[i] > 0.0))
            throw std::domain_error("fit_exponent: non-positive value " + std::to_string(s.y[i]) + " at f=" +
                                    std::to_string(s.x[i]));
        xs.push_back(std::log(kCriticalField - s.x[i]));
        ys.push_back(std::log(s.y[i]));
    }
    const auto n = static_cast<int>(xs.size());
    if (n < kMinFitPoints)
        throw std::domain_error("fit_exponent: need at least " + std::to_string(kMinFitPoints) +
                                " points in the window, got " + std::to_string(n));
    double mx = 0.0;
    double my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += xs[static_cast<std::size_t>(i)];
        my += ys[static_cast<std::size_t>(i)];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = xs[static_cast<std::size_t>(i)] - mx;
        const double dy = ys[static_cast<std::size_t>(i)] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0)
        throw std::domain_error("fit_exponent: all points share the same f");
    ExponentFit fit;
    fit.quantity = std::move(quantity);
    fit.exponent = sxy / sxx;
    fit.prefactor = std::exp(my - fit.exponent * mx);
    const double ssr = std::max(0.0, syy - fit.exponent * sxy);
    fit.stderr_exponent = std::sqrt(ssr / (n - 2) / sxx);
    fit.r_squared = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
    fit.window_lo = lo;
    fit.window_hi = hi;
    fit.points = n;
    return fit;
}

// Grid argmax; ties go to the smaller abscissa.
inline std::pair<double, double> locate_max(const Series& s) {
    if (s.x.empty() || s.x.size() != s.y.size())
        throw std::domain_error("locate_max: empty or mismatched series");
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.x.size(); ++i)
        if (s.y[i] > s.y[best] || (s.y[i] == s.y[best] && s.x[i] < s.x[best]))
            best = i;
    return {s.x[best], s.y[best]};
}

// One-spin cycle on the infinite chain from quadrature correlators. The
// xz correlator is taken from a ring of `xz_sites` spins when the phase
// makes it matter.
inline std::vector<CycleReport> single_spin_sweep(const std::vector<double>& grid, double theta,
                                                  std::optional<int> xz_sites) {
    const bool needs_xz = std::abs(std::cos(2.0 * theta)) > 1e-12;
    std::vector<CycleReport> out;
    out.reserve(grid.size());
    for (double f : grid) {
        CorrelatorSet c = correlators_ground(f);
        if (f >= kCriticalField || !needs_xz) {
            c.cxz = 0.0;
        } else {
            if (!xz_sites)
                throw std::domain_error("n: a ring size is needed for the xz correlator at this phase");
            ChainSpec s;
            s.n = *xz_sites;
            s.f = f;
            c.cxz = corr_xz_numeric(s);
        }
        out.push_back(single_spin_report(f, theta, c));
    }
    return out;
}

}  // namespace qbattery
