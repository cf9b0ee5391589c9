#pragma once

// Closed-form cycle quantities for one- and two-spin batteries, written in
// terms of the chain's one- and two-site correlators.

#include "qbattery/analytic_correlators.hpp"
#include "qbattery/battery_cycle.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace qbattery {

struct SingleSpinAnalytics {
    double bloch_x = 0.0;
    double bloch_z = 0.0;
    double sigma_bar = 0.0;  // Bloch vector length
    double alpha = 0.0;      // half the rotation angle about y
    double theta = 0.0;
};

inline SingleSpinAnalytics single_spin_analytics(const CorrelatorSet& c, double theta = 0.0) {
    SingleSpinAnalytics a;
    a.bloch_x = c.sx;
    a.bloch_z = c.sz;
    a.sigma_bar = std::hypot(c.sx, c.sz);
    a.alpha = 0.5 * std::atan2(c.sx, c.sz);
    a.theta = theta;
    return a;
}

// exp(i theta sz) exp(i alpha sy)
inline Operator single_spin_unitary(double alpha, double theta) {
    Matrix rz(2, 2);
    rz << std::polar(1.0, theta), 0.0, 0.0, std::polar(1.0, -theta);
    Matrix ry(2, 2);
    ry << std::cos(alpha), std::sin(alpha), -std::sin(alpha), std::cos(alpha);
    return Operator(rz * ry);
}

// Amplitude c of E_c(theta) = c cos(2 theta).
inline double single_spin_reconnect_amplitude(double f, const CorrelatorSet& c) {
    const double bar = std::hypot(c.sx, c.sz);
    if (bar == 0.0)
        return 0.0;
    const double xz = c.cxz.value_or(0.0);
    return 2.0 * (1.0 - f) * (c.sx * xz - c.sz * c.cxx) / bar;
}

// One-spin cycle from correlators alone.
// The chain size is reported as 0 (infinite chain).
inline CycleReport single_spin_report(double f, double theta, const CorrelatorSet& c, double temperature = 0.0) {
    detail::check_field(f);
    if (f < kCriticalField && !c.cxz)
        throw std::domain_error("single_spin_report: cxz is required in the ordered phase");
    CycleReport r;
    r.spec.n = 0;
    r.spec.f = f;
    r.spec.temperature = temperature;
    r.part = Partition{0, 1};
    const double bar = std::hypot(c.sx, c.sz);
    const double amp = single_spin_reconnect_amplitude(f, c);
    r.disconnect = 2.0 * (1.0 - f) * c.cxx;
    const double w = f * (bar - c.sz);
    r.ergotropy = w < kErgotropyFloor ? 0.0 : w;
    r.theta = PhaseVector::single_spin(theta);
    r.reconnect = amp * std::cos(2.0 * theta);
    r.reconnect_min = -std::abs(amp);
    r.theta_star = PhaseVector::single_spin(amp <= 0.0 ? 0.0 : 0.5 * std::numbers::pi);
    r.heat = -(r.disconnect - r.ergotropy + r.reconnect);
    r.efficiency = detail::efficiency(r.ergotropy, r.disconnect + r.reconnect);
    if (temperature > 0.0)
        r.dissipation = -r.heat / temperature;
    return r;
}

// Input energy E_d + E_c in the one-spin cycle, grouped by correlator.
inline double single_spin_input_energy(double f, double theta, const CorrelatorSet& c) {
    const double bar = std::hypot(c.sx, c.sz);
    const double k = bar == 0.0 ? 0.0 : std::cos(2.0 * theta) / bar;
    return 2.0 * (1.0 - f) * (k * c.sx * c.cxz.value_or(0.0) + (1.0 - c.sz * k) * c.cxx);
}

struct TwoSpinAnalytics {
    double lambda = 0.0;
    double mu1 = 0.0;  // battery ground-state mixing angle
    double nu1 = 0.0;  // leading state-eigenvector mixing angle
    double delta_angle = 0.0;
    double omega_plus = 0.0;
    double omega_minus = 0.0;
    double delta = 0.0;  // cxx - cyy
};

namespace detail {

inline void check_x_state(const CorrelatorSet& c) {
    if (c.sx != 0.0 || c.cxz.value_or(0.0) != 0.0)
        throw std::domain_error(
            "two-spin closed form needs sx = 0 and cxz = 0; use ergotropy_spectral on the reduced state");
}

}  // namespace detail

inline TwoSpinAnalytics two_spin_analytics(const CorrelatorSet& c, double f) {
    detail::check_field(f);
    if (f == 0.0)
        throw std::domain_error("f: two-spin closed form needs f > 0");
    detail::check_x_state(c);
    TwoSpinAnalytics a;
    a.lambda = (1.0 - f) / f;
    a.delta = c.cxx - c.cyy;
    a.omega_plus = 1.0 + c.czz + 2.0 * c.sz;
    a.omega_minus = 1.0 + c.czz - 2.0 * c.sz;
    a.mu1 = std::atan2(2.0 + std::sqrt(4.0 + a.lambda * a.lambda), a.lambda);
    a.nu1 = std::atan2(2.0 * c.sz + std::sqrt(a.delta * a.delta + 4.0 * c.sz * c.sz), a.delta);
    a.delta_angle = a.mu1 - a.nu1;
    return a;
}

// Two-spin reduced state with only diagonal and anti-diagonal entries.
inline DensityMatrix two_spin_x_state(const CorrelatorSet& c) {
    detail::check_x_state(c);
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = 1.0 + c.czz + 2.0 * c.sz;
    m(3, 3) = 1.0 + c.czz - 2.0 * c.sz;
    m(1, 1) = m(2, 2) = 1.0 - c.czz;
    m(1, 2) = m(2, 1) = c.cxx + c.cyy;
    m(0, 3) = m(3, 0) = c.cxx - c.cyy;
    return DensityMatrix(0.25 * m);
}

inline double two_spin_ergotropy(const CorrelatorSet& c, double f) {
    if (f == 0.0) {
        detail::check_x_state(c);
        return 0.0;
    }
    const TwoSpinAnalytics a = two_spin_analytics(c, f);
    const double d = a.delta_angle;
    const double s = std::sin(d);
    double per_f = (a.delta - a.lambda * c.sz) * std::sin(2.0 * d) - (a.delta * a.lambda + 4.0 * c.sz) * s * s;
    // Inner block: only contributes when cxx + cyy < 0.
    const double inner = c.cxx + c.cyy;
    per_f += 0.5 * a.lambda * (std::abs(inner) - inner);
    const double w = f * per_f;
    return w < kErgotropyFloor ? 0.0 : w;
}

}  // namespace qbattery
