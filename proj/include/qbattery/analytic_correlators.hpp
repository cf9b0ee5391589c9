#pragma once

// Infinite-chain magnetizations and nearest-neighbour correlators of the
// transverse-field Ising ring, by quadrature over the quasiparticle
// momentum; exact-diagonalization counterparts for finite chains.

#include "qbattery/chain_model.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace qbattery {

inline constexpr double kOrderParameterExponent = 0.125;
inline constexpr double kQuadratureTol = 1e-10;

enum class CorrelatorSource { quadrature_T0, quadrature_finiteT, exact_diag };

inline const char* to_string(CorrelatorSource s) {
    switch (s) {
        case CorrelatorSource::quadrature_T0: return "quadrature_T0";
        case CorrelatorSource::quadrature_finiteT: return "quadrature_finiteT";
        case CorrelatorSource::exact_diag: return "exact_diag";
    }
    return "?";
}

struct CorrelatorSet {
    double sx = 0.0;
    double sz = 0.0;
    double cxx = 0.0;
    double cyy = 0.0;
    double czz = 0.0;
    std::optional<double> cxz;
    double delta = 0.0;  // cxx - cyy
    CorrelatorSource source = CorrelatorSource::quadrature_T0;

    void validate() const {
        for (double v : {sx, sz, cxx, cyy, czz})
            if (!(v >= -1.0 - 1e-12 && v <= 1.0 + 1e-12))
                throw std::domain_error("CorrelatorSet: entry outside [-1, 1]");
        if (cxz && !(*cxz >= -1.0 - 1e-12 && *cxz <= 1.0 + 1e-12))
            throw std::domain_error("CorrelatorSet: cxz outside [-1, 1]");
    }
};

namespace detail {

inline void check_field(double f) {
    if (!(f >= 0.0 && f <= 1.0))
        throw std::domain_error("f: must lie in [0, 1]");
}

// Integrands are written in s = 1 + cos(phi) = 2 cos^2(phi/2) so that the
// cancellations at lambda = 1, phi = pi stay exact.
inline double one_plus_cos(double phi) {
    const double c = std::cos(0.5 * phi);
    return 2.0 * c * c;
}

// Quasiparticle dispersion in units of f.
inline double dispersion(double lambda, double phi) {
    return std::sqrt((1.0 - lambda) * (1.0 - lambda) + 2.0 * lambda * one_plus_cos(phi));
}

template <unsigned Points, class F>
double integrate_0_pi(F&& g) {
    using boost::math::quadrature::gauss_kronrod;
    constexpr double pi = std::numbers::pi;
    constexpr double split = pi - 1e-3;
    double err_a = 0.0;
    double err_b = 0.0;
    const double a = gauss_kronrod<double, Points>::integrate(g, 0.0, split, 15, 1e-11, &err_a);
    const double b = gauss_kronrod<double, Points>::integrate(g, split, pi, 15, 1e-11, &err_b);
    if (err_a + err_b > kQuadratureTol) {
        char msg[96];
        std::snprintf(msg, sizeof msg, "quadrature did not reach tolerance (error estimate %.3e)", err_a + err_b);
        throw std::runtime_error(msg);
    }
    return (a + b) / pi;
}

struct MomentumIntegrals {
    double sz;
    double cxx;
    double cyy;
};

// temperature <= 0 selects the ground state.
template <unsigned Points = 15>
MomentumIntegrals momentum_integrals(double f, double temperature) {
    const double lambda = (1.0 - f) / f;
    auto weight = [&](double phi) {
        const double w = dispersion(lambda, phi);
        const double occupation = temperature > 0.0 ? std::tanh(f * w / temperature) : 1.0;
        return occupation / w;
    };
    MomentumIntegrals out{};
    out.sz = integrate_0_pi<Points>([&](double p) {
        return ((1.0 - lambda) + lambda * one_plus_cos(p)) * weight(p);
    });
    out.cxx = integrate_0_pi<Points>([&](double p) {
        return ((lambda - 1.0) + one_plus_cos(p)) * weight(p);
    });
    out.cyy = integrate_0_pi<Points>([&](double p) {
        const double s = one_plus_cos(p);
        return ((lambda - 1.0) + s * (1.0 - 4.0 * lambda) + 2.0 * lambda * s * s) * weight(p);
    });
    return out;
}

inline CorrelatorSet close(double sx, double sz, double cxx, double cyy, CorrelatorSource src) {
    CorrelatorSet c;
    c.sx = sx;
    c.sz = sz;
    c.cxx = cxx;
    c.cyy = cyy;
    c.czz = sz * sz - cxx * cyy;
    c.delta = cxx - cyy;
    c.source = src;
    return c;
}

}  // namespace detail

// Spontaneous magnetization of the plus branch, (1 - lambda^-2)^(1/8) for f < 1/2.
inline double order_parameter(double f) {
    detail::check_field(f);
    if (f == 0.0)
        return 1.0;
    if (f >= kCriticalField)
        return 0.0;
    const double lambda = (1.0 - f) / f;
    return std::pow(1.0 - 1.0 / (lambda * lambda), kOrderParameterExponent);
}

inline CorrelatorSet correlators_ground(double f) {
    detail::check_field(f);
    if (f == 0.0)
        return detail::close(1.0, 0.0, 1.0, 0.0, CorrelatorSource::quadrature_T0);
    if (f == 1.0)
        return detail::close(0.0, 1.0, 0.0, 0.0, CorrelatorSource::quadrature_T0);
    const auto m = detail::momentum_integrals(f, 0.0);
    return detail::close(order_parameter(f), m.sz, m.cxx, m.cyy, CorrelatorSource::quadrature_T0);
}

// Equal mixture of the two symmetry-broken ground states: as above with
// vanishing longitudinal magnetization and cxz = 0.
inline CorrelatorSet correlators_mixed_ground(double f) {
    CorrelatorSet c = correlators_ground(f);
    c.sx = 0.0;
    c.cxz = 0.0;
    return c;
}

inline CorrelatorSet correlators_thermal(double f, double temperature) {
    detail::check_field(f);
    if (!(temperature > 0.0))
        throw std::domain_error("temperature: must be > 0");
    CorrelatorSet c;
    if (f == 0.0) {
        c = detail::close(0.0, 0.0, std::tanh(1.0 / temperature), 0.0, CorrelatorSource::quadrature_finiteT);
    } else if (f == 1.0) {
        c = detail::close(0.0, std::tanh(1.0 / temperature), 0.0, 0.0, CorrelatorSource::quadrature_finiteT);
    } else {
        const auto m = detail::momentum_integrals(f, temperature);
        c = detail::close(0.0, m.sz, m.cxx, m.cyy, CorrelatorSource::quadrature_finiteT);
    }
    c.cxz = 0.0;
    return c;
}

// Largest change of (sz, cxx, cyy) when the Kronrod rule is doubled.
inline double quadrature_refinement_change(double f, double temperature) {
    const auto a = detail::momentum_integrals<15>(f, temperature);
    const auto b = detail::momentum_integrals<31>(f, temperature);
    return std::max({std::abs(a.sz - b.sz), std::abs(a.cxx - b.cxx), std::abs(a.cyy - b.cyy)});
}

namespace detail {

inline PauliSum two_site(Axis a, Axis b, int n) {
    PauliSum s(n);
    s.add(1.0, {{a, 0}, {b, 1}});
    return s;
}

inline PauliSum one_site(Axis a, int n) {
    PauliSum s(n);
    s.add(1.0, {{a, 0}});
    return s;
}

}  // namespace detail

// <sx_0 sz_1> on the finite ring in the plus-branch ground state.
inline double corr_xz_numeric(const ChainSpec& spec) {
    ChainSpec s = spec;
    s.branch = GroundBranch::plus;
    const StateVector psi = ground_state(s);
    return detail::two_site(Axis::x, Axis::z, s.n).expectation(psi.amplitudes());
}

inline CorrelatorSet correlators_from_state(const EnsembleState& state) {
    const int n = state.sites();
    using detail::one_site;
    using detail::two_site;
    CorrelatorSet c;
    c.source = CorrelatorSource::exact_diag;
    c.sx = state.expval(one_site(Axis::x, n));
    c.sz = state.expval(one_site(Axis::z, n));
    c.cxx = state.expval(two_site(Axis::x, Axis::x, n));
    c.cyy = state.expval(two_site(Axis::y, Axis::y, n));
    c.czz = state.expval(two_site(Axis::z, Axis::z, n));
    c.cxz = state.expval(two_site(Axis::x, Axis::z, n));
    c.delta = c.cxx - c.cyy;
    return c;
}

// Exact-diagonalization correlators in the cycle's initial state.
inline CorrelatorSet correlators_exact(const ChainSpec& spec) {
    return correlators_from_state(initial_state(spec));
}

}  // namespace qbattery
