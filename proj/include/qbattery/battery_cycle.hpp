#pragma once

// The four-stroke battery cycle: disconnect, extract ergotropy with a
// phase-parameterized unitary, reconnect, rethermalize.

#include "qbattery/chain_model.hpp"
#include "qbattery/differential_evolution.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbattery {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kErgotropyFloor = 1e-12;
inline constexpr double kCycleTol = 1e-10;
inline constexpr int kRandomRestarts = 64;
inline constexpr long kDefaultBudget = 20000;

inline double wrap_angle(double a) {
    double t = std::fmod(a, kTwoPi);
    if (t < 0.0)
        t += kTwoPi;
    return t >= kTwoPi ? 0.0 : t;
}

// splitmix64 finalizer; combines a global seed with a point index.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// One angle per eigenvector of the battery state, each in [0, 2pi).
class PhaseVector {
public:
    PhaseVector() = default;

    explicit PhaseVector(RealVector angles) : a_(std::move(angles)) {
        const auto n = a_.size();
        if (n < 2 || (n & (n - 1)) != 0)
            throw std::domain_error("theta: phase vector length must be 2^M");
        for (Index i = 0; i < n; ++i) {
            if (!std::isfinite(a_(i)))
                throw std::domain_error("theta: angles must be finite");
            a_(i) = wrap_angle(a_(i));
        }
    }

    static PhaseVector zeros(Index dim) { return PhaseVector(RealVector::Zero(dim)); }

    // exp(i theta sz) on a single spin.
    static PhaseVector single_spin(double theta) { return PhaseVector(RealVector{{theta, -theta}}); }

    template <class Rng>
    static PhaseVector random(Index dim, Rng& rng) {
        std::uniform_real_distribution<double> u(0.0, kTwoPi);
        RealVector a(dim);
        for (Index i = 0; i < dim; ++i)
            a(i) = u(rng);
        return PhaseVector(std::move(a));
    }

    const RealVector& angles() const { return a_; }
    Index size() const { return a_.size(); }
    double operator[](Index i) const { return a_(i); }

private:
    RealVector a_;
};

struct ErgotropyResult {
    double ergotropy = 0.0;
    double initial_energy = 0.0;
    double passive_energy = 0.0;
    DensityMatrix passive_state;
    SpectralDecomposition state_spectrum;    // descending populations
    SpectralDecomposition battery_spectrum;  // ascending energies
    std::vector<Index> pairing;              // state eigenvector k -> energy level pairing[k]
};

// Populations sorted down, energies sorted up, paired in order.
inline ErgotropyResult ergotropy_spectral(const DensityMatrix& rho, const Operator& h) {
    if (rho.dim() != h.dim())
        throw std::domain_error("ergotropy_spectral: state and Hamiltonian dimensions differ");
    if (!h.is_hermitian())
        throw std::domain_error("ergotropy_spectral: Hamiltonian is not Hermitian");
    ErgotropyResult out;
    out.state_spectrum = density_spectrum(rho);
    out.battery_spectrum = eig_hermitian(h, Order::ascending);
    const RealVector& r = out.state_spectrum.values;
    const RealVector& e = out.battery_spectrum.values;
    const Matrix& ev = out.battery_spectrum.vectors;
    out.pairing.resize(static_cast<std::size_t>(r.size()));
    std::iota(out.pairing.begin(), out.pairing.end(), Index{0});
    out.passive_state = DensityMatrix::unchecked(ev * r.cast<cplx>().asDiagonal() * ev.adjoint());
    out.initial_energy = expval(h, rho);
    out.passive_energy = r.dot(e);
    const double w = out.initial_energy - out.passive_energy;
    if (w < -kCycleTol)
        throw std::runtime_error("ergotropy_spectral: negative ergotropy " + std::to_string(w));
    out.ergotropy = w < kErgotropyFloor ? 0.0 : w;
    return out;
}

// sum_a exp(i theta_a) |e_a><r_a|
inline Operator extraction_unitary(const ErgotropyResult& result, const PhaseVector& theta) {
    const Index d = result.battery_spectrum.values.size();
    if (theta.size() != d)
        throw std::domain_error("theta: length must equal the battery dimension");
    Vector phases(d);
    for (Index a = 0; a < d; ++a)
        phases(a) = std::polar(1.0, theta[a]);
    return Operator(result.battery_spectrum.vectors * phases.asDiagonal() *
                    result.state_spectrum.vectors.adjoint());
}

inline double disconnect_energy(const EnsembleState& state, const PauliSum& h_int) { return -state.expval(h_int); }

inline double disconnect_energy(const DensityMatrix& rho, const Operator& h_int) { return -expval(h_int, rho); }

inline double disconnect_energy(const StateVector& psi, const Operator& h_int) { return -expval(h_int, psi); }

// Reconnection energy as a Hermitian form in exp(i theta):
//   E_c = sum_{a,g} exp(i(theta_a - theta_g)) C_{ag}.
struct PhaseCoupling {
    Matrix coupling;
    RealMatrix magnitude;
    RealMatrix phase;  // arg, in (-pi, pi]; 0 or pi on the diagonal

    Index size() const { return coupling.rows(); }

    double diagonal_sum() const { return coupling.diagonal().real().sum(); }

    double energy(const PhaseVector& theta) const {
        if (theta.size() != size())
            throw std::domain_error("theta: length must equal the battery dimension");
        double acc = 0.0;
        for (Index a = 0; a < size(); ++a) {
            acc += magnitude(a, a) * std::cos(phase(a, a));
            for (Index g = a + 1; g < size(); ++g)
                acc += 2.0 * magnitude(a, g) * std::cos(theta[a] - theta[g] + phase(a, g));
        }
        return acc;
    }

    // Same form, evaluated from the complex matrix.
    double energy_fast(const RealVector& theta) const {
        Vector u(theta.size());
        for (Index a = 0; a < theta.size(); ++a)
            u(a) = std::polar(1.0, theta(a));
        return (u.transpose() * coupling * u.conjugate()).value().real();
    }

    double lower_bound() const {
        double acc = diagonal_sum();
        for (Index a = 0; a < size(); ++a)
            for (Index g = a + 1; g < size(); ++g)
                acc -= 2.0 * magnitude(a, g);
        return acc;
    }

    double max_offdiagonal() const {
        double m = 0.0;
        for (Index a = 0; a < size(); ++a)
            for (Index g = 0; g < size(); ++g)
                if (a != g)
                    m = std::max(m, magnitude(a, g));
        return m;
    }
};

namespace detail {

inline double principal_arg(cplx z) {
    const double a = std::arg(z);
    return a <= -std::numbers::pi ? std::numbers::pi : a;
}

inline void check_battery(const ErgotropyResult& result, const Partition& part, int n) {
    part.validate(n);
    if (result.battery_spectrum.values.size() != (Index{1} << part.size))
        throw std::domain_error("ergotropy result does not match the battery size");
}

}  // namespace detail

// C_{ag} = Tr[H_int U_a rho U_g^dag] with U_a = |e_a><r_a| on the battery.
inline PhaseCoupling phase_coupling(const EnsembleState& state, const PauliSum& h_int, const ErgotropyResult& result,
                                    const Partition& part) {
    const int n = state.sites();
    if (h_int.sites() != n)
        throw std::domain_error("phase_coupling: interaction and state sizes differ");
    detail::check_battery(result, part, n);
    const Bipartition split = part.split(n);
    const Matrix& r = result.state_spectrum.vectors;
    const Matrix& e = result.battery_spectrum.vectors;
    const Index d = r.cols();
    Matrix c = Matrix::Zero(d, d);
    std::vector<Vector> moved(static_cast<std::size_t>(d));
    std::vector<Vector> acted(static_cast<std::size_t>(d));
    for (Index k = 0; k < state.size(); ++k) {
        const Matrix rows = r.adjoint() * split.reshape(state.states().col(k));
        for (Index a = 0; a < d; ++a) {
            moved[static_cast<std::size_t>(a)] = split.flatten(e.col(a) * rows.row(a));
            acted[static_cast<std::size_t>(a)] = h_int.apply(moved[static_cast<std::size_t>(a)]);
        }
        const double w = state.weights()(k);
        for (Index a = 0; a < d; ++a)
            for (Index g = 0; g < d; ++g)
                c(a, g) += w * moved[static_cast<std::size_t>(g)].dot(acted[static_cast<std::size_t>(a)]);
    }
    c = 0.5 * (c + c.adjoint());
    PhaseCoupling out;
    out.coupling = c;
    out.magnitude = c.cwiseAbs();
    out.phase.resize(d, d);
    for (Index a = 0; a < d; ++a)
        for (Index g = 0; g < d; ++g)
            out.phase(a, g) = a == g ? (c(a, a).real() < 0.0 ? std::numbers::pi : 0.0) : detail::principal_arg(c(a, g));
    return out;
}

inline PhaseCoupling phase_coupling(const DensityMatrix& rho, const Operator& h_int, const ErgotropyResult& result,
                                    const Partition& part) {
    const int n = rho.sites();
    const EnsembleState state(rho);
    detail::check_battery(result, part, n);
    if (h_int.dim() != rho.dim())
        throw std::domain_error("phase_coupling: interaction and state sizes differ");
    const Bipartition split = part.split(n);
    const Matrix& r = result.state_spectrum.vectors;
    const Matrix& e = result.battery_spectrum.vectors;
    const Index d = r.cols();
    Matrix c = Matrix::Zero(d, d);
    for (Index k = 0; k < state.size(); ++k) {
        const Matrix rows = r.adjoint() * split.reshape(state.states().col(k));
        Matrix moved(rho.dim(), d);
        for (Index a = 0; a < d; ++a)
            moved.col(a) = split.flatten(e.col(a) * rows.row(a));
        c += state.weights()(k) * (moved.adjoint() * h_int.matrix() * moved).transpose();
    }
    c = 0.5 * (c + c.adjoint());
    PhaseCoupling out;
    out.coupling = c;
    out.magnitude = c.cwiseAbs();
    out.phase.resize(d, d);
    for (Index a = 0; a < d; ++a)
        for (Index g = 0; g < d; ++g)
            out.phase(a, g) = a == g ? (c(a, a).real() < 0.0 ? std::numbers::pi : 0.0) : detail::principal_arg(c(a, g));
    return out;
}

// Tr[H_int (U x I) rho (U x I)^dag], evaluated directly.
inline double reconnect_energy(const EnsembleState& state, const PauliSum& h_int, const ErgotropyResult& result,
                               const Partition& part, const PhaseVector& theta) {
    detail::check_battery(result, part, state.sites());
    const Operator u = extraction_unitary(result, theta);
    return state.transformed(u.matrix(), part.split(state.sites())).expval(h_int);
}

inline double reconnect_energy(const DensityMatrix& rho, const Operator& h_int, const ErgotropyResult& result,
                               const Partition& part, const PhaseVector& theta) {
    const int n = rho.sites();
    detail::check_battery(result, part, n);
    const Operator u = extraction_unitary(result, theta);
    const Operator full = kron(u, Operator::identity(n - part.size));
    // Battery sites first in `full`; permute into ring order.
    const Bipartition split = part.split(n);
    Matrix perm = Matrix::Zero(rho.dim(), rho.dim());
    for (Index k = 0; k < split.dim_kept(); ++k)
        for (Index q = 0; q < split.dim_rest(); ++q)
            perm(split.global(k, q), k * split.dim_rest() + q) = 1.0;
    const Matrix big = perm * full.matrix() * perm.adjoint();
    return expval(h_int, DensityMatrix::unchecked(big * rho.matrix() * big.adjoint()));
}

struct PhaseOptimum {
    PhaseVector theta;
    double value = 0.0;
    double evolution_value = 0.0;  // best differential-evolution value before polishing
    double restart_value = 0.0;    // best of the coordinate-descent restarts
    long evaluations = 0;
};

namespace detail {

// Exact minimization over one angle at a time; theta_0 stays fixed.
inline double coordinate_descent(const PhaseCoupling& pc, RealVector& theta, int max_sweeps = 500) {
    const Matrix& c = pc.coupling;
    const Index d = theta.size();
    double value = pc.energy_fast(theta);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        for (Index a = 1; a < d; ++a) {
            cplx s = 0.0;
            for (Index g = 0; g < d; ++g)
                if (g != a)
                    s += c(a, g) * std::polar(1.0, -theta(g));
            if (std::abs(s) > 0.0)
                theta(a) = wrap_angle(std::numbers::pi - std::arg(s));
        }
        const double next = pc.energy_fast(theta);
        const bool settled = value - next <= 1e-15 * std::max(1.0, std::abs(value));
        value = next;
        if (settled)
            break;
    }
    return value;
}

}  // namespace detail

// Smallest budget the phase optimizer accepts for an M-site battery.
inline long min_phase_budget(int m) {
    DeOptions opt;
    return de_population(static_cast<int>((Index{1} << m) - 1), opt);
}

// Differential evolution over theta_1..theta_{D-1} with theta_0 = 0, then
// polished by coordinate descent and cross-checked by random restarts.
inline PhaseOptimum minimize_reconnect(const PhaseCoupling& pc, std::uint64_t seed, long budget = kDefaultBudget) {
    const Index d = pc.size();
    if (d < 2)
        throw std::domain_error("minimize_reconnect: coupling must cover at least two levels");
    const Index free = d - 1;
    DeOptions opt;
    opt.budget = budget;
    opt.seed = seed;
    opt.periodic = true;
    if (budget < de_population(static_cast<int>(free), opt))
        throw std::domain_error("budget: must be at least the population size (" +
                                std::to_string(de_population(static_cast<int>(free), opt)) + ")");
    auto full = [&](const Eigen::VectorXd& x) {
        RealVector t(d);
        t(0) = 0.0;
        t.tail(free) = x;
        return t;
    };
    const DeResult de = differential_evolution([&](const Eigen::VectorXd& x) { return pc.energy_fast(full(x)); },
                                               RealVector::Zero(free), RealVector::Constant(free, kTwoPi), opt);
    PhaseOptimum out;
    out.evaluations = de.evaluations;
    out.evolution_value = de.value;
    RealVector best = full(de.x);
    double best_value = detail::coordinate_descent(pc, best);

    std::mt19937_64 rng(mix_seed(seed, 0xC0FFEEULL));
    std::uniform_real_distribution<double> u(0.0, kTwoPi);
    out.restart_value = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kRandomRestarts; ++k) {
        RealVector t(d);
        t(0) = 0.0;
        for (Index a = 1; a < d; ++a)
            t(a) = u(rng);
        const double v = detail::coordinate_descent(pc, t);
        out.restart_value = std::min(out.restart_value, v);
        if (v < best_value) {
            best_value = v;
            best = t;
        }
    }
    RealVector zero = RealVector::Zero(d);
    const double at_zero = pc.energy_fast(zero);
    if (at_zero < best_value) {
        best_value = at_zero;
        best = zero;
    }
    out.theta = PhaseVector(best);
    out.value = best_value;
    return out;
}

enum class PhaseMode { zero, minimize, fixed };

inline const char* to_string(PhaseMode m) {
    switch (m) {
        case PhaseMode::zero: return "zero";
        case PhaseMode::minimize: return "min";
        case PhaseMode::fixed: return "fixed";
    }
    return "?";
}

struct PhasePolicy {
    PhaseMode mode = PhaseMode::zero;
    PhaseVector fixed;
    std::uint64_t seed = 0;
    long budget = kDefaultBudget;

    static PhasePolicy zero(std::uint64_t seed = 0, long budget = kDefaultBudget) {
        return {PhaseMode::zero, {}, seed, budget};
    }
    static PhasePolicy minimize(std::uint64_t seed = 0, long budget = kDefaultBudget) {
        return {PhaseMode::minimize, {}, seed, budget};
    }
    static PhasePolicy fixed_at(PhaseVector theta, std::uint64_t seed = 0, long budget = kDefaultBudget) {
        return {PhaseMode::fixed, std::move(theta), seed, budget};
    }
};

struct CycleReport {
    ChainSpec spec;
    Partition part;
    double disconnect = 0.0;     // E_d
    double ergotropy = 0.0;
    double reconnect = 0.0;      // E_c at `theta`
    double reconnect_min = 0.0;  // minimized over phases
    PhaseVector theta;
    PhaseVector theta_star;
    double heat = 0.0;  // energy returned by the reset stroke, E_I - E_IV
    std::optional<double> efficiency;
    std::optional<double> dissipation;  // -heat / T
    double initial_energy = 0.0;
    double final_energy = 0.0;
    bool passive_start = true;
    double excess_energy = 0.0;  // initial energy above the ground level when not passive
    std::vector<std::string> violations;
    Warnings warnings;

    bool ok() const { return violations.empty(); }
};

namespace detail {

inline std::optional<double> efficiency(double ergotropy, double input) {
    if (ergotropy == 0.0 && std::abs(input) <= kErgotropyFloor)
        return std::nullopt;
    if (input <= 0.0)
        return std::nullopt;
    return ergotropy / input;
}

inline void check_cycle(CycleReport& r) {
    auto fail = [&](const std::string& what) { r.violations.push_back(what); };
    const double slack = kCycleTol + r.excess_energy;
    if (r.ergotropy < 0.0)
        fail("negative ergotropy");
    if (r.disconnect + r.reconnect < r.ergotropy - slack)
        fail("second law: E_d + E_c < ergotropy");
    if (r.disconnect + r.reconnect_min < r.ergotropy - slack)
        fail("second law: E_d + E_c_min < ergotropy");
    if (r.efficiency && (*r.efficiency < 0.0 || (r.passive_start && *r.efficiency > 1.0 + kCycleTol)))
        fail("efficiency outside [0, 1]");
    if (!r.efficiency && r.ergotropy > 0.0 && r.passive_start)
        fail("efficiency undefined with positive ergotropy");
    const double scale = std::max(1.0, std::abs(r.initial_energy));
    if (std::abs(r.heat + (r.disconnect - r.ergotropy + r.reconnect)) > kCycleTol * scale)
        fail("energy bookkeeping: E_th != -(E_d - ergotropy + E_c)");
    if (r.final_energy < r.initial_energy - slack)
        fail("global energy decreased over the cycle");
    if (r.dissipation && *r.dissipation < -kCycleTol)
        fail("negative dissipation");
}

}  // namespace detail

// Everything up to the choice of phases.
struct CycleSetup {
    ChainSpec spec;
    Partition part;
    EnsembleState state;
    PauliSum h_tot;
    PauliSum h_int;
    ErgotropyResult extraction;
    PhaseCoupling coupling;
    Warnings warnings;
};

inline CycleSetup prepare_cycle(const ChainSpec& spec, const Partition& part) {
    spec.validate();
    part.validate(spec.n);
    CycleSetup c;
    c.spec = spec;
    c.part = part;
    c.state = initial_state(spec, &c.warnings);
    ChainSpec bare = spec;
    bare.tilt = 0.0;
    c.h_tot = ising_terms(bare);
    c.h_int = interaction_terms(bare, part);
    c.extraction = ergotropy_spectral(c.state.reduce(part.split(spec.n)), local_battery_hamiltonian(spec.f, part.size));
    c.coupling = phase_coupling(c.state, c.h_int, c.extraction, part);
    return c;
}

inline CycleReport run_cycle(const CycleSetup& c, const PhasePolicy& policy) {
    const ChainSpec& spec = c.spec;
    CycleReport r;
    r.spec = spec;
    r.part = c.part;
    r.warnings = c.warnings;
    r.initial_energy = c.state.expval(c.h_tot);
    r.passive_start = initial_state_is_passive(spec);
    if (!r.passive_start) {
        ChainSpec bare = spec;
        bare.tilt = 0.0;
        r.excess_energy = std::max(0.0, r.initial_energy - ground_energy(bare));
    }
    r.disconnect = disconnect_energy(c.state, c.h_int);
    r.ergotropy = c.extraction.ergotropy;

    const PhaseOptimum best = minimize_reconnect(c.coupling, policy.seed, policy.budget);
    r.theta_star = best.theta;
    r.reconnect_min = best.value;
    switch (policy.mode) {
        case PhaseMode::zero: r.theta = PhaseVector::zeros(c.coupling.size()); break;
        case PhaseMode::minimize: r.theta = best.theta; break;
        case PhaseMode::fixed:
            if (policy.fixed.size() != c.coupling.size())
                throw std::domain_error("theta: expected " + std::to_string(c.coupling.size()) + " angles");
            r.theta = policy.fixed;
            break;
    }
    const EnsembleState after =
        c.state.transformed(extraction_unitary(c.extraction, r.theta).matrix(), c.part.split(spec.n));
    r.reconnect = after.expval(c.h_int);
    r.final_energy = after.expval(c.h_tot);
    r.heat = r.initial_energy - r.final_energy;
    r.efficiency = detail::efficiency(r.ergotropy, r.disconnect + r.reconnect);
    if (spec.temperature > 0.0)
        r.dissipation = -r.heat / spec.temperature;
    detail::check_cycle(r);
    return r;
}

inline CycleReport run_cycle(const ChainSpec& spec, const Partition& part, const PhasePolicy& policy) {
    return run_cycle(prepare_cycle(spec, part), policy);
}

}  // namespace qbattery
