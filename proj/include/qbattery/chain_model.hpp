#pragma once

// Periodic transverse-field Ising ring
//   H = -(1-f) sum_i sx_i sx_{i+1} - f sum_i sz_i  [- h sum_i sx_i]
// its battery/charger split, and its ground and Gibbs states.

#include "qbattery/spin_algebra.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbattery {

inline constexpr double kCriticalField = 0.5;

enum class GroundBranch { plus, minus, raw, mixed };

inline const char* to_string(GroundBranch b) {
    switch (b) {
        case GroundBranch::plus: return "plus";
        case GroundBranch::minus: return "minus";
        case GroundBranch::raw: return "raw";
        case GroundBranch::mixed: return "mixed";
    }
    return "?";
}

struct ChainSpec {
    int n = 8;
    double f = 0.5;
    double temperature = 0.0;  // k_B = 1; 0 selects a ground state
    double tilt = 0.0;         // longitudinal symmetry-breaking field
    GroundBranch branch = GroundBranch::plus;

    void validate() const {
        if (n < 2 || n > kMaxSites)
            throw std::domain_error("n: site count must lie in [2, " + std::to_string(kMaxSites) + "]");
        if (!(f >= 0.0 && f <= 1.0))
            throw std::domain_error("f: must lie in [0, 1]");
        if (!(temperature >= 0.0))
            throw std::domain_error("temperature: must be >= 0");
        if (!(tilt >= 0.0))
            throw std::domain_error("tilt: must be >= 0");
    }

    // (1-f)/f; empty at f = 0 where it diverges.
    std::optional<double> lambda() const {
        if (f == 0.0)
            return std::nullopt;
        return (1.0 - f) / f;
    }
};

// M consecutive battery sites starting at `start`; the charger is the rest.
struct Partition {
    int start = 0;
    int size = 1;

    void validate(int n) const {
        if (size < 1 || size > n - 1)
            throw std::domain_error("m: battery size must lie in [1, n-1]");
        if (start < 0 || start >= n)
            throw std::domain_error("start: must lie in [0, n)");
    }

    SiteBlock block() const { return {start, size}; }
    std::vector<int> battery_sites(int n) const { return block().sites(n); }
    std::vector<int> charger_sites(int n) const {
        std::vector<int> out;
        for (int k = size; k < n; ++k)
            out.push_back((start + k) % n);
        return out;
    }
    Bipartition split(int n) const { return Bipartition(battery_sites(n), n); }
};

namespace detail {

// Open chain along `sites` (in order): bonds between consecutive entries
// plus the transverse field on every entry.
inline void add_open_chain(PauliSum& h, const std::vector<int>& sites, double f) {
    for (std::size_t j = 0; j + 1 < sites.size(); ++j)
        h.add(-(1.0 - f), {{Axis::x, sites[j]}, {Axis::x, sites[j + 1]}});
    for (int s : sites)
        h.add(-f, {{Axis::z, s}});
}

}  // namespace detail

inline PauliSum ising_terms(const ChainSpec& spec) {
    spec.validate();
    PauliSum h(spec.n);
    for (int i = 0; i < spec.n; ++i)
        h.add(-(1.0 - spec.f), {{Axis::x, i}, {Axis::x, (i + 1) % spec.n}});
    for (int i = 0; i < spec.n; ++i)
        h.add(-spec.f, {{Axis::z, i}});
    if (spec.tilt > 0.0)
        for (int i = 0; i < spec.n; ++i)
            h.add(-spec.tilt, {{Axis::x, i}});
    return h;
}

inline PauliSum battery_terms(const ChainSpec& spec, const Partition& part) {
    spec.validate();
    part.validate(spec.n);
    PauliSum h(spec.n);
    detail::add_open_chain(h, part.battery_sites(spec.n), spec.f);
    return h;
}

inline PauliSum charger_terms(const ChainSpec& spec, const Partition& part) {
    spec.validate();
    part.validate(spec.n);
    PauliSum h(spec.n);
    detail::add_open_chain(h, part.charger_sites(spec.n), spec.f);
    return h;
}

inline PauliSum interaction_terms(const ChainSpec& spec, const Partition& part) {
    spec.validate();
    part.validate(spec.n);
    const int n = spec.n;
    const int first = part.start;
    const int last = (part.start + part.size - 1) % n;
    PauliSum h(n);
    h.add(-(1.0 - spec.f), {{Axis::x, (first - 1 + n) % n}, {Axis::x, first}});
    h.add(-(1.0 - spec.f), {{Axis::x, last}, {Axis::x, (last + 1) % n}});
    return h;
}

// Bare battery Hamiltonian on its own 2^M space (battery site k maps to
// local site k, first site most significant).
inline Operator local_battery_hamiltonian(double f, int m) {
    if (m < 1 || m >= kMaxSites)
        throw std::domain_error("m: battery size out of range");
    PauliSum h(m);
    std::vector<int> sites(static_cast<std::size_t>(m));
    std::iota(sites.begin(), sites.end(), 0);
    detail::add_open_chain(h, sites, f);
    return h.to_operator();
}

inline Operator build_h_tot(const ChainSpec& spec) { return ising_terms(spec).to_operator(); }

struct HamiltonianParts {
    Operator battery;
    Operator charger;
    Operator interaction;
};

inline HamiltonianParts build_h_parts(const ChainSpec& spec, const Partition& part) {
    return {battery_terms(spec, part).to_operator(), charger_terms(spec, part).to_operator(),
            interaction_terms(spec, part).to_operator()};
}

// Parity operator prod_i sz_i is diagonal: (-1)^{popcount(b)}.
inline double parity_expectation(const Vector& v) {
    double acc = 0.0;
    for (Index b = 0; b < v.size(); ++b)
        acc += ((std::popcount(static_cast<std::uint64_t>(b)) & 1) ? -1.0 : 1.0) * std::norm(v(b));
    return acc;
}

// The two lowest eigenstates, rotated within their span onto definite
// parity. `lower` has the smaller energy; on a numerical tie it is the even
// state. Needed because deep in the ordered phase the splitting drops below
// machine precision and the eigensolver returns arbitrary mixtures.
struct LowestPair {
    double e0 = 0.0;
    double e1 = 0.0;
    Vector lower;
    Vector upper;
};

inline LowestPair lowest_pair(const ChainSpec& spec) {
    const PauliSum h = ising_terms(spec);
    const auto spec2 = lowest_eigenpairs(h.to_operator(), 2);
    LowestPair out;
    out.e0 = spec2.values(0);
    out.e1 = spec2.values(1);
    if (spec.tilt > 0.0) {
        out.lower = spec2.vectors.col(0);
        out.upper = spec2.vectors.col(1);
        return out;
    }
    const Matrix& v = spec2.vectors;
    Matrix pv = v;
    for (Index b = 0; b < v.rows(); ++b)
        if (std::popcount(static_cast<std::uint64_t>(b)) & 1)
            pv.row(b) *= -1.0;
    const Matrix restricted = v.adjoint() * pv;
    const auto rot = eig_hermitian(0.5 * (restricted + restricted.adjoint()), Order::descending);
    Matrix resolved = v * rot.vectors;  // column 0 even, column 1 odd
    detail::fix_column_phases(resolved);
    const Vector even = resolved.col(0);
    const Vector odd = resolved.col(1);
    const double ee = h.expectation(even);
    const double eo = h.expectation(odd);
    if (eo < ee - 1e-12) {
        out.lower = odd;
        out.upper = even;
    } else {
        out.lower = even;
        out.upper = odd;
    }
    return out;
}

inline double sigma_x0(const Vector& v, int n) {
    PauliSum s(n);
    s.add(1.0, {{Axis::x, 0}});
    return s.expectation(v);
}

// Ground state for T = 0. For f < 1/2 the plus/minus branches approximate
// the symmetry-broken states by (|0> +- |1>)/sqrt(2), labelled so that the
// plus branch has <sx_0> >= 0.
inline StateVector ground_state(const ChainSpec& spec) {
    spec.validate();
    if (spec.temperature > 0.0)
        throw std::domain_error("ground_state: temperature must be 0 (use thermal_state)");
    if (spec.branch == GroundBranch::mixed)
        throw std::domain_error("ground_state: mixed branch is not a pure state (use mixed_ground_state)");
    const LowestPair pair = lowest_pair(spec);
    const bool ordered = spec.f < kCriticalField;
    if (spec.tilt > 0.0 || spec.branch == GroundBranch::raw || !ordered)
        return StateVector::normalized(pair.lower);
    const Vector a = (pair.lower + pair.upper) / std::sqrt(2.0);
    const Vector b = (pair.lower - pair.upper) / std::sqrt(2.0);
    const bool a_is_plus = sigma_x0(a, spec.n) >= sigma_x0(b, spec.n);
    const Vector& plus = a_is_plus ? a : b;
    const Vector& minus = a_is_plus ? b : a;
    return StateVector::normalized(spec.branch == GroundBranch::plus ? plus : minus);
}

// (|0+><0+| + |0-><0-|)/2 below the critical field, the unique ground
// state above it.
inline EnsembleState mixed_ground_state(const ChainSpec& spec) {
    spec.validate();
    if (spec.temperature > 0.0)
        throw std::domain_error("mixed_ground_state: temperature must be 0");
    const LowestPair pair = lowest_pair(spec);
    if (spec.f >= kCriticalField || spec.tilt > 0.0)
        return EnsembleState(StateVector::normalized(pair.lower));
    Matrix states(pair.lower.size(), 2);
    states.col(0) = pair.lower.normalized();
    states.col(1) = pair.upper.normalized();
    return EnsembleState(RealVector::Constant(2, 0.5), states);
}

inline double energy_gap(const ChainSpec& spec) {
    ChainSpec s = spec;
    s.temperature = 0.0;
    const LowestPair pair = lowest_pair(s);
    return std::max(0.0, pair.e1 - pair.e0);
}

inline double ground_energy(const ChainSpec& spec) { return lowest_pair(spec).e0; }

using Warnings = std::vector<std::string>;

// Gibbs state as a spectral ensemble. Energies are shifted by the ground
// energy before exponentiation.
inline EnsembleState thermal_ensemble(const ChainSpec& spec, Warnings* warnings = nullptr) {
    spec.validate();
    if (spec.temperature <= 0.0)
        throw std::domain_error("thermal_state: temperature must be > 0 (use ground_state)");
    if (spec.temperature < 1e-6 && warnings)
        warnings->push_back("temperature below 1e-6: Boltzmann weights are nearly degenerate");
    const auto es = eig_hermitian(build_h_tot(spec), Order::ascending);
    RealVector w = (-(es.values.array() - es.values(0)) / spec.temperature).exp();
    Index keep = 0;
    while (keep < w.size() && w(keep) > 0.0)
        ++keep;
    RealVector kept = w.head(keep);
    return EnsembleState(kept / kept.sum(), es.vectors.leftCols(keep));
}

inline DensityMatrix thermal_state(const ChainSpec& spec, Warnings* warnings = nullptr) {
    return thermal_ensemble(spec, warnings).density();
}

// The cycle's initial state for this spec.
inline EnsembleState initial_state(const ChainSpec& spec, Warnings* warnings = nullptr) {
    spec.validate();
    if (spec.temperature > 0.0)
        return thermal_ensemble(spec, warnings);
    if (spec.branch == GroundBranch::mixed)
        return mixed_ground_state(spec);
    return EnsembleState(ground_state(spec));
}

// Whether the initial state is passive for the untilted H_tot (Gibbs or an
// incoherent mixture of lowest levels). The plus/minus superpositions and
// tilted ground states are not.
inline bool initial_state_is_passive(const ChainSpec& spec) {
    if (spec.tilt > 0.0 && spec.temperature == 0.0)
        return false;
    if (spec.temperature > 0.0 || spec.branch == GroundBranch::raw || spec.branch == GroundBranch::mixed)
        return true;
    return spec.f >= kCriticalField;
}

}  // namespace qbattery
