#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

using namespace qbattery;
using qbattery::testing::kron_pauli;
using qbattery::testing::random_density;
using qbattery::testing::random_hermitian;

namespace {

constexpr double kPi = std::numbers::pi;

ChainSpec chain(int n, double f, double temperature = 0.0, GroundBranch branch = GroundBranch::plus) {
    ChainSpec s;
    s.n = n;
    s.f = f;
    s.temperature = temperature;
    s.branch = branch;
    return s;
}

// Lowest final energy over every assignment of populations to levels.
double brute_force_passive_energy(const DensityMatrix& rho, const Operator& h) {
    const RealVector r = eig_hermitian(rho.matrix()).values;
    const RealVector e = eig_hermitian(h).values;
    std::vector<Index> perm(static_cast<std::size_t>(r.size()));
    std::iota(perm.begin(), perm.end(), Index{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        double s = 0.0;
        for (Index k = 0; k < r.size(); ++k)
            s += r(k) * e(perm[static_cast<std::size_t>(k)]);
        best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

double direct_reconnect(const CycleSetup& s, const PhaseVector& theta) {
    return reconnect_energy(s.state, s.h_int, s.extraction, s.part, theta);
}

}  // namespace

TEST(Angles, WrapAndSeeds) {
    EXPECT_DOUBLE_EQ(wrap_angle(-0.5), 2.0 * kPi - 0.5);
    EXPECT_DOUBLE_EQ(wrap_angle(2.0 * kPi + 0.25), 0.25);
    EXPECT_GE(wrap_angle(-1e-300), 0.0);
    EXPECT_LT(wrap_angle(-1e-300), 2.0 * kPi);
    EXPECT_NE(mix_seed(1, 0), mix_seed(1, 1));
    EXPECT_NE(mix_seed(1, 0), mix_seed(2, 0));
    EXPECT_EQ(mix_seed(7, 3), mix_seed(7, 3));
}

TEST(PhaseVectorType, Validation) {
    EXPECT_THROW(PhaseVector(RealVector::Zero(3)), std::domain_error);
    EXPECT_THROW(PhaseVector(RealVector::Zero(1)), std::domain_error);
    EXPECT_THROW(PhaseVector(RealVector::Constant(2, std::nan(""))), std::domain_error);
    const PhaseVector p = PhaseVector::single_spin(0.3);
    EXPECT_DOUBLE_EQ(p[0], 0.3);
    EXPECT_DOUBLE_EQ(p[1], 2.0 * kPi - 0.3);
}

TEST(Disconnect, VanishesWithoutCoupling) {
    for (int m : {1, 2, 3}) {
        const auto parts = build_h_parts(chain(6, 1.0), {0, m});
        EXPECT_EQ(disconnect_energy(ground_state(chain(6, 1.0)), parts.interaction), 0.0);
    }
}

TEST(Disconnect, CriticalSingleSiteNearTwoOverPi) {
    const ChainSpec s = chain(11, 0.5);
    const auto parts = build_h_parts(s, {0, 1});
    const double ed = disconnect_energy(ground_state(s), parts.interaction);
    EXPECT_NEAR(ed, 2.0 * (1.0 - 0.5) * (2.0 / kPi), 2e-2);
    EXPECT_NEAR(ed, disconnect_energy(DensityMatrix::pure(ground_state(s)), parts.interaction), 1e-12);
}

TEST(Disconnect, IndependentOfBatterySize) {
    for (const ChainSpec& s : {chain(8, 0.5), chain(8, 0.3), chain(8, 0.6, 1.0)}) {
        const EnsembleState st = initial_state(s);
        const double e1 = disconnect_energy(st, interaction_terms(s, {0, 1}));
        for (int m = 2; m < 6; ++m)
            EXPECT_NEAR(disconnect_energy(st, interaction_terms(s, {3, m})), e1, 1e-10);
    }
}

TEST(Ergotropy, ThermalStateOfBatteryIsPassive) {
    std::mt19937_64 rng(1);
    for (int m : {1, 2, 3})
        for (double t : {0.1, 1.0, 10.0}) {
            const Operator h = local_battery_hamiltonian(0.4, m);
            const auto es = eig_hermitian(h);
            RealVector w = (-(es.values.array() - es.values(0)) / t).exp();
            w /= w.sum();
            const DensityMatrix gibbs(es.vectors * w.cast<cplx>().asDiagonal() * es.vectors.adjoint());
            EXPECT_EQ(ergotropy_spectral(gibbs, h).ergotropy, 0.0);
        }
}

TEST(Ergotropy, SingleSpinBlochFormula) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        double ax = u(rng), az = u(rng);
        const double len = std::hypot(ax, az);
        if (len > 1.0) {
            ax /= 1.01 * len;
            az /= 1.01 * len;
        }
        const double f = 0.5 * (u(rng) + 1.0);
        const Matrix rho = 0.5 * (Matrix::Identity(2, 2) + ax * pauli(Axis::x, 0, 1).matrix() +
                                  az * pauli(Axis::z, 0, 1).matrix());
        const auto r = ergotropy_spectral(DensityMatrix(rho), local_battery_hamiltonian(f, 1));
        EXPECT_NEAR(r.ergotropy, f * (std::hypot(ax, az) - az), 1e-12);
    }
}

TEST(Ergotropy, BruteForcePairingTwoQubits) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 30; ++trial) {
        const DensityMatrix rho = random_density(4, rng);
        const Operator h(random_hermitian(4, rng));
        const auto r = ergotropy_spectral(rho, h);
        const double passive = brute_force_passive_energy(rho, h);
        EXPECT_NEAR(r.passive_energy, passive, 1e-12);
        EXPECT_NEAR(r.ergotropy, expval(h, rho) - passive, 1e-12);
        EXPECT_NEAR(r.ergotropy, (h.matrix() * (rho.matrix() - r.passive_state.matrix())).trace().real(), 1e-10);
    }
}

TEST(Ergotropy, PassiveStateStructure) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const DensityMatrix rho = random_density(8, rng);
        const Operator h(random_hermitian(8, rng));
        const auto r = ergotropy_spectral(rho, h);
        const Matrix& v = r.battery_spectrum.vectors;
        const Matrix in_basis = v.adjoint() * r.passive_state.matrix() * v;
        EXPECT_LE(max_abs(in_basis - Matrix(in_basis.diagonal().asDiagonal())), 1e-12);
        for (Index k = 1; k < 8; ++k)
            EXPECT_LE(in_basis(k, k).real(), in_basis(k - 1, k - 1).real() + 1e-12);
        EXPECT_GE(r.ergotropy, 0.0);
    }
}

TEST(Ergotropy, DimensionMismatch) {
    EXPECT_THROW(ergotropy_spectral(DensityMatrix::maximally_mixed(2), local_battery_hamiltonian(0.5, 1)),
                 std::domain_error);
}

TEST(Extraction, UnitaryAndThetaInvariant) {
    std::mt19937_64 rng(5);
    for (int m : {1, 2, 3}) {
        const Index d = Index{1} << m;
        const DensityMatrix rho = random_density(d, rng);
        const auto r = ergotropy_spectral(rho, local_battery_hamiltonian(0.3, m));
        for (int trial = 0; trial < 5; ++trial) {
            const Matrix u = extraction_unitary(r, PhaseVector::random(d, rng)).matrix();
            EXPECT_LE(max_abs(u.adjoint() * u - Matrix::Identity(d, d)), 1e-10);
            EXPECT_LE(max_abs(u * rho.matrix() * u.adjoint() - r.passive_state.matrix()), 1e-10);
        }
    }
}

TEST(Extraction, SingleSpinMatchesRotation) {
    const CorrelatorSet c = correlators_exact(chain(9, 0.3));
    const Matrix rho = 0.5 * (Matrix::Identity(2, 2) + c.sx * pauli(Axis::x, 0, 1).matrix() +
                              c.sz * pauli(Axis::z, 0, 1).matrix());
    const auto r = ergotropy_spectral(DensityMatrix(rho), local_battery_hamiltonian(0.3, 1));
    const Matrix u = extraction_unitary(r, PhaseVector::zeros(2)).matrix();
    const auto a = single_spin_analytics(c);
    const Matrix v = single_spin_unitary(a.alpha, 0.0).matrix();
    EXPECT_NEAR(std::abs((u.adjoint() * v).trace()) / 2.0, 1.0, 1e-10);
}

TEST(Extraction, TwoSpinBlockStructure) {
    const CycleSetup s = prepare_cycle(chain(8, 0.5, 1.0), {0, 2});
    std::mt19937_64 rng(6);
    const Matrix u = extraction_unitary(s.extraction, PhaseVector::random(4, rng)).matrix();
    for (Index i : {0, 3})
        for (Index j : {1, 2}) {
            EXPECT_LE(std::abs(u(i, j)), 1e-10);
            EXPECT_LE(std::abs(u(j, i)), 1e-10);
        }
}

TEST(Coupling, ReconstructionMatchesDirectEvaluation) {
    std::mt19937_64 rng(7);
    for (const auto& [spec, m] : {std::pair{chain(6, 0.3), 1}, std::pair{chain(6, 0.4, 0.5), 2},
                                  std::pair{chain(7, 0.6, 0.2), 3}, std::pair{chain(6, 0.2, 0.0, GroundBranch::mixed), 2}}) {
        const CycleSetup s = prepare_cycle(spec, {1, m});
        const PhaseCoupling& pc = s.coupling;
        for (Index a = 0; a < pc.size(); ++a) {
            EXPECT_TRUE(pc.phase(a, a) == 0.0 || pc.phase(a, a) == kPi);
            for (Index g = 0; g < pc.size(); ++g) {
                EXPECT_GE(pc.magnitude(a, g), 0.0);
                EXPECT_NEAR(pc.magnitude(a, g), pc.magnitude(g, a), 1e-15);
                if (a != g && pc.magnitude(a, g) > 1e-12)
                    EXPECT_NEAR(std::remainder(pc.phase(a, g) + pc.phase(g, a), 2.0 * kPi), 0.0, 1e-12);
            }
        }
        for (int trial = 0; trial < 10; ++trial) {
            const PhaseVector theta = PhaseVector::random(pc.size(), rng);
            const double direct = direct_reconnect(s, theta);
            EXPECT_NEAR(pc.energy(theta), direct, 1e-10);
            EXPECT_NEAR(pc.energy_fast(theta.angles()), direct, 1e-10);
        }
    }
}

TEST(Coupling, DenseAndEnsemblePathsAgree) {
    std::mt19937_64 rng(8);
    const CycleSetup s = prepare_cycle(chain(6, 0.35, 0.4), {4, 2});
    const DensityMatrix rho = s.state.density();
    const Operator h_int = s.h_int.to_operator();
    const PhaseCoupling dense = phase_coupling(rho, h_int, s.extraction, s.part);
    EXPECT_LE(max_abs(dense.coupling - s.coupling.coupling), 1e-10);
    for (int trial = 0; trial < 5; ++trial) {
        const PhaseVector theta = PhaseVector::random(4, rng);
        EXPECT_NEAR(reconnect_energy(rho, h_int, s.extraction, s.part, theta), direct_reconnect(s, theta), 1e-10);
    }
    EXPECT_NEAR(disconnect_energy(rho, h_int), disconnect_energy(s.state, s.h_int), 1e-12);
}

TEST(Coupling, VanishesWithoutInteraction) {
    const CycleSetup s = prepare_cycle(chain(6, 1.0, 0.5), {0, 2});
    EXPECT_LE(s.coupling.magnitude.maxCoeff(), 0.0);
    std::mt19937_64 rng(9);
    EXPECT_EQ(direct_reconnect(s, PhaseVector::random(4, rng)), 0.0);
}

TEST(Coupling, ZeroFieldOffDiagonalBetweenDistinctLevels) {
    const CycleSetup s = prepare_cycle(chain(8, 0.0, 0.5), {0, 2});
    const RealVector& e = s.extraction.battery_spectrum.values;
    for (Index a = 0; a < 4; ++a)
        for (Index g = 0; g < 4; ++g)
            if (a != g && std::abs(e(a) - e(g)) > kDegeneracyTol)
                EXPECT_LE(s.coupling.magnitude(a, g), 1e-10) << a << "," << g;
}

TEST(Coupling, CommutingInteractionHasNoOffDiagonal) {
    // Battery Hamiltonian built from sx only, so it commutes with the bond terms.
    const ChainSpec spec = chain(8, 0.5, 0.7);
    const Partition part{0, 2};
    PauliSum hs(2);
    hs.add(-0.5, {{Axis::x, 0}, {Axis::x, 1}});
    hs.add(0.3, {{Axis::x, 0}});
    hs.add(0.17, {{Axis::x, 1}});
    const EnsembleState st = initial_state(spec);
    const auto r = ergotropy_spectral(st.reduce(part.split(8)), hs.to_operator());
    const RealVector& e = r.battery_spectrum.values;
    for (Index a = 1; a < 4; ++a)
        ASSERT_GT(e(a) - e(a - 1), 1e-3);
    const PhaseCoupling pc = phase_coupling(st, interaction_terms(spec, part), r, part);
    for (Index a = 0; a < 4; ++a)
        for (Index g = 0; g < 4; ++g)
            if (a != g)
                EXPECT_LE(pc.magnitude(a, g), 1e-10);
}

TEST(Reconnect, SingleSpinCosineLaw) {
    const CycleSetup s = prepare_cycle(chain(11, 0.3), {0, 1});
    const double c0 = direct_reconnect(s, PhaseVector::single_spin(0.0));
    EXPECT_LT(c0, 0.0);
    EXPECT_NEAR(direct_reconnect(s, PhaseVector::single_spin(kPi / 4)), 0.0, 1e-12);
    for (int k = 0; k < 24; ++k) {
        const double t = kPi * k / 24.0;
        EXPECT_NEAR(direct_reconnect(s, PhaseVector::single_spin(t)), c0 * std::cos(2.0 * t), 1e-10);
    }
    const CorrelatorSet c = correlators_exact(chain(11, 0.3));
    EXPECT_NEAR(c0, single_spin_reconnect_amplitude(0.3, c), 1e-8);
}

TEST(Reconnect, VanishesWithoutCoupling) {
    std::mt19937_64 rng(10);
    const CycleSetup s = prepare_cycle(chain(6, 1.0), {2, 3});
    for (int k = 0; k < 5; ++k)
        EXPECT_EQ(direct_reconnect(s, PhaseVector::random(8, rng)), 0.0);
}

TEST(Minimize, SingleSpinPicksZero) {
    const CycleSetup s = prepare_cycle(chain(9, 0.3), {0, 1});
    const PhaseOptimum best = minimize_reconnect(s.coupling, 42);
    const double c0 = direct_reconnect(s, PhaseVector::single_spin(0.0));
    EXPECT_NEAR(best.value, -std::abs(c0), 1e-12);
    const double rel = std::remainder(best.theta[1] - best.theta[0], kPi);
    EXPECT_NEAR(rel, 0.0, 1e-6);
    EXPECT_EQ(best.theta[0], 0.0);
}

TEST(Minimize, DiagonalOnlyCoupling) {
    PhaseCoupling pc;
    pc.coupling = Matrix::Zero(4, 4);
    pc.coupling.diagonal() << -0.5, 0.25, 0.1, -0.05;
    pc.magnitude = pc.coupling.cwiseAbs();
    pc.phase = RealMatrix::Zero(4, 4);
    for (Index a = 0; a < 4; ++a)
        pc.phase(a, a) = pc.coupling(a, a).real() < 0 ? kPi : 0.0;
    EXPECT_NEAR(minimize_reconnect(pc, 1, 2000).value, -0.2, 1e-14);
}

TEST(Minimize, TwoSpinGridOracle) {
    const CycleSetup s = prepare_cycle(chain(8, 0.5, 1.0), {0, 2});
    const PhaseOptimum best = minimize_reconnect(s.coupling, 5);
    const int steps = 64;
    double grid = std::numeric_limits<double>::infinity();
    RealVector t = RealVector::Zero(4);
    for (int i = 0; i < steps; ++i)
        for (int j = 0; j < steps; ++j)
            for (int k = 0; k < steps; ++k) {
                t << 0.0, kTwoPi * i / steps, kTwoPi * j / steps, kTwoPi * k / steps;
                grid = std::min(grid, s.coupling.energy_fast(t));
            }
    EXPECT_LE(best.value, grid + 1e-12);
    EXPECT_NEAR(best.value, grid, 1e-2);
    EXPECT_GE(best.value, s.coupling.lower_bound() - 1e-12);
    EXPECT_LE(best.value, s.coupling.energy_fast(RealVector::Zero(4)));
    EXPECT_LE(best.value, best.restart_value);
}

TEST(Minimize, DeterministicAndBudgetChecked) {
    const CycleSetup s = prepare_cycle(chain(6, 0.4, 0.3), {0, 3});
    const PhaseOptimum a = minimize_reconnect(s.coupling, 77, 3000);
    const PhaseOptimum b = minimize_reconnect(s.coupling, 77, 3000);
    EXPECT_EQ(a.value, b.value);
    EXPECT_EQ(a.theta.angles(), b.theta.angles());
    EXPECT_EQ(a.theta[0], 0.0);
    EXPECT_THROW(minimize_reconnect(s.coupling, 1, 104), std::domain_error);
    EXPECT_NO_THROW(minimize_reconnect(s.coupling, 1, 105));
}

TEST(Minimize, BelowRandomProbes) {
    std::mt19937_64 rng(12);
    const CycleSetup s = prepare_cycle(chain(7, 0.45, 0.5), {2, 3});
    const PhaseOptimum best = minimize_reconnect(s.coupling, 3);
    for (int k = 0; k < 64; ++k)
        EXPECT_LE(best.value, s.coupling.energy(PhaseVector::random(8, rng)) + 1e-12);
}

TEST(DifferentialEvolution, FindsShiftedQuadraticMinimum) {
    DeOptions opt;
    opt.seed = 3;
    opt.budget = 6000;
    const Eigen::VectorXd target = Eigen::Vector3d(0.3, -1.2, 2.0);
    auto quad = [&](const Eigen::VectorXd& x) { return (x - target).squaredNorm(); };
    const DeResult r = differential_evolution(quad, Eigen::Vector3d::Constant(-3), Eigen::Vector3d::Constant(3), opt);
    EXPECT_LE((r.x - target).norm(), 1e-4);
    EXPECT_LE(r.evaluations, opt.budget);
    EXPECT_EQ(de_population(3, opt), 45);
    opt.budget = 10;
    EXPECT_THROW(differential_evolution(quad, Eigen::Vector3d::Constant(-3), Eigen::Vector3d::Constant(3), opt),
                 std::domain_error);
}

TEST(DifferentialEvolution, PeriodicBoxWrapsAround) {
    DeOptions opt;
    opt.seed = 9;
    opt.budget = 4000;
    opt.periodic = true;
    auto f = [](const Eigen::VectorXd& x) { return -std::cos(x(0) - 0.1) - std::cos(x(1) + 0.2); };
    const DeResult r = differential_evolution(f, Eigen::Vector2d::Zero(), Eigen::Vector2d::Constant(kTwoPi), opt);
    EXPECT_NEAR(r.value, -2.0, 1e-8);
    EXPECT_GE(r.x.minCoeff(), 0.0);
    EXPECT_LT(r.x.maxCoeff(), kTwoPi);
}

TEST(Cycle, NoCouplingMeansNothingHappens) {
    for (int m : {1, 2, 3}) {
        const CycleReport r = run_cycle(chain(6, 1.0), {0, m}, PhasePolicy::minimize(1));
        EXPECT_EQ(r.disconnect, 0.0);
        EXPECT_EQ(r.ergotropy, 0.0);
        EXPECT_EQ(r.reconnect, 0.0);
        EXPECT_FALSE(r.efficiency.has_value());
        EXPECT_TRUE(r.ok());
    }
}

TEST(Cycle, DisorderedSingleSpinHoldsNoCharge) {
    for (double f : {0.5, 0.6, 0.8, 1.0}) {
        const CycleReport r = run_cycle(chain(8, f, 0.0, GroundBranch::raw), {0, 1}, PhasePolicy::zero());
        EXPECT_LE(r.ergotropy, 1e-10) << "f=" << f;
        EXPECT_TRUE(r.ok());
    }
}

TEST(Cycle, PhasesLeaveErgotropyButMoveReconnection) {
    std::mt19937_64 rng(13);
    const CycleSetup s = prepare_cycle(chain(8, 0.3), {0, 1});
    const CycleReport zero = run_cycle(s, PhasePolicy::zero());
    const CycleReport quarter = run_cycle(s, PhasePolicy::fixed_at(PhaseVector::single_spin(kPi / 4)));
    EXPECT_EQ(zero.ergotropy, quarter.ergotropy);
    EXPECT_GT(std::abs(zero.reconnect - quarter.reconnect), 1e-3);
    for (int k = 0; k < 5; ++k) {
        const CycleReport r = run_cycle(s, PhasePolicy::fixed_at(PhaseVector::random(2, rng)));
        EXPECT_EQ(r.ergotropy, zero.ergotropy);
    }
    EXPECT_THROW(run_cycle(s, PhasePolicy::fixed_at(PhaseVector::zeros(4))), std::domain_error);
}

TEST(Cycle, SecondLawOverRandomPhases) {
    std::mt19937_64 rng(14);
    for (const auto& [spec, m] : {std::pair{chain(6, 0.3, 0.1), 2}, std::pair{chain(6, 0.7, 1.0), 2},
                                  std::pair{chain(6, 0.2, 0.0, GroundBranch::raw), 1},
                                  std::pair{chain(6, 0.4, 0.0, GroundBranch::mixed), 3}}) {
        const CycleSetup s = prepare_cycle(spec, {0, m});
        const double ed = disconnect_energy(s.state, s.h_int);
        const Index d = Index{1} << m;
        for (int k = 0; k < 100; ++k) {
            const PhaseVector theta = PhaseVector::random(d, rng);
            EXPECT_GE(ed + s.coupling.energy(theta), s.extraction.ergotropy - 1e-10);
        }
    }
}

TEST(Cycle, ReportInvariants) {
    for (const ChainSpec& spec : {chain(6, 0.3, 0.1), chain(6, 0.5, 1.0), chain(6, 0.8, 0.0, GroundBranch::raw)})
        for (int m : {1, 2}) {
            const CycleReport r = run_cycle(spec, {1, m}, PhasePolicy::minimize(4));
            EXPECT_TRUE(r.ok()) << (r.violations.empty() ? "" : r.violations.front());
            EXPECT_NEAR(r.heat, -(r.disconnect - r.ergotropy + r.reconnect), 1e-10);
            EXPECT_GE(r.final_energy, r.initial_energy - 1e-10);
            EXPECT_GE(r.disconnect + r.reconnect_min, r.ergotropy - 1e-10);
            if (r.efficiency) {
                EXPECT_GE(*r.efficiency, 0.0);
                EXPECT_LE(*r.efficiency, 1.0);
            }
            if (spec.temperature > 0.0) {
                ASSERT_TRUE(r.dissipation.has_value());
                EXPECT_GE(*r.dissipation, -1e-10);
            }
            EXPECT_EQ(r.theta.angles(), r.theta_star.angles());
        }
}

TEST(Cycle, EfficiencyDefinition) {
    const CycleReport r = run_cycle(chain(6, 0.5, 0.5), {0, 2}, PhasePolicy::zero());
    ASSERT_TRUE(r.efficiency.has_value());
    EXPECT_DOUBLE_EQ(*r.efficiency, r.ergotropy / (r.disconnect + r.reconnect));
    EXPECT_FALSE(detail::efficiency(0.0, 0.0).has_value());
    EXPECT_FALSE(detail::efficiency(0.0, 1e-13).has_value());
    EXPECT_EQ(*detail::efficiency(0.0, 0.5), 0.0);
}

TEST(Cycle, SingleSpinFastPathMatchesGeneric) {
    const ChainSpec spec = chain(11, 0.3);
    const CycleSetup s = prepare_cycle(spec, {0, 1});
    const CorrelatorSet c = correlators_from_state(s.state);
    for (double theta : {0.0, 0.4, kPi / 4, 1.2}) {
        const CycleReport generic = run_cycle(s, PhasePolicy::fixed_at(PhaseVector::single_spin(theta)));
        const CycleReport fast = single_spin_report(0.3, theta, c);
        EXPECT_NEAR(fast.disconnect, generic.disconnect, 1e-8);
        EXPECT_NEAR(fast.ergotropy, generic.ergotropy, 1e-8);
        EXPECT_NEAR(fast.reconnect, generic.reconnect, 1e-8);
        EXPECT_NEAR(fast.reconnect_min, generic.reconnect_min, 1e-8);
        EXPECT_NEAR(fast.heat, generic.heat, 1e-8);
        EXPECT_NEAR(single_spin_input_energy(0.3, theta, c), generic.disconnect + generic.reconnect, 1e-8);
        ASSERT_EQ(fast.efficiency.has_value(), generic.efficiency.has_value());
        if (fast.efficiency)
            EXPECT_NEAR(*fast.efficiency, *generic.efficiency, 1e-8);
    }
}
