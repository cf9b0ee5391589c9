#pragma once

// Differential evolution (rand/1/bin) over a box, optionally periodic.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <stdexcept>

namespace qbattery {

struct DeOptions {
    int population = 0;  // 0 selects 15 * dimension
    double weight = 0.8;
    double crossover = 0.9;
    long budget = 20000;  // objective evaluations
    std::uint64_t seed = 0;
    bool periodic = false;
};

struct DeResult {
    Eigen::VectorXd x;
    double value = std::numeric_limits<double>::infinity();
    long evaluations = 0;
    int generations = 0;
};

inline int de_population(int dimension, const DeOptions& opt) {
    return opt.population > 0 ? opt.population : 15 * dimension;
}

template <class Objective>
DeResult differential_evolution(Objective&& objective, const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                const DeOptions& opt) {
    const auto dim = lower.size();
    if (dim == 0 || upper.size() != dim)
        throw std::domain_error("differential_evolution: empty or mismatched bounds");
    if ((upper.array() <= lower.array()).any())
        throw std::domain_error("differential_evolution: upper bound must exceed lower bound");
    const int np = de_population(static_cast<int>(dim), opt);
    if (np < 4)
        throw std::domain_error("differential_evolution: population must be at least 4");
    if (opt.budget < np)
        throw std::domain_error("budget: must be at least the population size (" + std::to_string(np) + ")");

    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, np - 1);
    std::uniform_int_distribution<Eigen::Index> pick_dim(0, dim - 1);
    const Eigen::VectorXd width = upper - lower;

    auto confine = [&](Eigen::VectorXd& x) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            if (opt.periodic) {
                double t = std::fmod(x(j) - lower(j), width(j));
                if (t < 0.0)
                    t += width(j);
                x(j) = lower(j) + t;
            } else if (x(j) < lower(j) || x(j) > upper(j)) {
                x(j) = lower(j) + unit(rng) * width(j);
            }
        }
    };

    Eigen::MatrixXd pop(dim, np);
    Eigen::VectorXd cost(np);
    DeResult best;
    for (int i = 0; i < np; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j)
            pop(j, i) = lower(j) + unit(rng) * width(j);
        cost(i) = objective(Eigen::VectorXd(pop.col(i)));
        ++best.evaluations;
        if (cost(i) < best.value) {
            best.value = cost(i);
            best.x = pop.col(i);
        }
    }

    Eigen::VectorXd trial(dim);
    while (best.evaluations + np <= opt.budget) {
        for (int i = 0; i < np; ++i) {
            int a, b, c;
            do a = pick(rng); while (a == i);
            do b = pick(rng); while (b == i || b == a);
            do c = pick(rng); while (c == i || c == a || c == b);
            const Eigen::Index forced = pick_dim(rng);
            for (Eigen::Index j = 0; j < dim; ++j)
                trial(j) = (j == forced || unit(rng) < opt.crossover)
                               ? pop(j, a) + opt.weight * (pop(j, b) - pop(j, c))
                               : pop(j, i);
            confine(trial);
            const double v = objective(Eigen::VectorXd(trial));
            ++best.evaluations;
            if (v <= cost(i)) {
                pop.col(i) = trial;
                cost(i) = v;
                if (v < best.value) {
                    best.value = v;
                    best.x = trial;
                }
            }
        }
        ++best.generations;
    }
    return best;
}

}  // namespace qbattery
