#pragma once

#include "qbattery/spin_algebra.hpp"
#include "qbattery/chain_model.hpp"
#include "qbattery/analytic_correlators.hpp"
#include "qbattery/differential_evolution.hpp"
#include "qbattery/battery_cycle.hpp"
#include "qbattery/closed_forms.hpp"
#include "qbattery/sweeps.hpp"
