#pragma once

// Standard ensemble Q-learning baselines under the minimization convention:
// two-table double Q-learning (random table choice, cross-table bootstrap)
// and N-table maxmin Q-learning (bootstrap from the elementwise max table).

#include "memq/q_engine.hpp"

namespace memq {

QTable double_q_baseline(const Simulator& env, const SingleEnvOptions& opts, uint64_t seed);

QTable maxmin_q_baseline(const Simulator& env, const SingleEnvOptions& opts, uint64_t seed,
                         int n_tables = 2);

} // namespace memq
