#ifndef FACTOREDQ_FACTOREDQ_HPP
#define FACTOREDQ_FACTOREDQ_HPP

#include "factoredq/action_space.hpp"
#include "factoredq/mlp.hpp"
#include "factoredq/action_algebra.hpp"
#include "factoredq/policies.hpp"
#include "factoredq/envs.hpp"
#include "factoredq/trainer.hpp"
#include "factoredq/csv.hpp"
#include "factoredq/presets.hpp"

#endif  // FACTOREDQ_FACTOREDQ_HPP
