#pragma once

// Cohesive transport of flexible objects by robot networks: spring-network
// model, local-force and delayed-self-reinforcement updates, stability,
// tuning, and metrics.

#include "cohesive/controller.hpp"
#include "cohesive/dynamics.hpp"
#include "cohesive/jacobi.hpp"
#include "cohesive/metrics.hpp"
#include "cohesive/network_model.hpp"
#include "cohesive/scenario.hpp"
#include "cohesive/stability.hpp"
#include "cohesive/sweep.hpp"
#include "cohesive/trajectory.hpp"
#include "cohesive/tuning.hpp"
