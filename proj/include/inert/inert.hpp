#pragma once

#include "inert/config.hpp"
#include "inert/csv.hpp"
#include "inert/error.hpp"
#include "inert/gamma_map.hpp"
#include "inert/harness.hpp"
#include "inert/meanfield.hpp"
#include "inert/measure.hpp"
#include "inert/parallel.hpp"
#include "inert/particle_sim.hpp"
#include "inert/random.hpp"
#include "inert/sampled_path.hpp"
#include "inert/selftest.hpp"
#include "inert/skorohod.hpp"
#include "inert/wasserstein.hpp"
