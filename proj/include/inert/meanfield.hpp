#pragma once

#include "inert/meanfield_mc.hpp"
#include "inert/meanfield_pde.hpp"
