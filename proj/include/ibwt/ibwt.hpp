#pragma once

#include "ibwt/bench.hpp"
#include "ibwt/bwt.hpp"
#include "ibwt/codec.hpp"
#include "ibwt/container.hpp"
#include "ibwt/error.hpp"
#include "ibwt/hwsim.hpp"
