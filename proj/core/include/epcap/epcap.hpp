#pragma once

#include "epcap/bench.hpp"
#include "epcap/casegen.hpp"
#include "epcap/chance.hpp"
#include "epcap/dispatch.hpp"
#include "epcap/epcurve.hpp"
#include "epcap/error.hpp"
#include "epcap/fleet.hpp"
#include "epcap/magnitude.hpp"
#include "epcap/profile.hpp"
