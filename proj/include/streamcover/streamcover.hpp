#pragma once

#include "streamcover/baselines.hpp"
#include "streamcover/bench.hpp"
#include "streamcover/f0_sketch.hpp"
#include "streamcover/mach.hpp"
#include "streamcover/poly_hash.hpp"
#include "streamcover/prng.hpp"
#include "streamcover/set_stream.hpp"
#include "streamcover/space_account.hpp"
