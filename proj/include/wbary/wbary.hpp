#pragma once

#include "wbary/bench.hpp"
#include "wbary/branch_and_bound.hpp"
#include "wbary/branching.hpp"
#include "wbary/colgen.hpp"
#include "wbary/diagnostics.hpp"
#include "wbary/error.hpp"
#include "wbary/gen_lp.hpp"
#include "wbary/generator.hpp"
#include "wbary/instance.hpp"
#include "wbary/instance_io.hpp"
#include "wbary/lp.hpp"
#include "wbary/lp_format.hpp"
#include "wbary/master.hpp"
#include "wbary/pricing_classic.hpp"
#include "wbary/serialize.hpp"
