#pragma once

#include "actorgraph/bench.hpp"
#include "actorgraph/engine.hpp"
#include "actorgraph/graph.hpp"
#include "actorgraph/partition.hpp"
#include "actorgraph/serial.hpp"
#include "actorgraph/variants.hpp"
