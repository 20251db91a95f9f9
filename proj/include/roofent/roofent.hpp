#pragma once

#include "core.hpp"
#include "random.hpp"
#include "subalgebra.hpp"
#include "stiefel.hpp"
#include "roof.hpp"
#include "leaf.hpp"
#include "condent.hpp"
#include "experiments.hpp"
