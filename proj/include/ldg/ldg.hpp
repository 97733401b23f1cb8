#pragma once

#include "ldg/asymptotics.hpp"
#include "ldg/bulk.hpp"
#include "ldg/config.hpp"
#include "ldg/error.hpp"
#include "ldg/experiments.hpp"
#include "ldg/field.hpp"
#include "ldg/io.hpp"
#include "ldg/manifold.hpp"
#include "ldg/parallel.hpp"
#include "ldg/params.hpp"
#include "ldg/solver.hpp"
#include "ldg/tensor.hpp"
