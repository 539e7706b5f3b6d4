#pragma once

#include "corebench/benchmarks.hpp"
#include "corebench/environment.hpp"
#include "corebench/errors.hpp"
#include "corebench/exact_lp.hpp"
#include "corebench/experiments.hpp"
#include "corebench/io.hpp"
#include "corebench/mechanisms.hpp"
#include "corebench/profile.hpp"
#include "corebench/random.hpp"
#include "corebench/verification.hpp"
