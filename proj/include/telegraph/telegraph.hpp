// Copyright 2026 The telegraph-inference Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "telegraph/estimators.hpp"
#include "telegraph/moments.hpp"
#include "telegraph/montecarlo.hpp"
#include "telegraph/quadrature.hpp"
#include "telegraph/rng.hpp"
#include "telegraph/sample_io.hpp"
#include "telegraph/simulate.hpp"
#include "telegraph/specfn.hpp"
