// Copyright henn contributors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header.
#pragma once

#include "henn/errors.hpp"
#include "henn/extract.hpp"
#include "henn/fourier.hpp"
#include "henn/funcspec.hpp"
#include "henn/henc.hpp"
#include "henn/netcore.hpp"
#include "henn/poly.hpp"
#include "henn/quant.hpp"
#include "henn/report.hpp"
