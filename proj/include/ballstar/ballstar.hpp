// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "core.hpp"
#include "pca.hpp"
#include "partition.hpp"
#include "search.hpp"
#include "random.hpp"
#include "datagen.hpp"
#include "bench.hpp"
#include "report.hpp"
