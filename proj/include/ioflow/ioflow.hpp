#pragma once

#include "ioflow/balance.hpp"
#include "ioflow/csv.hpp"
#include "ioflow/flow_tensor.hpp"
#include "ioflow/google.hpp"
#include "ioflow/ordering.hpp"
#include "ioflow/ranking.hpp"
#include "ioflow/registry.hpp"
#include "ioflow/sensitivity.hpp"
#include "ioflow/types.hpp"
#include "ioflow/values.hpp"
