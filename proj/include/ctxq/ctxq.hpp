#pragma once

#include "ctxq/born.hpp"
#include "ctxq/context.hpp"
#include "ctxq/error.hpp"
#include "ctxq/fixtures.hpp"
#include "ctxq/linalg.hpp"
#include "ctxq/projector_system.hpp"
#include "ctxq/qubit.hpp"
#include "ctxq/sections.hpp"
#include "ctxq/valuation.hpp"
