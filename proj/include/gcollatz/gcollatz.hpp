#pragma once

#include "diophantine.hpp"
#include "dynamics.hpp"
#include "errors.hpp"
#include "families.hpp"
#include "integer.hpp"
#include "interval.hpp"
#include "necessary.hpp"
#include "report.hpp"
#include "triplet.hpp"
#include "verifier.hpp"
