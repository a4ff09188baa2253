#pragma once

#include "mbtree/numerics.hpp"
#include "mbtree/rng.hpp"
#include "mbtree/tree.hpp"
#include "mbtree/growth.hpp"
#include "mbtree/laws.hpp"
#include "mbtree/crp.hpp"
#include "mbtree/measures.hpp"
#include "mbtree/limits.hpp"
#include "mbtree/oracle.hpp"
