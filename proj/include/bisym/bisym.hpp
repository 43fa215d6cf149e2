#pragma once

#include "bisym/catalog.hpp"
#include "bisym/dynsys.hpp"
#include "bisym/exchange.hpp"
#include "bisym/flow.hpp"
#include "bisym/liealg.hpp"
#include "bisym/rmatrix.hpp"
#include "bisym/symplectic.hpp"
#include "bisym/verify.hpp"
