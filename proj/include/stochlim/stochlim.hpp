#pragma once

#include "stochlim/coeffs/coeffs.hpp"
#include "stochlim/core/error.hpp"
#include "stochlim/core/types.hpp"
#include "stochlim/fock/fock.hpp"
#include "stochlim/funcspace/funcspace.hpp"
#include "stochlim/io/config.hpp"
#include "stochlim/io/writers.hpp"
#include "stochlim/models/models.hpp"
#include "stochlim/oracle/oracle.hpp"
#include "stochlim/oscint/oscint.hpp"
