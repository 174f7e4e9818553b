#pragma once

// Umbrella header.

#include "griglab/audit.hpp"
#include "griglab/bounds.hpp"
#include "griglab/conjugacy.hpp"
#include "griglab/constructions.hpp"
#include "griglab/dihedral.hpp"
#include "griglab/enumeration.hpp"
#include "griglab/expression.hpp"
#include "griglab/group.hpp"
#include "griglab/parallel.hpp"
#include "griglab/perm.hpp"
#include "griglab/preset.hpp"
#include "griglab/quotient.hpp"
#include "griglab/width.hpp"
#include "griglab/words.hpp"
