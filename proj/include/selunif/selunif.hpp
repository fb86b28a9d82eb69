#pragma once

// Convenience header pulling in the whole library.

#include "selunif/disagree.hpp"
#include "selunif/format.hpp"
#include "selunif/oracle.hpp"
#include "selunif/positive.hpp"
#include "selunif/selective.hpp"
#include "selunif/subst.hpp"
#include "selunif/terms.hpp"
#include "selunif/termspace.hpp"
#include "selunif/testgen.hpp"
