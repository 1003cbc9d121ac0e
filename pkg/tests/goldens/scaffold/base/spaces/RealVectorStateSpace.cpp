#include <nanobind/nanobind.h>
#include "ompl/base/spaces/RealVectorStateSpace.h"
#include "../init.hh"

namespace nb = nanobind;

void ompl::binding::base::initSpaces_RealVectorStateSpace(nb::module_& m)
{
}
