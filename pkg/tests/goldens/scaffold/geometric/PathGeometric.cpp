#include <nanobind/nanobind.h>
#include "ompl/geometric/PathGeometric.h"
#include "init.hh"

namespace nb = nanobind;

void ompl::binding::geometric::init_PathGeometric(nb::module_& m)
{
}
