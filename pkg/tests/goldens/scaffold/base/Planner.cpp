#include <nanobind/nanobind.h>
#include "ompl/base/Planner.h"
#include "init.hh"

namespace nb = nanobind;

void ompl::binding::base::init_Planner(nb::module_& m)
{
}
