#include <nanobind/nanobind.h>
#include "ompl/base/State.h"
#include "init.hh"

namespace nb = nanobind;

void ompl::binding::base::init_State(nb::module_& m)
{
}
