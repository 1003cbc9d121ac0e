#include <nanobind/nanobind.h>
#include "ompl/util/RandomNumbers.h"
#include "init.hh"

namespace nb = nanobind;

void ompl::binding::util::init_RandomNumbers(nb::module_& m)
{
}
