#pragma once

#include <nanobind/nanobind.h>

namespace nb = nanobind;

namespace ompl::binding::util
{
    void init_RandomNumbers(nb::module_& m);
}
