#include <nanobind/nanobind.h>
#include "ompl/base/spaces/RealVectorStateSpace.h"
#include "../init.hh"

namespace nb = nanobind;
namespace ob = ompl::base;

void ompl::binding::base::initSpaces_RealVectorStateSpace(nb::module_ &m)
{
    nb::class_<ob::RealVectorStateSpace, ob::StateSpace>(m, "RealVectorStateSpace")
        .def(nb::init<unsigned int>())
        .def("setBounds", &ob::RealVectorStateSpace::setBounds)
        .def("getDimension", &ob::RealVectorStateSpace::getDimension);
}
