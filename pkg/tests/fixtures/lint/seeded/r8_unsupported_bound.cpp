#include <nanobind/nanobind.h>
#include "ompl/base/MotionValidator.h"
#include "init.hh"

namespace nb = nanobind;
namespace ob = ompl::base;

void ompl::binding::base::init_MotionValidator(nb::module_ &m)
{
    nb::class_<ob::MotionValidator>(m, "MotionValidator")
        .def(nb::init<ob::SpaceInformation *>())
        .def("checkMotion", &ob::MotionValidator::checkMotion)
        .def("getValidMotionCount", &ob::MotionValidator::getValidMotionCount);
}
