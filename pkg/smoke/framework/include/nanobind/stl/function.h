/* Compile-check stand-in: function-object conversions need only the type. */

#ifndef NANOBIND_STL_FUNCTION_H
#define NANOBIND_STL_FUNCTION_H

#include <nanobind/nanobind.h>

#include <functional>

#endif
