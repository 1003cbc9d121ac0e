/* Compile-check stand-in: shared-pointer conversions need only the type. */

#ifndef NANOBIND_STL_SHARED_PTR_H
#define NANOBIND_STL_SHARED_PTR_H

#include <nanobind/nanobind.h>

#include <memory>

#endif
