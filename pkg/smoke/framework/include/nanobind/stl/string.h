/* Compile-check stand-in: string conversions need only the type. */

#ifndef NANOBIND_STL_STRING_H
#define NANOBIND_STL_STRING_H

#include <nanobind/nanobind.h>

#include <string>

#endif
