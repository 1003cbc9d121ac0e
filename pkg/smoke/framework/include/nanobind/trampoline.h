/*
 * Compile-check stand-in for the framework's trampoline support.
 *
 * NB_TRAMPOLINE inherits the base constructors so init<...> signatures
 * resolve against the trampoline, and NB_OVERRIDE* forward to the base
 * member so the compiler checks every override against the original
 * declaration.  The slot count is kept as a constant; whether it matches
 * the number of virtual functions is a property only the lint stage can
 * see, so here it is merely required to be positive.
 */

#ifndef NANOBIND_TRAMPOLINE_H
#define NANOBIND_TRAMPOLINE_H

#include <nanobind/nanobind.h>

#define NB_TRAMPOLINE(base, size)                                     \
    using NBBase = base;                                              \
    using NBBase::NBBase;                                             \
    static constexpr std::size_t nb_trampoline_size = (size);         \
    static_assert(nb_trampoline_size >= 1,                            \
                  "NB_TRAMPOLINE requires at least one override slot")

#define NB_OVERRIDE(func, ...) return NBBase::func(__VA_ARGS__)

#define NB_OVERRIDE_PURE(func, ...) return NBBase::func(__VA_ARGS__)

#endif
