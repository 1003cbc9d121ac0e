/*
 * Compile-check stand-in for the binding framework's core header.
 *
 * This is not the real framework: it declares just enough of the API
 * surface used by generated binding sources that a plain C++17 compiler
 * can type-check them without Python headers or a framework checkout.
 * Registrations are validated for real: class_ rejects template arguments
 * that are not bases or trampolines of the bound type, init<> requires a
 * matching constructor, and overload_cast performs genuine overload
 * selection.  Set NANOBIND_INCLUDE_DIR to a real installation to smoke
 * against the genuine headers instead.
 */

#ifndef NANOBIND_NANOBIND_H
#define NANOBIND_NANOBIND_H

#include <cstddef>
#include <type_traits>
#include <utility>

namespace nanobind
{
    namespace detail
    {
        /* A class_ extra argument must share an inheritance relationship
           with the bound type; smart-pointer holders never do. */
        template <typename T, typename U>
        inline constexpr bool related_class_v =
            std::is_base_of_v<T, U> || std::is_base_of_v<U, T>;

        /* First extra argument derived from T (the trampoline), T itself
           when none is given. */
        template <typename T, typename... Ts>
        struct select_alias
        {
            using type = T;
        };

        template <typename T, typename U, typename... Ts>
        struct select_alias<T, U, Ts...>
        {
            using type = std::conditional_t<
                std::is_base_of_v<T, U> && !std::is_same_v<T, U>,
                U, typename select_alias<T, Ts...>::type>;
        };

        template <typename... Args>
        struct overload_cast_impl
        {
            template <typename Return>
            constexpr auto operator()(Return (*pf)(Args...)) const noexcept
            {
                return pf;
            }

            template <typename Return, typename Class>
            constexpr auto operator()(Return (Class::*pmf)(Args...),
                                      std::false_type = {}) const noexcept
            {
                return pmf;
            }

            template <typename Return, typename Class>
            constexpr auto operator()(Return (Class::*pmf)(Args...) const,
                                      std::true_type) const noexcept
            {
                return pmf;
            }
        };
    }

    /** Tag selecting the const overload in overload_cast. */
    inline constexpr std::true_type const_{};

    /** Resolves &Class::method against the parameter list Args. */
    template <typename... Args>
    inline constexpr detail::overload_cast_impl<Args...> overload_cast{};

    /** Tag carrying a constructor signature into class_::def. */
    template <typename... Args>
    struct init
    {
    };

    /** Module handle; records nothing, accepts every registration. */
    class module_
    {
    public:
        module_ def_submodule(const char * /*name*/, const char * /*doc*/ = nullptr)
        {
            return module_();
        }

        template <typename Func>
        module_ &def(const char * /*name*/, Func && /*fn*/)
        {
            return *this;
        }
    };

    /** Class registration handle.  Type-checks its arguments only. */
    template <typename T, typename... Extra>
    class class_
    {
        static_assert((detail::related_class_v<T, Extra> && ...),
                      "class_ template arguments must be base classes or "
                      "trampolines of the bound type; holder types such as "
                      "std::shared_ptr are not supported");

        using Alias = typename detail::select_alias<T, Extra...>::type;

    public:
        class_(module_ & /*m*/, const char * /*name*/)
        {
        }

        template <typename... Args>
        class_ &def(init<Args...> /*sig*/)
        {
            static_assert(std::is_constructible_v<Alias, Args...>,
                          "init<...> does not match any constructor of the "
                          "bound type (or of its trampoline)");
            return *this;
        }

        template <typename Func>
        class_ &def(const char * /*name*/, Func && /*fn*/)
        {
            return *this;
        }

        template <typename Func>
        class_ &def_static(const char * /*name*/, Func && /*fn*/)
        {
            return *this;
        }
    };
}

/* Expands to a plain function definition so the module body is compiled
   without any Python entry-point machinery. */
#define NB_MODULE(name, variable) \
    void nb_module_init_##name(::nanobind::module_ &variable)

#endif
