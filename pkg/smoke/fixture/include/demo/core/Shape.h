/* An abstract base exercising trampoline generation. */

#ifndef DEMO_CORE_SHAPE_
#define DEMO_CORE_SHAPE_

namespace demo
{
    namespace core
    {
        /** \brief Abstract shape meant to be subclassed, including from
            bindings.  Subclasses must provide an area and may refine the
            reset behaviour. */
        class Shape
        {
        public:
            Shape();

            virtual ~Shape();

            /** \brief Compute the enclosed area. */
            virtual double area() const = 0;

            /** \brief Restore the shape to its initial size. */
            virtual void reset();

            /** \brief Get the accumulated scale factor. */
            double scaleFactor() const;
        };
    }
}

#endif
