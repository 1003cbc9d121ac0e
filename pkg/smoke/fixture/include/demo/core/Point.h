/* A value type exercising overloads and stream printing. */

#ifndef DEMO_CORE_POINT_
#define DEMO_CORE_POINT_

#include <iostream>

namespace demo
{
    namespace core
    {
        /** \brief A planar point with uniform and per-axis scaling. */
        class Point
        {
        public:
            /** \brief Construct a point from its coordinates. */
            Point(double x, double y);

            /** \brief Get the horizontal coordinate. */
            double getX() const;

            /** \brief Get the vertical coordinate. */
            double getY() const;

            /** \brief Scale both coordinates by the same factor. */
            void scale(double factor);

            /** \brief Scale each coordinate by its own factor. */
            void scale(double fx, double fy);

            /** \brief Print a textual form of the point. */
            void printPoint(std::ostream &out = std::cout) const;
        };
    }
}

#endif
