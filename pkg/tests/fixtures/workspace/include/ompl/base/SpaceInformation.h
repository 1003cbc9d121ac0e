/* Central container for planning-context information. */

#ifndef OMPL_BASE_SPACE_INFORMATION_
#define OMPL_BASE_SPACE_INFORMATION_

#include "ompl/base/State.h"
#include "ompl/base/StateSpace.h"

#include <functional>
#include <iostream>
#include <memory>

namespace ompl
{
    namespace base
    {
        /** \brief The base class for space information.  This contains all
            the information about the space planning is done in. */
        class SpaceInformation
        {
        public:
            /** \brief Constructor.  Sets the instance of the space
                information to be used for planning. */
            SpaceInformation(StateSpacePtr space);

            /** \brief Check if a given state is valid or not. */
            bool isValid(const State *state) const;

            /** \brief Return the instance of the used state space. */
            const StateSpacePtr &getStateSpace() const;

            /** \brief Set the instance of the state validity checker to use. */
            void setStateValidityChecker(const StateValidityCheckerPtr &svc);

            /** \brief Set the state validity checker directly from a
                callable.  This is a convenience overload. */
            void setStateValidityChecker(const std::function<bool(const State *)> &svc);

            /** \brief Get the maximum extent of the space we are planning in. */
            double getMaximumExtent() const;

            /** \brief Print the settings for this instance. */
            void printSettings(std::ostream &out = std::cout) const;
        };

        typedef std::shared_ptr<SpaceInformation> SpaceInformationPtr;
    }
}

#endif
