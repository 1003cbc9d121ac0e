/* Minimal state representation for the sample library tree. */

#ifndef OMPL_BASE_STATE_
#define OMPL_BASE_STATE_

namespace ompl
{
    namespace base
    {
        /** \brief Definition of an abstract state. */
        class State
        {
        protected:
            State();

            ~State();

        public:
            /** \brief Cast this instance to a desired type. */
            template <class T>
            const T *as() const;
        };

        /** \brief Definition of a compound state. */
        class CompoundState : public State
        {
        public:
            CompoundState();

            const State *operator[](unsigned int index) const;

            /** \brief The components that make up a compound state. */
            State **components;
        };
    }
}

#endif
