/* A notifier exercising function-object parameters. */

#ifndef DEMO_CORE_EVENT_SOURCE_
#define DEMO_CORE_EVENT_SOURCE_

#include <functional>

namespace demo
{
    namespace core
    {
        /** \brief Forwards integer events to a registered handler. */
        class EventSource
        {
        public:
            EventSource();

            /** \brief Register the callable invoked for every event. */
            void setHandler(const std::function<void(int)> &handler);

            /** \brief Deliver one event to the handler. */
            void fire(int value);
        };
    }
}

#endif
