#pragma once

#include <doctest.h>

#include "jointdesc/error.hpp"

// Runs expr and checks that it throws jointdesc::Error of the given kind.
#define CHECK_ERROR_KIND(expr, expected_kind)                                     \
    do {                                                                          \
        bool caught_ = false;                                                     \
        try {                                                                     \
            (void)(expr);                                                         \
        } catch (const jointdesc::Error& e_) {                                    \
            caught_ = true;                                                       \
            CHECK_MESSAGE(e_.kind() == (expected_kind), e_.what());               \
        }                                                                         \
        CHECK_MESSAGE(caught_, "expected a jointdesc::Error from " #expr);        \
    } while (false)
