#include <doctest.h>

TEST_SUITE("trajectory") {}
