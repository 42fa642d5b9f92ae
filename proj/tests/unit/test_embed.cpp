#include <doctest.h>

TEST_SUITE("embed") {}
