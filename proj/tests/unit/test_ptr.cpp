#include <doctest.h>

TEST_SUITE("ptr") {}
