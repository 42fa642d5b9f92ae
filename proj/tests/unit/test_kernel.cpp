#include <doctest.h>

TEST_SUITE("kernel") {}
