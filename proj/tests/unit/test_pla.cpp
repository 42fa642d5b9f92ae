#include <doctest.h>

TEST_SUITE("pla") {}
