#include <doctest.h>

TEST_SUITE("autodiff") {}
