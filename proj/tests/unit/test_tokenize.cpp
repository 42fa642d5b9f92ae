#include <doctest.h>

TEST_SUITE("tokenize") {}
