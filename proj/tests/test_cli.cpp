#include <doctest.h>

#include "selfrocket/pipeline.hpp"
