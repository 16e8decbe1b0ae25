#pragma once

#include "sconv/specialfn/bessel.hpp"
#include "sconv/specialfn/bump.hpp"
#include "sconv/specialfn/jet.hpp"
#include "sconv/specialfn/quadrature.hpp"
