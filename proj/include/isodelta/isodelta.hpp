#pragma once

#include "isodelta/calculus.hpp"
#include "isodelta/delta_model.hpp"
#include "isodelta/errors.hpp"
#include "isodelta/grid.hpp"
#include "isodelta/parameter.hpp"
#include "isodelta/potential.hpp"
#include "isodelta/spectral_verifier.hpp"
#include "isodelta/susy_core.hpp"
#include "isodelta/tridiagonal.hpp"
