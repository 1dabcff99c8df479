#pragma once

// Umbrella header.

#include "sg/common.hpp"
#include "sg/dirac.hpp"
#include "sg/energy.hpp"
#include "sg/forms.hpp"
#include "sg/io.hpp"
#include "sg/kusuoka.hpp"
#include "sg/magnetic.hpp"
#include "sg/operators.hpp"
#include "sg/quadrature.hpp"
#include "sg/rational.hpp"
#include "sg/spectral.hpp"
#include "sg/structure.hpp"
#include "sg/verify.hpp"
