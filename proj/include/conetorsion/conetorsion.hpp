#pragma once

#include "conetorsion/precision.hpp"
#include "conetorsion/complex.hpp"
#include "conetorsion/special.hpp"
#include "conetorsion/bessel.hpp"
#include "conetorsion/olver.hpp"
#include "conetorsion/spectrum.hpp"
#include "conetorsion/zeta.hpp"
#include "conetorsion/model_operators.hpp"
#include "conetorsion/berezin.hpp"
#include "conetorsion/torsion.hpp"
#include "conetorsion/report.hpp"
#include "conetorsion/verify.hpp"
