#pragma once

// Dense complex matrices, Hermitian/normal eigendecomposition, Loewner order
// and functional calculus.

#include "normality/matrix.hpp"
#include "normality/spectral.hpp"
