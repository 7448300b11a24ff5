#ifndef HSA_ALL_HPP
#define HSA_ALL_HPP

#include "bessel.hpp"
#include "decompose.hpp"
#include "demod.hpp"
#include "envelope.hpp"
#include "errors.hpp"
#include "fft.hpp"
#include "filter.hpp"
#include "hsa.hpp"
#include "io.hpp"
#include "oracles.hpp"
#include "parallel.hpp"
#include "sift.hpp"
#include "signal.hpp"
#include "stft.hpp"

#endif  // HSA_ALL_HPP
