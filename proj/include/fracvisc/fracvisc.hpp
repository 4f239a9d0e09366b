#ifndef FRACVISC_FRACVISC_HPP
#define FRACVISC_FRACVISC_HPP

#include "fracvisc/caputo.hpp"
#include "fracvisc/constitutive.hpp"
#include "fracvisc/curve.hpp"
#include "fracvisc/errors.hpp"
#include "fracvisc/mittag_leffler.hpp"
#include "fracvisc/relaxation.hpp"

#endif
