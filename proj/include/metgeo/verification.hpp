#pragma once

#include "metgeo/verification/cat0.hpp"
#include "metgeo/verification/oracle.hpp"
#include "metgeo/verification/sweeps.hpp"
