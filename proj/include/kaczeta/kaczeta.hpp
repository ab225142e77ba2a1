#pragma once

#include "kaczeta/errors.hpp"
#include "kaczeta/kacgutz.hpp"
#include "kaczeta/model.hpp"
#include "kaczeta/quadrature.hpp"
#include "kaczeta/ruelle.hpp"
#include "kaczeta/specialfns.hpp"
#include "kaczeta/spectral.hpp"
