#ifndef FRACTOOL_FRACTOOL_HPP
#define FRACTOOL_FRACTOOL_HPP

#include "fractool/curve.hpp"
#include "fractool/dimension.hpp"
#include "fractool/empirics.hpp"
#include "fractool/error.hpp"
#include "fractool/export.hpp"
#include "fractool/expr.hpp"
#include "fractool/geometry.hpp"
#include "fractool/model.hpp"
#include "fractool/parser.hpp"
#include "fractool/spectral.hpp"

#endif  // FRACTOOL_FRACTOOL_HPP
