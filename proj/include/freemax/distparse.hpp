#pragma once

#include <string>

#include "freemax/cdf.hpp"

namespace freemax {

// Distribution spec mini-language:
//   uniform(a,b)  gumbel(loc,scale)  frechet(alpha,loc,scale)
//   weibull(alpha,loc,scale)  exponential(rate)
//   atomic(x1:m1,x2:m2,...)  empirical(path.csv)
// Throws std::invalid_argument on malformed specs.
Cdf parse_distribution(const std::string& spec);

}  // namespace freemax
