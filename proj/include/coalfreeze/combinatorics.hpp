// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <vector>

#include "coalfreeze/rational.hpp"

namespace coalfreeze {

Integer binomial(unsigned n, unsigned k);
Integer factorial(unsigned n);
Rational binomial_q(unsigned n, unsigned k);

// n! / (n1! n2! ... nl!) for a composition of n.
Integer multinomial(const std::vector<int>& parts);

Integer bell_number(int n);

}  // namespace coalfreeze
