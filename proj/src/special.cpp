#include "ctw/special.hpp"

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/bessel.hpp>

namespace ctw {

double airy_ai(double x) { return boost::math::airy_ai(x); }
double airy_ai_prime(double x) { return boost::math::airy_ai_prime(x); }
double bessel_j0(double x) { return boost::math::cyl_bessel_j(0, x); }
double bessel_j1(double x) { return boost::math::cyl_bessel_j(1, x); }

}  // namespace ctw
