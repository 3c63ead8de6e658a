#pragma once

namespace ctw {

double airy_ai(double x);
double airy_ai_prime(double x);
double bessel_j0(double x);
double bessel_j1(double x);

}  // namespace ctw
