#pragma once

// Angle coordinates on the invariant torus:
//   alpha1(u)   = (pi / T1) int du / (sqrt(E f1 - kappa f2) sqrt(f2)),
//   alpha2(u,v) = 2 pi eta(v) / eta(2 pi) + F(alpha1),
//   F(a)        = (2 T1 / eta(2 pi)) int_0^a (<f2> - f2(u(s))) ds.
// alpha1 in (0, pi) is the sheet pu > 0, (pi, 2 pi) its mirror pu < 0.

#include <array>
#include <memory>

#include "ctw/actions.hpp"

namespace ctw {

struct AngleChart {
    std::shared_ptr<const TorusData> torus;
    double mean_f2 = 0.0;
    double time_scale = 1.0;          // c in  measure factor = c (f1 + f2 g)
    std::array<double, 2> omega{};    // c * (2 pi / T1, 4 pi <f2> / eta(2 pi))

    const TorusData& t() const { return *torus; }
    double alpha1_of_u(double u) const;   // [0, pi]
    double u_of_alpha1(double a) const;   // any real a (2 pi periodic, mirrored)
    double correction(double a) const;    // F(a), odd and 2 pi periodic
    double alpha2(double u, double v, int sheet = +1) const;
    double v_of(double a1, double a2) const;  // unwrapped v with alpha2(u(a1), v) = a2
};

AngleChart build_chart(std::shared_ptr<const TorusData> torus);
inline AngleChart build_chart(const TorusData& torus) { return build_chart(std::make_shared<const TorusData>(torus)); }

double measure_factor(const AngleChart& chart, std::array<double, 2> alpha);
// D1 E (f + g) at the torus point; 0 when mu = 0.  The shore limit requires D1 = 0 there.
double h_sub_on_torus(const AngleChart& chart, std::array<double, 2> alpha);

// Row-wise helpers for grids of fixed alpha1.
struct ChartRow {
    double u, f1, f2, F;
};
ChartRow chart_row(const AngleChart& chart, double a1);
double measure_factor(const AngleChart& chart, const ChartRow& row, double v);
double h_sub_on_torus(const AngleChart& chart, const ChartRow& row, double v);

}  // namespace ctw
