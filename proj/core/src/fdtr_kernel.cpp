#include "fdtr_kernel.hpp"

#include <cmath>

namespace fdtrfit::detail {

// Every loop computes q = sqrt(a lambda^2 + i b) on the principal branch,
// qr = sqrt((|w| + Re w) / 2), qi = b / (2 qr), and e = exp(-2 q h) with
// cos(2x) written as 1 - 2 sin^2(x) so the compiler keeps separate SIMD sin
// calls instead of fusing them into a scalar sincos.

void fold_terminal(const double* __restrict lambda_sq, double* __restrict zr,
                   double* __restrict zi, std::size_t n, double a, double b, double kz) {
  for (std::size_t j = 0; j < n; ++j) {
    const double re = a * lambda_sq[j];
    const double m = std::sqrt(re * re + b * b);
    const double qr = std::sqrt(0.5 * (m + re));
    const double qi = 0.5 * b / qr;
    const double inv = 1.0 / (kz * (qr * qr + qi * qi));
    zr[j] = qr * inv;
    zi[j] = -qi * inv;
  }
}

void fold_adiabatic(const double* __restrict lambda_sq, double* __restrict zr,
                    double* __restrict zi, std::size_t n, double a, double b, double kz, double h) {
  for (std::size_t j = 0; j < n; ++j) {
    const double re = a * lambda_sq[j];
    const double m = std::sqrt(re * re + b * b);
    const double qr = std::sqrt(0.5 * (m + re));
    const double qi = 0.5 * b / qr;
    const double mag = std::exp(-2.0 * h * qr);
    const double s1 = std::sin(h * qi);
    const double er = mag * (1.0 - 2.0 * s1 * s1);
    const double ei = -mag * std::sin(2.0 * h * qi);
    // (1 + e) / (kz q (1 - e))
    const double dr0 = 1.0 - er;
    const double di0 = -ei;
    const double dr = kz * (qr * dr0 - qi * di0);
    const double di = kz * (qr * di0 + qi * dr0);
    const double nr = 1.0 + er;
    const double ni = ei;
    const double inv = 1.0 / (dr * dr + di * di);
    zr[j] = (nr * dr + ni * di) * inv;
    zi[j] = (ni * dr - nr * di) * inv;
  }
}

void fold_layer(const double* __restrict lambda_sq, double* __restrict zr, double* __restrict zi,
                std::size_t n, double a, double b, double kz, double h) {
  for (std::size_t j = 0; j < n; ++j) {
    const double re = a * lambda_sq[j];
    const double m = std::sqrt(re * re + b * b);
    const double qr = std::sqrt(0.5 * (m + re));
    const double qi = 0.5 * b / qr;
    const double kqr = kz * qr;
    const double kqi = kz * qi;
    const double mag = std::exp(-2.0 * h * qr);
    const double s1 = std::sin(h * qi);
    const double er = mag * (1.0 - 2.0 * s1 * s1);
    const double ei = -mag * std::sin(2.0 * h * qi);
    // With P = Z kq and t = (1 - e) / (1 + e):
    //   Z' = ((P + 1) + e (P - 1)) / (kq ((P + 1) - e (P - 1)))
    const double pr = zr[j] * kqr - zi[j] * kqi;
    const double pi = zr[j] * kqi + zi[j] * kqr;
    const double br = er * (pr - 1.0) - ei * pi;
    const double bi = er * pi + ei * (pr - 1.0);
    const double nr = pr + 1.0 + br;
    const double ni = pi + bi;
    const double ar = pr + 1.0 - br;
    const double ai = pi - bi;
    const double dr = kqr * ar - kqi * ai;
    const double di = kqr * ai + kqi * ar;
    const double inv = 1.0 / (dr * dr + di * di);
    zr[j] = (nr * dr + ni * di) * inv;
    zi[j] = (ni * dr - nr * di) * inv;
  }
}

void weighted_sum(const double* __restrict w, const double* __restrict zr,
                  const double* __restrict zi, std::size_t n, double& re, double& im) {
  double sr = 0.0;
  double si = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    sr += w[j] * zr[j];
    si += w[j] * zi[j];
  }
  re = sr;
  im = si;
}

}  // namespace fdtrfit::detail
