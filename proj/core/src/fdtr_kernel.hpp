#pragma once

#include <cstddef>

// Vectorised inner loops of the Hankel-space impedance fold. This translation
// unit is compiled with -ffast-math so the loops map onto SIMD exp/sin; the
// caller performs all finiteness checks.
namespace fdtrfit::detail {

/// Z = 1 / (kz q) for a semi-infinite bottom layer.
void fold_terminal(const double* lambda_sq, double* zr, double* zi, std::size_t n, double kr_over_kz,
                   double omega_c_over_kz, double kz);

/// Z = 1 / (kz q tanh(q h)) for a finite layer over an adiabatic floor.
void fold_adiabatic(const double* lambda_sq, double* zr, double* zi, std::size_t n,
                    double kr_over_kz, double omega_c_over_kz, double kz, double h);

/// Z <- (Z + tanh(qh) / (kz q)) / (Z kz q tanh(qh) + 1) for a finite layer.
void fold_layer(const double* lambda_sq, double* zr, double* zi, std::size_t n, double kr_over_kz,
                double omega_c_over_kz, double kz, double h);

/// Sum of w_j * Z_j.
void weighted_sum(const double* w, const double* zr, const double* zi, std::size_t n, double& re,
                  double& im);

}  // namespace fdtrfit::detail
