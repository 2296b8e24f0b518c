#pragma once

namespace memsim {

// Single rephasing-pulse transfer efficiency from the zero-delay ROSE
// efficiency: sqrt(eta0 e^OD / OD^2). Throws InconsistentInputsError when
// the result exceeds 1.
double deduce_eta_t(double eta0, double od);

// Spin inhomogeneous linewidth (FWHM, Hz) of a Gaussian line whose
// intensity decays to 1/e at t2star: sqrt(2 ln2) / (pi t2star).
double gamma_inh_from_t2star(double t2star);
double t2star_from_gamma_inh(double gamma_inh_hz);

// Focused Gaussian beam spot diameter, 2.36 f lambda / (pi D0).
double focal_spot_diameter(double focal_length, double wavelength,
                           double beam_diameter);

}  // namespace memsim
