#pragma once

#include <string_view>
#include <vector>

#include "qdyn/series.hpp"

namespace qdyn::spectra {

/// E(omega) = beta hbar omega / (1 - exp(-beta hbar omega)); E(0) = 1.
double kubo_factor(double omega, double beta, double hbar = 1.0) noexcept;

enum class Window { Rectangular, Hann };

std::string_view to_string(Window w) noexcept;
Window window_from_string(std::string_view name);

/// Sampled transform S(omega) = dt sum_k w(t_k) C(t_k) exp(i omega t_k) on the
/// symmetric time grid -t_max..t_max. Frequencies ascend with spacing 2 pi / (n dt).
struct SpectrumEstimate {
  std::vector<double> omega;
  std::vector<cplx> values;
  Window window = Window::Hann;
  double dt = 0.0;
  double t_max = 0.0;
  std::size_t n = 0;  // transform length
  double beta = 1.0;
  SeriesKind source = SeriesKind::Exact;

  double spacing() const { return omega.size() > 1 ? omega[1] - omega[0] : 0.0; }
};

/// Pointwise multiplication by E(omega); lines at omega = 0 are unchanged.
SpectralLines canonical_to_standard(const SpectralLines& canonical);
SpectrumEstimate canonical_to_standard(const SpectrumEstimate& canonical, double beta);

/// The one-sided series (t_0 = 0, uniform step) is extended with
/// C(-t) = conj C(t) before transforming. The Hann window is
/// cos^2(pi t / (2 (t_max + dt))). `padding` multiplies the transform length.
/// Throws NonuniformGrid.
SpectrumEstimate fourier_transform_series(const CorrelationSeries& series, Window window = Window::Hann,
                                          int padding = 1);

/// Sum of S(omega) d(omega) over |omega - center| <= half_width.
cplx integrated_weight(const SpectrumEstimate& spec, double center, double half_width);

struct Peak {
  double omega = 0.0;
  double height = 0.0;
  double width = 0.0;  // full width at half maximum, linear interpolation
};

/// Strict local maxima of Re S above `threshold`, refined by a parabola
/// through the three highest bins. Sorted by frequency.
std::vector<Peak> extract_peaks(const SpectrumEstimate& spec, double threshold);

}  // namespace qdyn::spectra
