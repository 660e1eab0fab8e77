#pragma once

#include "gaussdecay/grid.hpp"

namespace gd {

/// In-place n-dimensional FFT on a grid's flat storage. Plans are cached per
/// (dimension, points) and shared between threads; execution is reentrant.
/// The inverse transform is normalized, so inverse(forward(u)) == u.
class Fft {
 public:
  explicit Fft(const GridSpec& grid);

  void forward(Eigen::ArrayXcd& data) const;
  void inverse(Eigen::ArrayXcd& data) const;

  const GridSpec& grid() const { return grid_; }

 private:
  GridSpec grid_;
  void* forward_plan_;
  void* inverse_plan_;
};

/// |k|^2 at every node of the frequency grid, FFT ordering.
Eigen::ArrayXd squared_wavenumber(const GridSpec& grid);

/// Component k_d at every node of the frequency grid, FFT ordering.
Eigen::ArrayXd wavenumber_component(const GridSpec& grid, int d);

}  // namespace gd
