#include "gaussdecay/fft.hpp"

#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include <fftw3.h>

namespace gd {

namespace {

struct PlanPair {
  fftw_plan forward;
  fftw_plan inverse;
};

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

PlanPair plans_for(const GridSpec& grid) {
  static std::map<std::pair<int, int>, PlanPair> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  const auto key = std::make_pair(grid.dim, grid.points);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  std::vector<int> shape(grid.dim, grid.points);
  Eigen::ArrayXcd scratch(grid.size());
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  PlanPair p{fftw_plan_dft(grid.dim, shape.data(), buf, buf, FFTW_FORWARD, flags),
             fftw_plan_dft(grid.dim, shape.data(), buf, buf, FFTW_BACKWARD, flags)};
  if (!p.forward || !p.inverse) throw GridError("FFTW could not create a plan");
  cache.emplace(key, p);
  return p;
}

}  // namespace

Fft::Fft(const GridSpec& grid) : grid_(grid) {
  grid_.validate();
  const PlanPair p = plans_for(grid_);
  forward_plan_ = p.forward;
  inverse_plan_ = p.inverse;
}

void Fft::forward(Eigen::ArrayXcd& data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), buf, buf);
}

void Fft::inverse(Eigen::ArrayXcd& data) const {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(static_cast<fftw_plan>(inverse_plan_), buf, buf);
  data /= static_cast<double>(data.size());
}

Eigen::ArrayXd wavenumber_component(const GridSpec& grid, int d) {
  const Eigen::ArrayXd k = grid.wavenumbers();
  Eigen::ArrayXd out(grid.size());
  Eigen::Index stride = 1;
  for (int e = grid.dim - 1; e > d; --e) stride *= grid.points;
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = k[(i / stride) % grid.points];
  return out;
}

Eigen::ArrayXd squared_wavenumber(const GridSpec& grid) {
  Eigen::ArrayXd k2 = Eigen::ArrayXd::Zero(grid.size());
  for (int d = 0; d < grid.dim; ++d) k2 += wavenumber_component(grid, d).square();
  return k2;
}

}  // namespace gd
