#include "orlicz/parallel.hpp"

namespace orlicz::kernels {

std::vector<double> uniform_grid(double a, double b, std::size_t panels) {
  std::vector<double> xs(panels + 1);
  const double h = (b - a) / static_cast<double>(panels);
  for (std::size_t i = 0; i <= panels; ++i) xs[i] = a + static_cast<double>(i) * h;
  xs.back() = b;
  return xs;
}

std::vector<double> sample(const Evaluable& f, double a, double b, std::size_t panels,
                           Exec exec) {
  const auto xs = uniform_grid(a, b, panels);
  return map_grid(xs, f, exec);
}

}  // namespace orlicz::kernels
