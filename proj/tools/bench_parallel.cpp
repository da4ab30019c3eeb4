// Benchmark of the OpenMP grid map against the serial reference on a
// representative workload: adaptive quadrature of an oscillatory
// integrand over a grid of windows.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "oscfrac/parallel.hpp"
#include "oscfrac/quad.hpp"

namespace {

double workload(double t) {
    return oscfrac::quad::integrate(
        [](double s) { return std::sin(s) * std::sin(s) / (1.0 + s * s * 1e-4); }, t, t + 50.0,
        oscfrac::quad::QuadOptions{1e-12, 1e-10, 1u << 20});
}

template <typename F>
double time_ms(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count();
}

}  // namespace

int main(int argc, char** argv) {
    int n = 2000;
    if (argc > 1) n = std::atoi(argv[1]);
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = 1.0 + i * 0.25;

    std::vector<double> serial_out, parallel_out;
    const double t_serial =
        time_ms([&] { serial_out = oscfrac::par::map_serial(grid, workload); });
    const double t_parallel =
        time_ms([&] { parallel_out = oscfrac::par::map(grid, workload); });

    double max_diff = 0.0;
    for (std::size_t i = 0; i < serial_out.size(); ++i)
        max_diff = std::max(max_diff, std::fabs(serial_out[i] - parallel_out[i]));

    std::printf("grid points      : %d\n", n);
    std::printf("serial           : %.1f ms\n", t_serial);
    std::printf("parallel         : %.1f ms\n", t_parallel);
    std::printf("speedup          : %.2fx\n", t_serial / t_parallel);
    std::printf("max |difference| : %.3e\n", max_diff);
    return max_diff == 0.0 ? 0 : 1;
}
