#pragma once

#include <cstdlib>
#include <exception>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace oscfrac::par {

// Grid kernels are embarrassingly parallel maps; results are written by
// index so the output is independent of scheduling. Set OSCFRAC_SERIAL=1
// to force the serial reference path.

inline bool serial_forced() {
    static const bool forced = [] {
        const char* s = std::getenv("OSCFRAC_SERIAL");
        return s && s[0] == '1';
    }();
    return forced;
}

template <typename F>
std::vector<double> map_serial(const std::vector<double>& xs, F&& f) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
    return out;
}

template <typename F>
std::vector<double> map(const std::vector<double>& xs, F&& f) {
    if (serial_forced()) return map_serial(xs, f);
    std::vector<double> out(xs.size());
    std::exception_ptr err;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16)
#endif
    for (long i = 0; i < static_cast<long>(xs.size()); ++i) {
        try {
            out[static_cast<std::size_t>(i)] = f(xs[static_cast<std::size_t>(i)]);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical(oscfrac_par_err)
#endif
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
}

}  // namespace oscfrac::par
