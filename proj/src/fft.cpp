#include "tfde/fft.hpp"

#include "tfde/errors.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>
#include <vector>

namespace tfde {

namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

constexpr unsigned kPlanFlags = FFTW_ESTIMATE | FFTW_UNALIGNED;

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

RealFft::RealFft(std::size_t n) : n_(n) {
    if (n == 0) throw DomainError("RealFft: zero length");
    std::vector<double> re(n);
    std::vector<Complex> sp(spectrum_size());
    std::lock_guard lock(planner_mutex());
    const int len = static_cast<int>(n);
    forward_plan_ = fftw_plan_dft_r2c_1d(len, re.data(), as_fftw(sp.data()), kPlanFlags);
    inverse_plan_ = fftw_plan_dft_c2r_1d(len, as_fftw(sp.data()), re.data(), kPlanFlags);
}

RealFft::~RealFft() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void RealFft::forward(std::span<const double> in, std::span<Complex> out) const {
    require_size(in.size(), n_, "RealFft::forward input");
    require_size(out.size(), spectrum_size(), "RealFft::forward output");
    // r2c leaves its input untouched for out-of-place transforms
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in.data()),
                         as_fftw(out.data()));
}

void RealFft::inverse(std::span<Complex> in, std::span<double> out) const {
    require_size(in.size(), spectrum_size(), "RealFft::inverse input");
    require_size(out.size(), n_, "RealFft::inverse output");
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), as_fftw(in.data()), out.data());
}

RealFft2D::RealFft2D(std::size_t n0, std::size_t n1) : n0_(n0), n1_(n1) {
    if (n0 == 0 || n1 == 0) throw DomainError("RealFft2D: zero length");
    std::vector<double> re(n0 * n1);
    std::vector<Complex> sp(spectrum_size());
    std::lock_guard lock(planner_mutex());
    // FFTW is row-major: the last dimension is contiguous, so pass (n1, n0).
    const int a = static_cast<int>(n1), b = static_cast<int>(n0);
    forward_plan_ = fftw_plan_dft_r2c_2d(a, b, re.data(), as_fftw(sp.data()), kPlanFlags);
    inverse_plan_ = fftw_plan_dft_c2r_2d(a, b, as_fftw(sp.data()), re.data(), kPlanFlags);
}

RealFft2D::~RealFft2D() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void RealFft2D::forward(std::span<const double> in, std::span<Complex> out) const {
    require_size(in.size(), n0_ * n1_, "RealFft2D::forward input");
    require_size(out.size(), spectrum_size(), "RealFft2D::forward output");
    fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in.data()),
                         as_fftw(out.data()));
}

void RealFft2D::inverse(std::span<Complex> in, std::span<double> out) const {
    require_size(in.size(), spectrum_size(), "RealFft2D::inverse input");
    require_size(out.size(), n0_ * n1_, "RealFft2D::inverse output");
    fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), as_fftw(in.data()), out.data());
}

std::shared_ptr<const RealFft> real_fft(std::size_t n) {
    static std::mutex m;
    static std::map<std::size_t, std::shared_ptr<const RealFft>> cache;
    std::lock_guard lock(m);
    auto& slot = cache[n];
    if (!slot) slot = std::make_shared<RealFft>(n);
    return slot;
}

std::shared_ptr<const RealFft2D> real_fft_2d(std::size_t n0, std::size_t n1) {
    static std::mutex m;
    static std::map<std::pair<std::size_t, std::size_t>, std::shared_ptr<const RealFft2D>> cache;
    std::lock_guard lock(m);
    auto& slot = cache[{n0, n1}];
    if (!slot) slot = std::make_shared<RealFft2D>(n0, n1);
    return slot;
}

}  // namespace tfde
