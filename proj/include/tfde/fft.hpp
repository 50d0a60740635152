#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace tfde {

using Complex = std::complex<double>;

/// Real-to-complex transform pair of a fixed length, backed by FFTW.
///
/// Plans are created once per length and shared (see real_fft()). forward()
/// and inverse() are unnormalized and may be called from several threads.
class RealFft {
public:
    explicit RealFft(std::size_t n);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    std::size_t size() const { return n_; }
    std::size_t spectrum_size() const { return n_ / 2 + 1; }

    /// in: n reals, out: n/2+1 complex
    void forward(std::span<const double> in, std::span<Complex> out) const;
    /// in: n/2+1 complex (overwritten), out: n reals; result is n * x.
    void inverse(std::span<Complex> in, std::span<double> out) const;

private:
    std::size_t n_;
    void* forward_plan_;
    void* inverse_plan_;
};

/// Two-dimensional counterpart. Data is stored with the first index fastest
/// (n0 contiguous), matching the x-major grid vectorization.
class RealFft2D {
public:
    RealFft2D(std::size_t n0, std::size_t n1);
    ~RealFft2D();
    RealFft2D(const RealFft2D&) = delete;
    RealFft2D& operator=(const RealFft2D&) = delete;

    std::size_t n0() const { return n0_; }
    std::size_t n1() const { return n1_; }
    /// Complex layout: (n0/2+1) fastest, n1 slow.
    std::size_t spectrum_size() const { return (n0_ / 2 + 1) * n1_; }

    void forward(std::span<const double> in, std::span<Complex> out) const;
    void inverse(std::span<Complex> in, std::span<double> out) const;

private:
    std::size_t n0_, n1_;
    void* forward_plan_;
    void* inverse_plan_;
};

/// Cached plans, keyed by length.
std::shared_ptr<const RealFft> real_fft(std::size_t n);
std::shared_ptr<const RealFft2D> real_fft_2d(std::size_t n0, std::size_t n1);

}  // namespace tfde
