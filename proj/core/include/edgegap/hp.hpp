#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <vector>

namespace edgegap {

using HpReal = boost::multiprecision::mpfr_float;

// Sets the default working precision (in bits) for new HpReal values on this thread.
class HpPrecisionGuard {
public:
    explicit HpPrecisionGuard(int bits);
    ~HpPrecisionGuard();
    HpPrecisionGuard(const HpPrecisionGuard&) = delete;
    HpPrecisionGuard& operator=(const HpPrecisionGuard&) = delete;

private:
    unsigned saved_;
};

// Dense Hermitian matrix in high precision, row-major; `im` empty for real matrices.
struct HpHermitian {
    int n = 0;
    std::vector<HpReal> re;
    std::vector<HpReal> im;
    bool is_real() const { return im.empty(); }
};

} // namespace edgegap
