#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dmc/matrix.hpp"

namespace dmc {

//! Absolute Pearson correlations between samples: symmetric, entries in
//! [0, 1], diagonal exactly 1.
class CorrelationMatrix {
public:
    explicit CorrelationMatrix(SymmetricMatrix values);

    std::size_t order() const noexcept { return values_.order(); }
    double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
    const SymmetricMatrix& matrix() const noexcept { return values_; }

private:
    SymmetricMatrix values_;
};

//! Per-feature flags for entries more than `k_sigma` standard deviations
//! from the mean (strict inequality, population std).
struct SalientMask {
    std::vector<std::uint8_t> mask;
    double k_sigma = 3.0;
    //! Set when the input had zero standard deviation; mask is then empty.
    bool degenerate = false;

    std::size_t count() const {
        std::size_t c = 0;
        for (auto b : mask) c += b;
        return c;
    }
};

//! Elementwise y = sign(x) * ln(1 + |x|). Odd, strictly monotone, defined on
//! all reals; the inverse is sign(y) * (e^|y| - 1).
DataMatrix signed_log_normalize(const DataMatrix& x);

double signed_log(double v);
double signed_log_inverse(double v);

//! |pearson(row_i, row_j)| for all sample pairs, population (1/n) moments.
//! Throws validation_error naming the row if any row has zero variance.
CorrelationMatrix correlation_matrix(const DataMatrix& x);

//! Flags features deviating more than k_sigma population standard deviations
//! from the mean of x.
SalientMask salient_mask(std::span<const double> x, double k_sigma = 3.0);

} // namespace dmc
