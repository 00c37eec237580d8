#include "dmc/preprocess.hpp"

#include <cmath>
#include <string>

#include "dmc/error.hpp"

namespace dmc {

CorrelationMatrix::CorrelationMatrix(SymmetricMatrix values) : values_(std::move(values)) {
    const std::size_t n = values_.order();
    for (std::size_t i = 0; i < n; ++i) {
        if (values_(i, i) != 1.0)
            throw validation_error("correlation matrix: diagonal entry " + std::to_string(i) +
                                   " is not 1");
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = values_(i, j);
            if (!(v >= 0.0 && v <= 1.0))
                throw validation_error("correlation matrix: entry (" + std::to_string(i) + "," +
                                       std::to_string(j) + ") outside [0,1]");
        }
    }
}

double signed_log(double v) {
    return std::copysign(std::log1p(std::abs(v)), v);
}

double signed_log_inverse(double v) {
    return std::copysign(std::expm1(std::abs(v)), v);
}

DataMatrix signed_log_normalize(const DataMatrix& x) {
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = signed_log(x(i, j));
    return DataMatrix(std::move(out));
}

namespace {

struct RowMoments {
    double mean;
    double var; // population (1/n)
};

RowMoments row_moments(std::span<const double> row) {
    const std::size_t p = row.size();
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= static_cast<double>(p);
    double var = 0.0;
    for (double v : row) {
        const double d = v - mean;
        var += d * d;
    }
    var /= static_cast<double>(p);
    return {mean, var};
}

} // namespace

CorrelationMatrix correlation_matrix(const DataMatrix& x) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();

    std::vector<RowMoments> moments(n);
    for (std::size_t i = 0; i < n; ++i) {
        moments[i] = row_moments(x.row(i));
        if (moments[i].var == 0.0)
            throw validation_error("correlation matrix: row " + std::to_string(i) +
                                   " has zero variance");
    }

    SymmetricMatrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.set(i, i, 1.0);
        const auto ri = x.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto rj = x.row(j);
            double cov = 0.0;
            for (std::size_t k = 0; k < p; ++k)
                cov += (ri[k] - moments[i].mean) * (rj[k] - moments[j].mean);
            cov /= static_cast<double>(p);
            const double r = cov / std::sqrt(moments[i].var * moments[j].var);
            out.set(i, j, std::min(std::abs(r), 1.0));
        }
    }
    return CorrelationMatrix(std::move(out));
}

SalientMask salient_mask(std::span<const double> x, double k_sigma) {
    if (x.size() < 2)
        throw validation_error("salient mask: need at least 2 entries");
    for (double v : x)
        if (!std::isfinite(v)) throw validation_error("salient mask: non-finite entry");

    const RowMoments m = row_moments(x);
    SalientMask out;
    out.k_sigma = k_sigma;
    out.mask.assign(x.size(), 0);
    if (m.var == 0.0) {
        out.degenerate = true;
        return out;
    }
    const double cutoff = k_sigma * std::sqrt(m.var);
    for (std::size_t k = 0; k < x.size(); ++k)
        out.mask[k] = std::abs(x[k] - m.mean) > cutoff ? 1 : 0;
    return out;
}

} // namespace dmc
