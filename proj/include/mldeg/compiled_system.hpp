#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <vector>

#include "mldeg/poly.hpp"

namespace mldeg {

using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

/// Floating-point image of a list of polynomials over a common variable list,
/// laid out for fast simultaneous evaluation of values and Jacobian.
class CompiledSystem {
public:
    CompiledSystem() = default;

    /// With `normalize_rows`, each polynomial is divided by its largest
    /// coefficient magnitude (zero sets are unchanged).
    explicit CompiledSystem(const std::vector<Poly>& polys, bool normalize_rows = false) {
        nvars_ = polys.empty() ? 0 : polys.front().num_variables();
        max_exp_.assign(nvars_, 0);
        offsets_.push_back(0);
        for (const auto& p : polys) {
            if (p.num_variables() != nvars_) throw DomainError("polynomials in a system must share variables");
            double scale = 1.0;
            if (normalize_rows && !p.is_zero()) {
                double biggest = 0.0;
                for (const auto& [e, c] : p.terms()) biggest = std::max(biggest, std::abs(c.get_d()));
                scale = biggest > 0 ? 1.0 / biggest : 1.0;
            }
            for (const auto& [e, c] : p.terms()) {
                coeffs_.emplace_back(c.get_d() * scale, 0.0);
                for (std::uint32_t v = 0; v < e.size(); ++v) {
                    if (e[v] == 0) continue;
                    vars_.push_back(v);
                    exps_.push_back(e[v]);
                    max_exp_[v] = std::max(max_exp_[v], e[v]);
                }
                factor_end_.push_back(static_cast<std::uint32_t>(vars_.size()));
            }
            offsets_.push_back(static_cast<std::uint32_t>(coeffs_.size()));
        }
        stride_ = 1;
        for (auto m : max_exp_) stride_ = std::max<std::uint32_t>(stride_, m + 1);
    }

    std::size_t num_polys() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
    std::size_t num_variables() const noexcept { return nvars_; }

    /// Values into `f`; Jacobian into `jac` when non-null; per-row
    /// sum_t |c_t x^a_t| into `magnitude` when non-null.
    void evaluate(const VectorXc& x, VectorXc& f, MatrixXc* jac, Eigen::VectorXd* magnitude = nullptr) const {
        const auto m = num_polys();
        f.setZero(static_cast<Eigen::Index>(m));
        if (jac) jac->setZero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(nvars_));
        if (magnitude) magnitude->setZero(static_cast<Eigen::Index>(m));

        powers_.resize(static_cast<std::size_t>(stride_) * nvars_);
        for (std::size_t v = 0; v < nvars_; ++v) {
            Complex* row = &powers_[v * stride_];
            row[0] = 1.0;
            for (std::uint32_t k = 1; k <= max_exp_[v]; ++k) row[k] = row[k - 1] * x[static_cast<Eigen::Index>(v)];
        }

        std::uint32_t fbeg = 0;
        for (std::size_t j = 0; j < m; ++j) {
            Complex sum = 0.0;
            for (std::uint32_t t = offsets_[j]; t < offsets_[j + 1]; ++t) {
                const std::uint32_t fend = factor_end_[t];
                const std::uint32_t k = fend - fbeg;
                prefix_.resize(k + 1);
                prefix_[0] = coeffs_[t];
                for (std::uint32_t i = 0; i < k; ++i)
                    prefix_[i + 1] = prefix_[i] * powers_[vars_[fbeg + i] * stride_ + exps_[fbeg + i]];
                sum += prefix_[k];
                if (magnitude) (*magnitude)[static_cast<Eigen::Index>(j)] += std::abs(prefix_[k]);
                if (jac) {
                    Complex suffix = 1.0;
                    for (std::uint32_t i = k; i-- > 0;) {
                        const auto v = vars_[fbeg + i];
                        const auto e = exps_[fbeg + i];
                        const Complex d = static_cast<double>(e) * powers_[v * stride_ + e - 1];
                        (*jac)(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(v)) += prefix_[i] * d * suffix;
                        suffix *= powers_[v * stride_ + e];
                    }
                }
                fbeg = fend;
            }
            f[static_cast<Eigen::Index>(j)] = sum;
        }
    }

private:
    std::size_t nvars_ = 0;
    std::vector<Complex> coeffs_;
    std::vector<std::uint32_t> offsets_;    // term range per polynomial
    std::vector<std::uint32_t> factor_end_; // factor range end per term
    std::vector<std::uint32_t> vars_;
    std::vector<std::uint32_t> exps_;
    std::vector<std::uint32_t> max_exp_;
    std::uint32_t stride_ = 1;

    // Scratch; a CompiledSystem must not be evaluated from two threads at once.
    mutable std::vector<Complex> powers_;
    mutable std::vector<Complex> prefix_;
};

} // namespace mldeg
