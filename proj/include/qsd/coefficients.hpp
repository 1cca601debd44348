#pragma once

#include <memory>
#include <vector>

#include "qsd/drift.hpp"

namespace qsd {

/// Cached evaluators and grids for Q(y) = int_0^y 2q, e^Q and e^-Q.
/// Immutable for readers after construction; the quadrature-backed Q cache
/// extends itself on demand behind a lock, so concurrent reads stay safe.
class CoefficientTable {
public:
    CoefficientTable() = default;

    double q(double x) const { return spec_.q(x); }
    double Q(double y) const;

    const DriftSpec& spec() const { return spec_; }
    double R() const { return R_; }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<double>& Q_grid() const { return Q_grid_; }
    const std::vector<double>& expQ_grid() const { return expQ_grid_; }
    const std::vector<double>& expmQ_grid() const { return expmQ_grid_; }

private:
    friend CoefficientTable build_coefficients(const DriftSpec&, double, std::size_t);

    DriftSpec spec_;
    double R_ = 0.0;
    std::vector<double> grid_, Q_grid_, expQ_grid_, expmQ_grid_;
    class QCache;
    std::shared_ptr<QCache> qcache_;  // null when the family has a closed form
};

/// Build the table on [0, R] with an n+1 point uniform grid.
/// Q uses the family closed form when available, otherwise cumulative
/// adaptive quadrature with cubic Hermite interpolation between knots.
CoefficientTable build_coefficients(const DriftSpec& spec, double R, std::size_t n);

}  // namespace qsd
