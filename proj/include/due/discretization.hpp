#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace due {

/// Uniform partition of [t0, tf] into n_bins left-closed bins.
/// Bin k covers [t0 + k*dt, t0 + (k+1)*dt).
class TimeGrid {
  public:
    TimeGrid(double t0, double tf, std::size_t n_bins);

    double t0() const { return t0_; }
    double tf() const { return tf_; }
    std::size_t n_bins() const { return n_bins_; }
    double dt() const { return dt_; }
    double horizon() const { return tf_ - t0_; }

    /// Left endpoint of bin k.
    double bin_start(std::size_t k) const { return t0_ + static_cast<double>(k) * dt_; }

    bool operator==(const TimeGrid&) const = default;

  private:
    double t0_;
    double tf_;
    std::size_t n_bins_;
    double dt_;
};

TimeGrid make_grid(double t0, double tf, std::size_t n_bins);

/// Piecewise-constant trajectory: one value (rate or cost) per bin.
struct BinTrajectory {
    std::vector<double> values;
    TimeGrid grid;
};

/// Left Riemann sum, sum_k values[k] * dt. Exact for bin-constant inputs.
double integrate_left_riemann(const BinTrajectory& traj);
double integrate_left_riemann(std::span<const double> values, const TimeGrid& grid);

/// Dense row-major |paths| x n_bins matrix. The Tag parameter keeps flows,
/// travel delays and effective delays from being mixed up at call sites.
template <class Tag>
class PathBinMatrix {
  public:
    PathBinMatrix() = default;
    PathBinMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t p, std::size_t k) { return data_[p * cols_ + k]; }
    double operator()(std::size_t p, std::size_t k) const { return data_[p * cols_ + k]; }

    std::span<double> row(std::size_t p) { return {data_.data() + p * cols_, cols_}; }
    std::span<const double> row(std::size_t p) const { return {data_.data() + p * cols_, cols_}; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_shape(std::size_t rows, std::size_t cols) const { return rows_ == rows && cols_ == cols; }

    bool operator==(const PathBinMatrix&) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct FlowTag {};
struct DelayTag {};
struct EffectiveDelayTag {};

/// Departure rates h_p(t_k), vehicles per unit time.
using PathFlowTrajectory = PathBinMatrix<FlowTag>;
/// Travel time D_p(t_k) of a unit departing path p in bin k.
using PathDelayField = PathBinMatrix<DelayTag>;
/// Travel time plus schedule penalty, Psi_p(t_k).
using EffectiveDelayField = PathBinMatrix<EffectiveDelayTag>;

}  // namespace due
